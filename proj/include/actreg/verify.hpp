#pragma once

#include <vector>

#include "actreg/leverage.hpp"
#include "actreg/sampler.hpp"
#include "actreg/tree.hpp"
#include "actreg/types.hpp"

namespace actreg {

// Exact distribution over selection outcomes; index sets ascending.
struct SampleDistribution {
  Index n = 0;
  std::vector<std::pair<std::vector<Index>, Real>> outcomes;

  Vector marginals() const;
  // True when every outcome has the same cardinality.
  bool homogeneous() const;
};

enum class MatchOrder { left_first, right_first };

// Expands every branch of the pivotal draw into its exact probability and
// merges identical selection sets.  The distribution depends only on the
// tree, not the traversal, which the two match orders let tests confirm.
// Throws TooLarge above 14 leaves; NonIntegerMass like the sampler.
SampleDistribution enumerate_pivotal(const CompetitionTree& tree,
                                     const InclusionProbabilities& probs,
                                     MatchOrder order = MatchOrder::left_first);

// Product-Bernoulli reference distribution (2^n outcomes).
SampleDistribution enumerate_bernoulli(const Vector& probs);

// One-sided influence under conditioning set s:
// matrix(i, j) = Pr[xi_j | xi_i and s] - Pr[xi_j | s] for i, j outside s
// (rows for i in s, infeasible i, and columns in s are zero) and
// inf_norm = max_i sum_j |matrix(i, j)|.
// Throws ImpossibleCondition when Pr[s] = 0.
struct InfluenceReport {
  std::vector<Index> conditioning_set;
  Matrix influence;
  Real inf_norm = 0.0;
};
InfluenceReport influence_report(const SampleDistribution& dist,
                                 const std::vector<Index>& s);

// Max inf_norm over every feasible conditioning set of size at most
// max_conditioning (pass dist.n for the full sweep).
Real d_inf(const SampleDistribution& dist, Index max_conditioning);

// Count of pairs violating Pr[xi_i and xi_j] <= p_i p_j + 1e-12, the
// pairwise negative-correlation property.
Index negative_correlation_violations(const SampleDistribution& dist);

// ||U~^T U~ - I||_2 for the weighted row subsample U~ of u.
Real embedding_deviation(const Matrix& u, const SampleSet& s);

// ||U~^T r~||^2 / ||r||^2 for a residual r orthogonal to col(u)
// (tolerance 1e-8 ||r||; zero residual returns 0).
Real matvec_error(const Matrix& u, const Vector& residual, const SampleSet& s);

}  // namespace actreg
