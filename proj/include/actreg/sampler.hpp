#pragma once

#include <string>
#include <utility>
#include <vector>

#include "actreg/leverage.hpp"
#include "actreg/rng.hpp"
#include "actreg/tree.hpp"
#include "actreg/types.hpp"

namespace actreg {

struct SampleSet {
  std::vector<Index> indices;  // ascending row indices
  Vector weights;              // aligned with indices; 1/sqrt(inclusion prob)
  Index k = 0;                 // target sample size
};

// Tree-pivotal draw.  Sibling leaves/subtree survivors compete pairwise in
// post order; each match resolves one Bernoulli and either merges the two
// masses onto a winner (combined mass <= 1) or selects one row outright
// and carries the excess (combined mass > 1).  Exactly k rows come back:
// every p = 1 row plus the selected competitors.  One uniform is consumed
// per internal node, plus one more only if the root mass is fractional.
// Throws BadInput if the tree's leaf set is not exactly {i : p_i < 1} or
// probabilities leave (0, 1]; NonIntegerMass if the fractional mass is not
// an integer within 1e-6, or the root residual is not 0/1 within 1e-9.
SampleSet pivotal_sample(const CompetitionTree& tree, const InclusionProbabilities& probs,
                         RngState& rng);

// Independent coin per row.  Sample size is k only in expectation.
SampleSet bernoulli_sample(const InclusionProbabilities& probs, RngState& rng);

// k distinct rows uniformly without replacement; weights sqrt(n/k).
SampleSet uniform_sample(Index n, Index k, RngState& rng);

// Rows of (a, b) at the sample's indices, scaled by its weights, so that
// least squares on the result is the weighted subsampled problem.
std::pair<Matrix, Vector> subsample_system(const Matrix& a, const Vector& b,
                                           const SampleSet& s);

// CSV with header "index,weight".
void write_sample_csv(const std::string& path, const SampleSet& s);
SampleSet read_sample_csv(const std::string& path);

}  // namespace actreg
