#pragma once

#include "actreg/types.hpp"

namespace actreg {

struct LeverageScores {
  Vector scores;  // scores[i] = squared i-th row norm of an orthonormal basis
  Index rank = 0;
};

// Inclusion probabilities p with sum(p) = k and every entry in (0, 1].
// ceiling_constant is the scalar c such that p[i] = min(1, c * source[i])
// where source is whatever probability_ceiling / inclusion_from_leverage
// was fed (leverage scores for the latter).
struct InclusionProbabilities {
  Vector probs;
  Index k = 0;
  Real ceiling_constant = 1.0;
};

// Row leverage scores of a: squared row norms of orthonormal_basis(a).
// Sums to a.cols() for full-column-rank input; propagates RankDeficient.
LeverageScores leverage_scores(const Matrix& a);

// Waterfilling of an initial vector with sum k onto [0, 1]: repeatedly cap
// entries above 1 and rescale the rest to restore the sum.  Terminates in
// at most k passes.  The result is min(1, c * initial) elementwise.
// Throws InfeasibleK if k > n or k < 1, BadInput if any entry is <= 0 or
// |sum(initial) - k| > 1e-6.
InclusionProbabilities probability_ceiling(const Vector& initial, Index k);

// probability_ceiling applied to (k / rank) * scores, with the returned
// ceiling_constant rebased so probs = min(1, ceiling_constant * scores).
InclusionProbabilities inclusion_from_leverage(const LeverageScores& scores, Index k);

}  // namespace actreg
