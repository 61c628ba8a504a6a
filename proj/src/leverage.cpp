#include "actreg/leverage.hpp"

#include <cmath>
#include <string>

#include "actreg/errors.hpp"
#include "actreg/linalg.hpp"

namespace actreg {

LeverageScores leverage_scores(const Matrix& a) {
  Matrix u = orthonormal_basis(a);
  LeverageScores out;
  out.scores = u.rowwise().squaredNorm();
  out.rank = a.cols();
  return out;
}

InclusionProbabilities probability_ceiling(const Vector& initial, Index k) {
  const Index n = initial.size();
  if (k < 1 || k > n)
    throw InfeasibleK("probability_ceiling: k = " + std::to_string(k) + " with n = " +
                      std::to_string(n));
  KahanSum total;
  for (Index i = 0; i < n; ++i) {
    if (!(initial(i) > 0.0))
      throw BadInput("probability_ceiling: entry " + std::to_string(i) + " is " +
                     std::to_string(initial(i)) + ", need every entry > 0");
    total.add(initial(i));
  }
  if (std::abs(total.value() - static_cast<Real>(k)) > 1e-6)
    throw BadInput("probability_ceiling: sum(initial) = " + std::to_string(total.value()) +
                   " but k = " + std::to_string(k));

  InclusionProbabilities out;
  out.probs = initial;
  out.k = k;
  Vector& p = out.probs;
  Real scale = 1.0;  // cumulative multiplier applied to never-capped entries

  // Each pass caps at least one new entry, so k passes suffice; the +1
  // guards the loop against a logic error rather than a data case.
  for (Index pass = 0; pass <= k + 1; ++pass) {
    Index above = 0;
    for (Index i = 0; i < n; ++i)
      if (p(i) > 1.0) {
        p(i) = 1.0;
        ++above;
      }
    Index capped = 0;
    KahanSum free_sum;
    for (Index i = 0; i < n; ++i) {
      if (p(i) >= 1.0)
        ++capped;
      else
        free_sum.add(p(i));
    }
    if (capped == n || above == 0) break;
    // sum(p) = k held before capping, so the free block is nonempty here
    // and its sum is positive.
    Real factor = static_cast<Real>(k - capped) / free_sum.value();
    for (Index i = 0; i < n; ++i)
      if (p(i) < 1.0) p(i) *= factor;
    scale *= factor;
  }

  // Exact renormalization of the free block so the total lands on k to
  // machine precision (the loop alone leaves O(passes * eps) drift).
  Index capped = 0;
  KahanSum free_sum;
  for (Index i = 0; i < n; ++i) {
    if (p(i) >= 1.0)
      ++capped;
    else
      free_sum.add(p(i));
  }
  if (capped < k) {
    Real factor = static_cast<Real>(k - capped) / free_sum.value();
    if (std::abs(factor - 1.0) > 1e-15) {
      for (Index i = 0; i < n; ++i)
        if (p(i) < 1.0) p(i) = std::min(1.0, p(i) * factor);
      scale *= factor;
    }
  }
  out.ceiling_constant = scale;
  return out;
}

InclusionProbabilities inclusion_from_leverage(const LeverageScores& scores, Index k) {
  if (scores.rank < 1) throw BadInput("inclusion_from_leverage: rank must be positive");
  Real base = static_cast<Real>(k) / static_cast<Real>(scores.rank);
  InclusionProbabilities out = probability_ceiling(scores.scores * base, k);
  out.ceiling_constant *= base;  // rebase onto the raw scores
  return out;
}

}  // namespace actreg
