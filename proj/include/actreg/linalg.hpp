#pragma once

#include "actreg/types.hpp"

namespace actreg {

struct RegressionSolution {
  Vector coefficients;
  Real residual_norm_sq = 0.0;
  bool rank_deficient = false;
  Index effective_rank = 0;
};

// Orthonormal basis of col(a) via Householder QR with column pivoting.
// Returned U has a.cols() columns with ||U^T U - I||_max <= 1e-10.
// Throws RankDeficient (with the effective rank) when the numerical rank
// is below a.cols(); throws DimensionMismatch on empty or wide input.
Matrix orthonormal_basis(const Matrix& a);

// Least-squares solve min ||a x - b||_2 by orthogonal factorization.
// Row weighting is the caller's job (scale rows of a and b first).
// On rank deficiency returns the minimum-norm solution and sets the flag
// instead of throwing; the effective rank is reported either way.
RegressionSolution weighted_least_squares(const Matrix& a, const Vector& b);

// ||sym(m) - I||_2 where sym(m) = (m + m^T)/2, by power iteration on the
// shifted operator.  Relative tolerance 1e-8, at most 10000 iterations,
// deterministic start; falls back to one seeded random restart before
// giving up.  Throws DimensionMismatch unless m is square and non-empty.
Real spectral_deviation_from_identity(const Matrix& m);

// Rank cutoff used by both factorizations above:
// max(rows, cols) * eps * (largest column norm, via the QR max pivot).
Real rank_threshold(const Matrix& a);

}  // namespace actreg
