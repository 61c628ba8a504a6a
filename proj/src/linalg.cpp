#include "actreg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "actreg/errors.hpp"
#include "actreg/rng.hpp"

namespace actreg {

namespace {

void require_nonempty(const Matrix& a, const char* op) {
  if (a.rows() == 0 || a.cols() == 0)
    throw DimensionMismatch(std::string(op) + ": input is empty (" +
                            std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + ")");
}

}  // namespace

Real rank_threshold(const Matrix& a) {
  return static_cast<Real>(std::max(a.rows(), a.cols())) *
         std::numeric_limits<Real>::epsilon();
}

Matrix orthonormal_basis(const Matrix& a) {
  require_nonempty(a, "orthonormal_basis");
  if (a.rows() < a.cols())
    throw DimensionMismatch("orthonormal_basis: need rows >= cols, got " +
                            std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  // Eigen compares |R_ii| against threshold * |maxPivot|; maxPivot is the
  // largest column norm under pivoting, so this matches rank_threshold().
  qr.setThreshold(rank_threshold(a));
  if (qr.rank() < a.cols())
    throw RankDeficient("orthonormal_basis: effective rank " + std::to_string(qr.rank()) +
                            " < " + std::to_string(a.cols()) + " columns",
                        qr.rank());
  return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

RegressionSolution weighted_least_squares(const Matrix& a, const Vector& b) {
  require_nonempty(a, "weighted_least_squares");
  if (a.rows() != b.size())
    throw DimensionMismatch("weighted_least_squares: " + std::to_string(a.rows()) +
                            " rows vs " + std::to_string(b.size()) + " targets");
  RegressionSolution sol;
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  qr.setThreshold(rank_threshold(a));
  sol.effective_rank = qr.rank();
  if (sol.effective_rank < a.cols()) {
    // Pivoted QR would zero-fill the trailing coefficients; complete the
    // factorization to get the minimum-norm solution instead.
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
    cod.setThreshold(rank_threshold(a));
    sol.coefficients = cod.solve(b);
    sol.rank_deficient = true;
    sol.effective_rank = cod.rank();
  } else {
    sol.coefficients = qr.solve(b);
  }
  sol.residual_norm_sq = (a * sol.coefficients - b).squaredNorm();
  return sol;
}

namespace {

// Top eigenvalue magnitude of symmetric B by power iteration on B^2.
// Squaring keeps convergence monotone when the extreme eigenvalues come
// in a +/-lambda pair, which a plain iteration would bounce between.
Real power_norm(const Matrix& b, Vector v, Real rel_tol, int max_iters) {
  Real lambda_sq = 0.0;
  Real prev = std::numeric_limits<Real>::infinity();
  for (int it = 0; it < max_iters; ++it) {
    Vector w = b * (b * v);
    Real norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    lambda_sq = v.dot(b * (b * v));
    if (std::abs(lambda_sq - prev) <= rel_tol * std::max(std::abs(lambda_sq), 1e-300))
      return std::sqrt(std::max(lambda_sq, 0.0));
    prev = lambda_sq;
  }
  return std::numeric_limits<Real>::quiet_NaN();
}

}  // namespace

Real spectral_deviation_from_identity(const Matrix& m) {
  require_nonempty(m, "spectral_deviation_from_identity");
  if (m.rows() != m.cols())
    throw DimensionMismatch("spectral_deviation_from_identity: matrix is " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  const Index n = m.rows();
  Matrix b = 0.5 * (m + m.transpose()) - Matrix::Identity(n, n);
  if (b.lpNorm<Eigen::Infinity>() == 0.0) return 0.0;

  Vector v0(n);
  for (Index i = 0; i < n; ++i) v0(i) = (i % 2 == 0) ? 1.0 : -1.0;
  v0.normalize();
  Real est = power_norm(b, v0, 1e-8, 10000);
  if (std::isnan(est)) {
    RngState rng{0x5EEDBA11u, 0, 0};
    Vector v1(n);
    for (Index i = 0; i < n; ++i) v1(i) = rng.next_gaussian();
    v1.normalize();
    est = power_norm(b, v1, 1e-8, 10000);
  }
  if (std::isnan(est))
    throw SolverDiverged("spectral_deviation_from_identity: power iteration stalled");
  return est;
}

}  // namespace actreg
