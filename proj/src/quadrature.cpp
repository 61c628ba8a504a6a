#include "actreg/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "actreg/errors.hpp"

namespace actreg {

std::pair<Vector, Vector> gauss_legendre(Index n) {
  if (n < 1) throw BadInput("gauss_legendre: need at least one node");
  Vector nodes(n), weights(n);
  for (Index i = 0; i < n; ++i) {
    // Chebyshev-angle initial guess, then Newton on P_n.
    Real x = std::cos(std::numbers::pi * (static_cast<Real>(i) + 0.75) /
                      (static_cast<Real>(n) + 0.5));
    Real dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      Real p0 = 1.0, p1 = x;
      for (Index m = 2; m <= n; ++m) {
        Real pm = ((2.0 * static_cast<Real>(m) - 1.0) * x * p1 -
                   (static_cast<Real>(m) - 1.0) * p0) /
                  static_cast<Real>(m);
        p0 = p1;
        p1 = pm;
      }
      dp = static_cast<Real>(n) * (x * p1 - p0) / (x * x - 1.0);
      Real dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes(n - 1 - i) = x;
    weights(n - 1 - i) = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return {nodes, weights};
}

namespace {

Real panel(const std::function<Real(Real)>& f, Real a, Real b, const Vector& xs,
           const Vector& ws) {
  Real mid = 0.5 * (a + b);
  Real half = 0.5 * (b - a);
  Real acc = 0.0;
  for (Index i = 0; i < xs.size(); ++i) acc += ws(i) * f(mid + half * xs(i));
  return half * acc;
}

Real refine(const std::function<Real(Real)>& f, Real a, Real b, Real whole, Real tol,
            const Vector& xs, const Vector& ws, int depth) {
  if (depth > 48)
    throw QuadratureFailure("integrate: panel recursion exhausted near [" +
                            std::to_string(a) + ", " + std::to_string(b) + "]");
  Real mid = 0.5 * (a + b);
  Real left = panel(f, a, mid, xs, ws);
  Real right = panel(f, mid, b, xs, ws);
  if (std::abs(left + right - whole) <= tol) return left + right;
  return refine(f, a, mid, left, 0.5 * tol, xs, ws, depth + 1) +
         refine(f, mid, b, right, 0.5 * tol, xs, ws, depth + 1);
}

}  // namespace

Real integrate(const std::function<Real(Real)>& f, Real a, Real b, Real abs_tol,
               Index panel_order) {
  if (!(abs_tol > 0.0)) throw BadInput("integrate: tolerance must be positive");
  if (a == b) return 0.0;
  auto [xs, ws] = gauss_legendre(panel_order);
  Real whole = panel(f, a, b, xs, ws);
  return refine(f, a, b, whole, abs_tol, xs, ws, 0);
}

}  // namespace actreg
