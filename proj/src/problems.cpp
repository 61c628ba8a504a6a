#include "actreg/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "actreg/errors.hpp"

namespace actreg {

ProblemKind problem_from_name(const std::string& name) {
  if (name == "oscillator2d") return ProblemKind::oscillator2d;
  if (name == "oscillator3d") return ProblemKind::oscillator3d;
  if (name == "heat") return ProblemKind::heat;
  if (name == "surface_reaction") return ProblemKind::surface_reaction;
  throw BadInput("unknown problem '" + name + "'");
}

std::string problem_name(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::oscillator2d: return "oscillator2d";
    case ProblemKind::oscillator3d: return "oscillator3d";
    case ProblemKind::heat: return "heat";
    case ProblemKind::surface_reaction: return "surface_reaction";
  }
  throw BadInput("unknown problem kind");
}

TargetProblem TargetProblem::make(ProblemKind kind) {
  TargetProblem p;
  p.kind = kind;
  switch (kind) {
    case ProblemKind::oscillator2d:
      p.domain = {{1.0, 3.0}, {0.0, 2.0}};  // spring constant, frequency
      break;
    case ProblemKind::oscillator3d:
      p.domain = {{1.0, 3.0}, {0.0, 2.0}, {0.0, 2.0}};  // spring, forcing, frequency
      break;
    case ProblemKind::heat:
      p.domain = {{0.0, 3.0}, {0.0, 5.0}};  // query time, frequency
      break;
    case ProblemKind::surface_reaction:
      p.domain = {{-10.0, 10.0}, {-10.0, 10.0}};  // feature-scaling box only
      break;
  }
  return p;
}

namespace {

void check_point(const TargetProblem& problem, const Vector& point) {
  if (point.size() != problem.dim())
    throw DimensionMismatch("evaluate_target: point has " + std::to_string(point.size()) +
                            " coordinates, problem expects " + std::to_string(problem.dim()));
  if (problem.kind == ProblemKind::surface_reaction) return;
  for (Index a = 0; a < point.size(); ++a) {
    auto [lo, hi] = problem.domain[a];
    Real tol = 1e-9 * (hi - lo);
    if (point(a) < lo - tol || point(a) > hi + tol)
      throw OutOfDomain("evaluate_target: coordinate " + std::to_string(a) + " = " +
                        std::to_string(point(a)) + " outside [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
  }
}

// Dormand-Prince 5(4) on the oscillator state (x, v), tracking max |x|
// at accepted steps plus the exact interior extrema of the cubic Hermite
// interpolant (x' = v is known at both ends, so the cubic is O(h^4)
// accurate and its extrema are roots of a quadratic).
Real oscillator_max_displacement(Real spring, Real forcing, Real freq, Real damping) {
  constexpr Real t_end = 20.0;
  constexpr Real tol = 1e-8;

  auto rhs = [&](Real t, Real x, Real v, Real& dx, Real& dv) {
    dx = v;
    dv = forcing * std::cos(freq * t) - damping * v - spring * x;
  };

  Real t = 0.0, x = 0.0, v = 0.0;
  Real h = 1e-2;
  Real peak = 0.0;
  long steps = 0;
  while (t < t_end) {
    if (++steps > 2000000 || h < 1e-13 * t_end)
      throw SolverDiverged("oscillator: step control collapsed at t = " + std::to_string(t));
    h = std::min(h, t_end - t);

    Real k1x, k1v, k2x, k2v, k3x, k3v, k4x, k4v, k5x, k5v, k6x, k6v, k7x, k7v;
    rhs(t, x, v, k1x, k1v);
    rhs(t + h / 5, x + h * (k1x / 5), v + h * (k1v / 5), k2x, k2v);
    rhs(t + 3 * h / 10, x + h * (3 * k1x / 40 + 9 * k2x / 40),
        v + h * (3 * k1v / 40 + 9 * k2v / 40), k3x, k3v);
    rhs(t + 4 * h / 5, x + h * (44 * k1x / 45 - 56 * k2x / 15 + 32 * k3x / 9),
        v + h * (44 * k1v / 45 - 56 * k2v / 15 + 32 * k3v / 9), k4x, k4v);
    rhs(t + 8 * h / 9,
        x + h * (19372 * k1x / 6561 - 25360 * k2x / 2187 + 64448 * k3x / 6561 -
                 212 * k4x / 729),
        v + h * (19372 * k1v / 6561 - 25360 * k2v / 2187 + 64448 * k3v / 6561 -
                 212 * k4v / 729),
        k5x, k5v);
    rhs(t + h,
        x + h * (9017 * k1x / 3168 - 355 * k2x / 33 + 46732 * k3x / 5247 + 49 * k4x / 176 -
                 5103 * k5x / 18656),
        v + h * (9017 * k1v / 3168 - 355 * k2v / 33 + 46732 * k3v / 5247 + 49 * k4v / 176 -
                 5103 * k5v / 18656),
        k6x, k6v);
    Real x5 = x + h * (35 * k1x / 384 + 500 * k3x / 1113 + 125 * k4x / 192 -
                       2187 * k5x / 6784 + 11 * k6x / 84);
    Real v5 = v + h * (35 * k1v / 384 + 500 * k3v / 1113 + 125 * k4v / 192 -
                       2187 * k5v / 6784 + 11 * k6v / 84);
    rhs(t + h, x5, v5, k7x, k7v);
    Real x4 = x + h * (5179 * k1x / 57600 + 7571 * k3x / 16695 + 393 * k4x / 640 -
                       92097 * k5x / 339200 + 187 * k6x / 2100 + k7x / 40);
    Real v4 = v + h * (5179 * k1v / 57600 + 7571 * k3v / 16695 + 393 * k4v / 640 -
                       92097 * k5v / 339200 + 187 * k6v / 2100 + k7v / 40);

    Real sx = tol + tol * std::max(std::abs(x), std::abs(x5));
    Real sv = tol + tol * std::max(std::abs(v), std::abs(v5));
    Real ex = (x5 - x4) / sx;
    Real ev = (v5 - v4) / sv;
    Real err = std::sqrt(0.5 * (ex * ex + ev * ev));

    if (err <= 1.0) {
      // Interior extrema of the Hermite cubic in power form
      // a0 + a1 th + a2 th^2 + a3 th^3: the derivative is a quadratic, so
      // the in-step peak is located exactly instead of sampled.
      Real a0 = x;
      Real a1 = h * v;
      Real a2 = -3 * x - 2 * h * v + 3 * x5 - h * v5;
      Real a3 = 2 * x + h * v - 2 * x5 + h * v5;
      auto consider = [&](Real th) {
        if (th <= 0.0 || th >= 1.0) return;
        Real xi = a0 + th * (a1 + th * (a2 + th * a3));
        peak = std::max(peak, std::abs(xi));
      };
      Real scale = std::abs(a1) + std::abs(a2) + std::abs(a3);
      if (std::abs(a3) > 1e-14 * scale) {
        Real disc = 4 * a2 * a2 - 12 * a3 * a1;
        if (disc >= 0.0) {
          Real root = std::sqrt(disc);
          consider((-2 * a2 + root) / (6 * a3));
          consider((-2 * a2 - root) / (6 * a3));
        }
      } else if (std::abs(a2) > 1e-14 * scale) {
        consider(-a1 / (2 * a2));
      }
      t += h;
      x = x5;
      v = v5;
      peak = std::max(peak, std::abs(x));
    }
    Real grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(grow, 0.2, 5.0);
  }
  return peak;
}

// Crank-Nicolson on the interior of the method-of-lines system
// pi f_t = f_xx, f(0,t) = 0, f(x,0) = sin(w pi x), with the right
// boundary evolving by dF/dt = -pi e^{-t} (exactly integrable).
Real heat_max_temperature(Real t_query, Real freq, Index nodes) {
  if (nodes < 3) throw BadInput("heat: need at least 3 spatial nodes");
  const Real pi = std::numbers::pi;
  const Real dx = 1.0 / static_cast<Real>(nodes - 1);
  const Index m = nodes - 2;  // interior unknowns

  auto right_boundary = [&](Real t) { return std::sin(freq * pi) + pi * (std::exp(-t) - 1.0); };

  Vector u(m);
  Real peak = std::max(0.0, std::abs(right_boundary(0.0)));
  for (Index i = 0; i < m; ++i) {
    u(i) = std::sin(freq * pi * dx * static_cast<Real>(i + 1));
    peak = std::max(peak, std::abs(u(i)));
  }
  if (t_query <= 0.0) return peak;

  const long steps = std::max<long>(1, std::lround(std::ceil(t_query / 1e-3)));
  const Real dt = t_query / static_cast<Real>(steps);
  const Real mu = dt / (pi * dx * dx);

  // Constant tridiagonal system (1 + mu) on the diagonal, -mu/2 off it;
  // precompute the Thomas forward-elimination coefficients.
  const Real diag = 1.0 + mu;
  const Real off = -0.5 * mu;
  Vector cprime(m);
  cprime(0) = off / diag;
  for (Index i = 1; i < m; ++i) cprime(i) = off / (diag - off * cprime(i - 1));

  Vector rhs(m), work(m);
  for (long s = 0; s < steps; ++s) {
    Real t0 = dt * static_cast<Real>(s);
    Real t1 = dt * static_cast<Real>(s + 1);
    Real bdry = right_boundary(t0) + right_boundary(t1);
    for (Index i = 0; i < m; ++i) {
      Real left = (i > 0) ? u(i - 1) : 0.0;
      Real right = (i + 1 < m) ? u(i + 1) : 0.0;
      rhs(i) = u(i) + 0.5 * mu * (left - 2.0 * u(i) + right);
    }
    rhs(m - 1) += 0.5 * mu * bdry;

    work(0) = rhs(0) / diag;
    for (Index i = 1; i < m; ++i)
      work(i) = (rhs(i) - off * work(i - 1)) / (diag - off * cprime(i - 1));
    u(m - 1) = work(m - 1);
    for (Index i = m - 2; i >= 0; --i) u(i) = work(i) - cprime(i) * u(i + 1);

    peak = std::max(peak, std::abs(right_boundary(t1)));
    for (Index i = 0; i < m; ++i) peak = std::max(peak, std::abs(u(i)));
  }
  return peak;
}

// Classic RK4 on the scalar coverage equation.
Real surface_coverage(Real x, Real y, Real kappa, Real horizon) {
  const Real alpha = 0.1 + std::exp(0.05 * x);
  const Real gamma = 0.001 + 0.01 * std::exp(0.05 * y);
  auto rhs = [&](Real rho) {
    return alpha * (1.0 - rho) - gamma * rho - kappa * (1.0 - rho) * (1.0 - rho) * rho;
  };
  const long steps = std::max<long>(1, std::lround(std::ceil(horizon / 1e-3)));
  const Real dt = horizon / static_cast<Real>(steps);
  Real rho = 0.9;
  for (long s = 0; s < steps; ++s) {
    Real k1 = rhs(rho);
    Real k2 = rhs(rho + 0.5 * dt * k1);
    Real k3 = rhs(rho + 0.5 * dt * k2);
    Real k4 = rhs(rho + dt * k3);
    rho += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(rho)) throw SolverDiverged("surface reaction: state blew up");
  }
  return rho;
}

}  // namespace

Real evaluate_target(const TargetProblem& problem, const Vector& point) {
  check_point(problem, point);
  switch (problem.kind) {
    case ProblemKind::oscillator2d:
      return oscillator_max_displacement(point(0), problem.forcing, point(1), problem.damping);
    case ProblemKind::oscillator3d:
      return oscillator_max_displacement(point(0), point(1), point(2), problem.damping);
    case ProblemKind::heat:
      return heat_max_temperature(point(0), point(1), problem.heat_nodes);
    case ProblemKind::surface_reaction:
      return surface_coverage(point(0), point(1), problem.reaction_rate, problem.horizon);
  }
  throw BadInput("evaluate_target: unknown problem kind");
}

Matrix sample_domain(const TargetProblem& problem, Index n, RngState& rng, bool grid) {
  if (grid) {
    if (problem.kind != ProblemKind::oscillator3d)
      throw BadInput("sample_domain: the fixed grid is only defined for oscillator3d");
    const Index per_axis = 51;
    const Index dims = problem.dim();
    Index total = 1;
    for (Index a = 0; a < dims; ++a) total *= per_axis;
    Matrix x(total, dims);
    for (Index r = 0; r < total; ++r) {
      Index rem = r;
      for (Index a = dims - 1; a >= 0; --a) {
        auto [lo, hi] = problem.domain[a];
        auto step = static_cast<Real>(rem % per_axis);
        x(r, a) = lo + (hi - lo) * step / static_cast<Real>(per_axis - 1);
        rem /= per_axis;
      }
    }
    return x;
  }
  if (n < 1) throw BadInput("sample_domain: need at least one point");
  Matrix x(n, problem.dim());
  for (Index i = 0; i < n; ++i) {
    for (Index a = 0; a < problem.dim(); ++a) {
      if (problem.kind == ProblemKind::surface_reaction) {
        x(i, a) = problem.gaussian_sigma * rng.next_gaussian();
      } else {
        auto [lo, hi] = problem.domain[a];
        x(i, a) = lo + (hi - lo) * rng.next_double();
      }
    }
  }
  return x;
}

Matrix scale_to_unit_box(const TargetProblem& problem, const Matrix& x) {
  if (x.cols() != problem.dim())
    throw DimensionMismatch("scale_to_unit_box: " + std::to_string(x.cols()) +
                            " coordinates vs problem dimension " +
                            std::to_string(problem.dim()));
  Matrix out(x.rows(), x.cols());
  for (Index a = 0; a < x.cols(); ++a) {
    auto [lo, hi] = problem.domain[a];
    out.col(a) = (2.0 * x.col(a).array() - lo - hi) / (hi - lo);
  }
  return out;
}

}  // namespace actreg
