#include "actreg/continuum.hpp"

#include <algorithm>
#include <cmath>

#include "actreg/errors.hpp"
#include "actreg/features.hpp"
#include "actreg/quadrature.hpp"

namespace actreg {

namespace {

void validate(const LeverageDensity& density) {
  if (density.degree < 0) throw BadInput("leverage density: degree must be >= 0");
  if (!(density.lo < density.hi))
    throw BadInput("leverage density: need lo < hi, got [" + std::to_string(density.lo) +
                   ", " + std::to_string(density.hi) + "]");
}

constexpr Index kCdfGridPoints = 512;

}  // namespace

Real tau(const LeverageDensity& density, Real t) {
  validate(density);
  return legendre_normalized(density.to_canonical(t), density.degree).squaredNorm();
}

Real density_pdf(const LeverageDensity& density, Real t) {
  // d(canonical)/dt = 2 / (hi - lo) converts the canonical pdf.
  return tau(density, t) / static_cast<Real>(density.degree + 1) * 2.0 /
         (density.hi - density.lo);
}

Real tau_mass(const LeverageDensity& density, Real a, Real b) {
  validate(density);
  auto f = [&](Real t) { return tau(density, t); };
  // Panel order > degree + 1/2 makes Gauss panels exact for tau.
  return integrate(f, a, b, 1e-10, std::max<Index>(16, density.degree + 4));
}

Vector build_partition(const LeverageDensity& density, Index k) {
  validate(density);
  if (k < 1) throw BadInput("build_partition: need at least one cell");
  const Real total = tau_mass(density, density.lo, density.hi);
  const Real target = total / static_cast<Real>(k);

  Vector bounds(k + 1);
  bounds(0) = density.lo;
  for (Index i = 1; i < k; ++i) {
    Real prev = bounds(i - 1);
    Real lo = prev, hi = density.hi;
    // Bisection on the cell mass accumulated from the previous boundary.
    for (int it = 0; it < 200; ++it) {
      Real mid = 0.5 * (lo + hi);
      Real mass = tau_mass(density, prev, mid);
      if (std::abs(mass - target) <= 1e-12) {
        lo = hi = mid;
        break;
      }
      (mass < target ? lo : hi) = mid;
      if (hi - lo <= 1e-16 * (density.hi - density.lo)) break;
    }
    bounds(i) = 0.5 * (lo + hi);
  }
  bounds(k) = density.hi;
  return bounds;
}

ContinuumSampler::ContinuumSampler(const LeverageDensity& density, const Vector& boundaries) {
  validate(density);
  if (boundaries.size() < 2) throw BadInput("continuum sampler: need at least one cell");
  for (Index i = 0; i + 1 < boundaries.size(); ++i)
    if (!(boundaries(i) < boundaries(i + 1)))
      throw BadInput("continuum sampler: boundaries must be strictly increasing");
  const Index cells = boundaries.size() - 1;
  grids_.resize(cells);
  cdfs_.resize(cells);
  for (Index c = 0; c < cells; ++c) {
    Real a = boundaries(c);
    Real b = boundaries(c + 1);
    Vector grid(kCdfGridPoints), cdf(kCdfGridPoints);
    Real prev_tau = tau(density, a);
    grid(0) = a;
    cdf(0) = 0.0;
    for (Index j = 1; j < kCdfGridPoints; ++j) {
      grid(j) = a + (b - a) * static_cast<Real>(j) / static_cast<Real>(kCdfGridPoints - 1);
      Real cur_tau = tau(density, grid(j));
      // Trapezoid accumulation; tau >= 1/2 keeps this strictly increasing.
      cdf(j) = cdf(j - 1) + 0.5 * (prev_tau + cur_tau) * (grid(j) - grid(j - 1));
      prev_tau = cur_tau;
    }
    cdf /= cdf(kCdfGridPoints - 1);
    grids_[c] = std::move(grid);
    cdfs_[c] = std::move(cdf);
  }
}

Vector ContinuumSampler::sample(RngState& rng) const {
  Vector points(cells());
  for (Index c = 0; c < cells(); ++c) {
    const Vector& grid = grids_[c];
    const Vector& cdf = cdfs_[c];
    Real u = rng.next_double_open();
    const Real* begin = cdf.data();
    const Real* end = begin + cdf.size();
    auto hi = std::upper_bound(begin, end, u);
    Index j = std::min<Index>(std::max<Index>(hi - begin, 1), cdf.size() - 1);
    Real seg = cdf(j) - cdf(j - 1);
    Real frac = seg > 0.0 ? (u - cdf(j - 1)) / seg : 0.5;
    Real t = grid(j - 1) + frac * (grid(j) - grid(j - 1));
    Real a = grid(0), b = grid(grid.size() - 1);
    if (t <= a) t = std::nextafter(a, b);
    if (t >= b) t = std::nextafter(b, a);
    points(c) = t;
  }
  return points;
}

Vector sample_continuum(const LeverageDensity& density, const Vector& boundaries,
                        RngState& rng) {
  return ContinuumSampler(density, boundaries).sample(rng);
}

Real embedding_error(const LeverageDensity& density, const Vector& points,
                     const Vector& coeffs) {
  validate(density);
  if (coeffs.size() != density.degree + 1)
    throw DimensionMismatch("embedding_error: " + std::to_string(coeffs.size()) +
                            " coefficients for degree " + std::to_string(density.degree));
  Real truth = coeffs.squaredNorm();
  if (truth == 0.0) throw ZeroPolynomial("embedding_error: zero polynomial");
  if (points.size() < 1) throw BadInput("embedding_error: no sample points");

  const Real k = static_cast<Real>(points.size());
  KahanSum acc;
  for (Index i = 0; i < points.size(); ++i) {
    Vector basis = legendre_normalized(density.to_canonical(points(i)), density.degree);
    Real p = basis.dot(coeffs);
    Real w = basis.squaredNorm() / static_cast<Real>(density.degree + 1);
    acc.add(p * p / w);
  }
  Real estimate = acc.value() / k;
  return std::abs(truth - estimate) / truth;
}

}  // namespace actreg
