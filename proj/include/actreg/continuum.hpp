#pragma once

#include <vector>

#include "actreg/rng.hpp"
#include "actreg/types.hpp"

namespace actreg {

// Leverage function of the degree-d polynomial family on an interval,
// tau(t) = sum_{i=0}^{d} L_i(t)^2 in the orthonormal Legendre basis of the
// canonical interval [-1, 1].  General [lo, hi] is handled by an affine
// pullback; tau values are always the canonical ones, so the total mass
// integral of tau over the domain is (d + 1) * (hi - lo) / 2.
struct LeverageDensity {
  Index degree = 0;
  Real lo = -1.0;
  Real hi = 1.0;

  Real to_canonical(Real t) const { return (2.0 * t - lo - hi) / (hi - lo); }
  Real from_canonical(Real s) const { return 0.5 * ((hi - lo) * s + lo + hi); }
};

// tau at a domain point; throws OutOfDomain beyond the interval (with a
// 1e-12 tolerance in canonical coordinates).
Real tau(const LeverageDensity& density, Real t);

// Normalized sampling density w = tau / (d + 1) mapped to the domain;
// integrates to 1 over [lo, hi].
Real density_pdf(const LeverageDensity& density, Real t);

// Integral of tau between two domain points by adaptive quadrature
// (absolute tolerance 1e-10; exact for tau up to roundoff since the
// panels integrate polynomials of this degree exactly).
Real tau_mass(const LeverageDensity& density, Real a, Real b);

// k + 1 ascending boundaries with ends exactly lo and hi, splitting the
// tau mass into k equal parts; interior boundaries found by bisection on
// the cumulative mass to 1e-12.
Vector build_partition(const LeverageDensity& density, Index k);

// Per-cell inverse-CDF tables: the CDF of tau restricted to each cell is
// tabulated on a 512-point grid and inverted by linear interpolation.
class ContinuumSampler {
 public:
  ContinuumSampler(const LeverageDensity& density, const Vector& boundaries);

  // One point strictly inside each cell, ascending.
  Vector sample(RngState& rng) const;
  Index cells() const { return static_cast<Index>(grids_.size()); }

 private:
  std::vector<Vector> grids_;  // node positions per cell
  std::vector<Vector> cdfs_;   // matching normalized CDF values
};

// Convenience wrapper: build the tables and draw once.
Vector sample_continuum(const LeverageDensity& density, const Vector& boundaries,
                        RngState& rng);

// Relative error of the weighted sample estimate of the polynomial's
// squared norm: |∫p² − (1/k)Σ p(t_i)²/w(t_i)| / ∫p², with p given by
// coefficients in the orthonormal Legendre basis (so ∫p² = ||c||² in
// canonical coordinates).  Throws ZeroPolynomial on zero coefficients,
// DimensionMismatch unless len(coeffs) = degree + 1.
Real embedding_error(const LeverageDensity& density, const Vector& points,
                     const Vector& coeffs);

}  // namespace actreg
