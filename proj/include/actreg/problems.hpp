#pragma once

#include <string>
#include <utility>
#include <vector>

#include "actreg/rng.hpp"
#include "actreg/types.hpp"

namespace actreg {

enum class ProblemKind { oscillator2d, oscillator3d, heat, surface_reaction };

ProblemKind problem_from_name(const std::string& name);
std::string problem_name(ProblemKind kind);

// A target QoI evaluated by a numerical solver, playing the role of the
// expensive label oracle.  Domains and the constants below follow the
// benchmark definitions; fields are mutable for what-if tests.
struct TargetProblem {
  ProblemKind kind = ProblemKind::oscillator2d;
  std::vector<std::pair<Real, Real>> domain;  // per-coordinate (lo, hi)

  // oscillator: x'' + c x' + k x = f cos(w t), x(0) = x'(0) = 0
  Real damping = 0.5;        // c
  Real forcing = 0.5;        // f; a coordinate in the 3-D variant
  // surface reaction: rho' = a(1-rho) - g rho - kappa (1-rho)^2 rho
  Real reaction_rate = 10.0;  // kappa
  Real horizon = 4.0;
  Real gaussian_sigma = 7.5;  // domain draw scale
  // heat: number of method-of-lines nodes on [0, 1]
  Index heat_nodes = 201;

  static TargetProblem make(ProblemKind kind);
  Index dim() const { return static_cast<Index>(domain.size()); }
};

// QoI at one parameter point:
//  - oscillator2d: point = (k, w); max |x(t)| over t in [0, 20]
//  - oscillator3d: point = (k, f, w); same QoI
//  - heat: point = (t, w); max temperature over space and the trajectory
//    up to t for initial data sin(w pi x)
//  - surface_reaction: point = (x, y); coverage rho at t = 4
// Throws OutOfDomain for points outside the box (surface_reaction
// accepts any reals); SolverDiverged if step control collapses.
Real evaluate_target(const TargetProblem& problem, const Vector& point);

// n coordinate rows: uniform over the box, or iid Normal(0, sigma) for
// surface_reaction.  With grid = true the 3-D oscillator instead returns
// the full 51-per-axis tensor grid (n ignored).
Matrix sample_domain(const TargetProblem& problem, Index n, RngState& rng,
                     bool grid = false);

// Affine map of raw domain coordinates onto [-1, 1] per axis, the
// convention used before polynomial expansion (surface_reaction scales by
// its box even though Gaussian draws may exceed it).
Matrix scale_to_unit_box(const TargetProblem& problem, const Matrix& x);

}  // namespace actreg
