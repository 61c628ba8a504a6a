#pragma once

#include <functional>
#include <utility>

#include "actreg/types.hpp"

namespace actreg {

// Gauss-Legendre nodes and weights on [-1, 1]; exact for polynomials of
// degree <= 2n - 1.  Nodes by Newton iteration from the Chebyshev guess.
std::pair<Vector, Vector> gauss_legendre(Index n);

// Adaptive panel integration of f over [a, b] to absolute tolerance: a
// panel is accepted when splitting it changes the estimate by less than
// its share of abs_tol.  Throws QuadratureFailure if the recursion
// exhausts its depth budget without converging.
Real integrate(const std::function<Real(Real)>& f, Real a, Real b, Real abs_tol,
               Index panel_order = 16);

}  // namespace actreg
