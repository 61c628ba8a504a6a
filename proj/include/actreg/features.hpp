#pragma once

#include <string>
#include <vector>

#include "actreg/types.hpp"

namespace actreg {

// Total-degree polynomial basis in q variables up to degree p, monomial
// terms in graded lexicographic order: ascending total degree, and within
// a degree descending lexicographic on the exponent tuple.  For q = 2,
// p = 2 that is 1, x, y, x^2, xy, y^2.
struct PolynomialBasisSpec {
  Index input_dim = 0;
  Index degree = 0;
  std::vector<std::vector<int>> term_exponents;

  static PolynomialBasisSpec total_degree(Index input_dim, Index degree);
  Index term_count() const { return static_cast<Index>(term_exponents.size()); }

  std::string to_json() const;
  static PolynomialBasisSpec from_json(const std::string& text);
};

// One column per basis term, x given as points-by-coordinates.
Matrix expand(const Matrix& x, const PolynomialBasisSpec& spec);

// Orthonormal Legendre values L_0(t) .. L_max_degree(t) on [-1, 1], where
// L_n = sqrt(n + 1/2) P_n so that integral of L_i L_j over [-1,1] is
// delta_ij.  Throws OutOfDomain when |t| > 1 + 1e-12.
Vector legendre_normalized(Real t, Index max_degree);

// Tensor grid of Chebyshev nodes cos((2i - 1) pi / (2 m)), i = 1..m, per
// axis on [-1, 1]^dims; rows ordered with the last axis fastest.
Matrix chebyshev_grid(Index points_per_axis, Index dims);

}  // namespace actreg
