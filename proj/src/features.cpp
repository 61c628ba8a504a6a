#include "actreg/features.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "actreg/errors.hpp"

namespace actreg {

namespace {

void emit_terms(Index vars_left, int degree_left, std::vector<int>& current,
                std::vector<std::vector<int>>& out) {
  if (vars_left == 1) {
    current.push_back(degree_left);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int e = degree_left; e >= 0; --e) {
    current.push_back(e);
    emit_terms(vars_left - 1, degree_left - e, current, out);
    current.pop_back();
  }
}

}  // namespace

PolynomialBasisSpec PolynomialBasisSpec::total_degree(Index input_dim, Index degree) {
  if (input_dim < 1) throw BadInput("total_degree basis: input_dim must be >= 1");
  if (degree < 0) throw BadInput("total_degree basis: degree must be >= 0");
  PolynomialBasisSpec spec;
  spec.input_dim = input_dim;
  spec.degree = degree;
  std::vector<int> current;
  for (int g = 0; g <= degree; ++g)
    emit_terms(input_dim, g, current, spec.term_exponents);
  return spec;
}

std::string PolynomialBasisSpec::to_json() const {
  nlohmann::json j{{"schema_version", 1}, {"input_dim", input_dim}, {"degree", degree}};
  return j.dump();
}

PolynomialBasisSpec PolynomialBasisSpec::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw BadInput(std::string("basis from_json: ") + e.what());
  }
  if (!j.is_object() || !j.contains("input_dim") || !j.contains("degree"))
    throw BadInput("basis from_json: need {input_dim, degree}");
  return total_degree(j.at("input_dim").get<Index>(), j.at("degree").get<Index>());
}

Matrix expand(const Matrix& x, const PolynomialBasisSpec& spec) {
  if (x.cols() != spec.input_dim)
    throw DimensionMismatch("expand: " + std::to_string(x.cols()) + " coordinates vs basis on " +
                            std::to_string(spec.input_dim));
  if (x.rows() == 0) throw DimensionMismatch("expand: no points");
  const Index n = x.rows();
  const Index q = spec.input_dim;
  const auto p = static_cast<int>(spec.degree);

  Matrix out(n, spec.term_count());
  // powers[v][e] per point; rebuilt row by row to keep memory flat.
  std::vector<std::vector<Real>> powers(q, std::vector<Real>(p + 1, 1.0));
  for (Index i = 0; i < n; ++i) {
    for (Index v = 0; v < q; ++v)
      for (int e = 1; e <= p; ++e) powers[v][e] = powers[v][e - 1] * x(i, v);
    for (Index t = 0; t < spec.term_count(); ++t) {
      Real value = 1.0;
      const auto& exps = spec.term_exponents[t];
      for (Index v = 0; v < q; ++v) value *= powers[v][exps[v]];
      out(i, t) = value;
    }
  }
  return out;
}

Vector legendre_normalized(Real t, Index max_degree) {
  if (std::abs(t) > 1.0 + 1e-12)
    throw OutOfDomain("legendre_normalized: t = " + std::to_string(t) + " outside [-1, 1]");
  if (max_degree < 0) throw BadInput("legendre_normalized: max_degree must be >= 0");
  Vector values(max_degree + 1);
  Real pm1 = 1.0;  // P_0
  values(0) = std::sqrt(0.5) * pm1;
  if (max_degree == 0) return values;
  Real pm0 = t;  // P_1
  values(1) = std::sqrt(1.5) * pm0;
  for (Index m = 2; m <= max_degree; ++m) {
    auto n = static_cast<Real>(m - 1);
    Real pnext = ((2.0 * n + 1.0) * t * pm0 - n * pm1) / (n + 1.0);
    pm1 = pm0;
    pm0 = pnext;
    values(m) = std::sqrt(static_cast<Real>(m) + 0.5) * pm0;
  }
  return values;
}

Matrix chebyshev_grid(Index points_per_axis, Index dims) {
  if (points_per_axis < 1) throw BadInput("chebyshev_grid: need at least one point per axis");
  if (dims < 1) throw BadInput("chebyshev_grid: need at least one axis");
  Vector nodes(points_per_axis);
  for (Index i = 0; i < points_per_axis; ++i)
    nodes(i) = std::cos((2.0 * static_cast<Real>(i) + 1.0) * std::numbers::pi /
                        (2.0 * static_cast<Real>(points_per_axis)));
  Index total = 1;
  for (Index a = 0; a < dims; ++a) {
    if (total > (Index{1} << 40) / points_per_axis)
      throw TooLarge("chebyshev_grid: grid would overflow");
    total *= points_per_axis;
  }
  Matrix grid(total, dims);
  for (Index r = 0; r < total; ++r) {
    Index rem = r;
    for (Index a = dims - 1; a >= 0; --a) {
      grid(r, a) = nodes(rem % points_per_axis);
      rem /= points_per_axis;
    }
  }
  return grid;
}

}  // namespace actreg
