#include "actreg/tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <json.hpp>

#include "actreg/errors.hpp"

namespace actreg {

namespace {

using json = nlohmann::json;

// Lowest-index coordinate axis of maximal variance (1e-12 relative tie).
Index fallback_axis(const Vector& variances) {
  Real best = variances.maxCoeff();
  for (Index j = 0; j < variances.size(); ++j)
    if (variances(j) >= best * (1.0 - 1e-12)) return j;
  return 0;
}

void orient(Vector& dir) {
  for (Index i = 0; i < dir.size(); ++i) {
    if (std::abs(dir(i)) > 1e-12) {
      if (dir(i) < 0.0) dir = -dir;
      return;
    }
  }
}

// Top principal direction of cov, or a coordinate axis when the top of
// the spectrum is degenerate and the direction would be arbitrary.
Vector principal_direction(const Matrix& cov) {
  const Index d = cov.rows();
  if (d == 1) return Vector::Ones(1);
  if (d <= 3) {
    Eigen::SelfAdjointEigenSolver<Matrix> es;
    es.computeDirect(cov);
    Real top = es.eigenvalues()(d - 1);
    Real second = es.eigenvalues()(d - 2);
    Real scale = std::max(std::abs(top), 1e-300);
    if (top - second <= 1e-12 * scale) {
      Vector axis = Vector::Zero(d);
      axis(fallback_axis(cov.diagonal())) = 1.0;
      return axis;
    }
    Vector dir = es.eigenvectors().col(d - 1);
    orient(dir);
    return dir;
  }
  // Power iteration; cov is positive semidefinite so the Rayleigh
  // quotient increases monotonically.  A stall means a (near-)tied top
  // eigenvalue, handled like the small-dimension tie.
  Vector v(d);
  for (Index i = 0; i < d; ++i) v(i) = (i % 2 == 0) ? 1.0 : -1.0;
  v.normalize();
  Real prev = -1.0;
  for (int it = 0; it < 1000; ++it) {
    Vector w = cov * v;
    Real norm = w.norm();
    if (norm <= 1e-300) break;  // zero covariance
    v = w / norm;
    Real rq = v.dot(cov * v);
    if (std::abs(rq - prev) <= 1e-10 * std::max(rq, 1e-300)) {
      orient(v);
      return v;
    }
    prev = rq;
  }
  Vector axis = Vector::Zero(d);
  axis(fallback_axis(cov.diagonal())) = 1.0;
  return axis;
}

struct Builder {
  const Matrix& x;
  SplitMethod method;
  std::vector<std::int32_t> idx;
  CompetitionTree tree;

  std::int32_t add_leaf(std::int32_t row) {
    tree.leaves.push_back(row);
    return -static_cast<std::int32_t>(tree.leaves.size());
  }

  Vector split_direction(std::size_t lo, std::size_t hi, Index depth) const {
    const Index d = x.cols();
    if (method == SplitMethod::coordinate) {
      Vector axis = Vector::Zero(d);
      axis(static_cast<Index>(depth % d)) = 1.0;
      return axis;
    }
    const auto m = static_cast<Index>(hi - lo);
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(d);
    for (std::size_t t = lo; t < hi; ++t) mean += x.row(idx[t]);
    mean /= static_cast<Real>(m);
    Matrix cov = Matrix::Zero(d, d);
    for (std::size_t t = lo; t < hi; ++t) {
      Eigen::RowVectorXd c = x.row(idx[t]) - mean;
      cov.noalias() += c.transpose() * c;
    }
    cov /= static_cast<Real>(m);
    return principal_direction(cov);
  }

  std::int32_t build(std::size_t lo, std::size_t hi, Index depth) {
    if (hi - lo == 1) return add_leaf(idx[lo]);
    Vector dir = split_direction(lo, hi, depth);
    std::sort(idx.begin() + lo, idx.begin() + hi, [&](std::int32_t a, std::int32_t b) {
      Real pa = x.row(a).dot(dir);
      Real pb = x.row(b).dot(dir);
      if (pa != pb) return pa < pb;
      return a < b;
    });
    std::size_t mid = lo + (hi - lo) / 2;
    auto node_id = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.push_back({0, 0});
    std::int32_t left = build(lo, mid, depth + 1);
    std::int32_t right = build(mid, hi, depth + 1);
    tree.nodes[node_id] = {left, right};
    return node_id;
  }
};

std::vector<std::int32_t> fractional_rows(const InclusionProbabilities& probs) {
  std::vector<std::int32_t> rows;
  for (Index i = 0; i < probs.probs.size(); ++i)
    if (probs.probs(i) < 1.0) rows.push_back(static_cast<std::int32_t>(i));
  if (rows.empty())
    throw EmptyTree("build_tree: every inclusion probability is 1, nothing to pair");
  return rows;
}

}  // namespace

Index CompetitionTree::depth() const {
  if (root < 0) return 0;
  Index best = 0;
  std::function<void(std::int32_t, Index)> walk = [&](std::int32_t ref, Index d) {
    if (is_leaf(ref)) {
      best = std::max(best, d);
      return;
    }
    walk(nodes[ref].left, d + 1);
    walk(nodes[ref].right, d + 1);
  };
  walk(root, 0);
  return best;
}

std::vector<std::int32_t> CompetitionTree::sorted_rows() const {
  std::vector<std::int32_t> rows = leaves;
  std::sort(rows.begin(), rows.end());
  return rows;
}

CompetitionTree build_tree(const Matrix& x, const InclusionProbabilities& probs,
                           SplitMethod method) {
  if (x.rows() != probs.probs.size())
    throw DimensionMismatch("build_tree: " + std::to_string(x.rows()) + " points vs " +
                            std::to_string(probs.probs.size()) + " probabilities");
  if (x.cols() < 1) throw DimensionMismatch("build_tree: points have no coordinates");
  Builder b{x, method, fractional_rows(probs), {}};
  b.tree.root = b.build(0, b.idx.size(), 0);
  return b.tree;
}

CompetitionTree random_tree(const InclusionProbabilities& probs, RngState& rng) {
  std::vector<std::int32_t> rows = fractional_rows(probs);
  // Fisher-Yates order, then uniformly random split sizes.
  for (std::size_t i = rows.size(); i > 1; --i) {
    auto j = static_cast<std::size_t>(rng.next_u64() % i);
    std::swap(rows[i - 1], rows[j]);
  }
  CompetitionTree tree;
  std::function<std::int32_t(std::size_t, std::size_t)> build = [&](std::size_t lo,
                                                                    std::size_t hi) {
    if (hi - lo == 1) {
      tree.leaves.push_back(rows[lo]);
      return -static_cast<std::int32_t>(tree.leaves.size());
    }
    std::size_t span = hi - lo;
    std::size_t cut = lo + 1 + static_cast<std::size_t>(rng.next_u64() % (span - 1));
    auto node_id = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.push_back({0, 0});
    std::int32_t left = build(lo, cut);
    std::int32_t right = build(cut, hi);
    tree.nodes[node_id] = {left, right};
    return node_id;
  };
  tree.root = build(0, rows.size());
  return tree;
}

namespace {

json node_to_json(const CompetitionTree& tree, std::int32_t ref) {
  if (tree.is_leaf(ref)) return tree.leaf_row(ref);
  return json{{"left", node_to_json(tree, tree.nodes[ref].left)},
              {"right", node_to_json(tree, tree.nodes[ref].right)}};
}

std::int32_t node_from_json(const json& j, CompetitionTree& tree) {
  if (j.is_number_integer()) {
    auto row = j.get<std::int64_t>();
    if (row < 0) throw BadInput("tree_from_json: negative leaf row " + std::to_string(row));
    tree.leaves.push_back(static_cast<std::int32_t>(row));
    return -static_cast<std::int32_t>(tree.leaves.size());
  }
  if (!j.is_object() || j.size() != 2 || !j.contains("left") || !j.contains("right"))
    throw BadInput("tree_from_json: node must be an integer or {left,right} object");
  auto node_id = static_cast<std::int32_t>(tree.nodes.size());
  tree.nodes.push_back({0, 0});
  std::int32_t left = node_from_json(j.at("left"), tree);
  std::int32_t right = node_from_json(j.at("right"), tree);
  tree.nodes[node_id] = {left, right};
  return node_id;
}

}  // namespace

std::string tree_to_json(const CompetitionTree& tree) {
  if (tree.leaves.empty()) throw EmptyTree("tree_to_json: tree has no leaves");
  json j{{"schema_version", 1}, {"root", node_to_json(tree, tree.root)}};
  return j.dump();
}

CompetitionTree tree_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw BadInput(std::string("tree_from_json: ") + e.what());
  }
  const json* root = &j;
  if (j.is_object() && j.contains("root")) {
    if (j.value("schema_version", 0) != 1)
      throw BadInput("tree_from_json: unsupported schema_version");
    root = &j.at("root");
  }
  CompetitionTree tree;
  tree.root = node_from_json(*root, tree);
  std::vector<std::int32_t> rows = tree.sorted_rows();
  if (std::adjacent_find(rows.begin(), rows.end()) != rows.end())
    throw BadInput("tree_from_json: duplicate leaf row");
  return tree;
}

}  // namespace actreg
