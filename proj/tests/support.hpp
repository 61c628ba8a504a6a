#pragma once

// Shared test helpers: unique temp paths, random fixtures, tree traversal.

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "actreg/leverage.hpp"
#include "actreg/rng.hpp"
#include "actreg/tree.hpp"
#include "actreg/types.hpp"

namespace testsup {

inline std::string temp_path(const std::string& stem) {
  static const long long run_tag =
      std::chrono::steady_clock::now().time_since_epoch().count() % 1000000007LL;
  static int counter = 0;
  auto dir = std::filesystem::temp_directory_path() / "actreg-tests";
  std::filesystem::create_directories(dir);
  return (dir / (stem + "-" + std::to_string(run_tag) + "-" + std::to_string(counter++)))
      .string();
}

inline actreg::Matrix random_matrix(actreg::Index rows, actreg::Index cols,
                                    actreg::RngState& rng) {
  actreg::Matrix m(rows, cols);
  for (actreg::Index i = 0; i < rows; ++i)
    for (actreg::Index j = 0; j < cols; ++j) m(i, j) = rng.next_gaussian();
  return m;
}

inline actreg::Vector random_vector(actreg::Index n, actreg::RngState& rng) {
  actreg::Vector v(n);
  for (actreg::Index i = 0; i < n; ++i) v(i) = rng.next_gaussian();
  return v;
}

// Valid inclusion probabilities with integer mass k: positive noise scaled
// to sum k, then passed through the ceiling.
inline actreg::InclusionProbabilities random_probs(actreg::Index n, actreg::Index k,
                                                   actreg::RngState& rng) {
  actreg::Vector u(n);
  for (actreg::Index i = 0; i < n; ++i) u(i) = 0.05 + rng.next_double();
  u *= static_cast<actreg::Real>(k) / u.sum();
  return actreg::probability_ceiling(u, k);
}

// Leaf rows in left-to-right tree order.
inline std::vector<std::int32_t> leaf_order(const actreg::CompetitionTree& tree) {
  std::vector<std::int32_t> out;
  if (tree.leaves.empty()) return out;
  std::vector<std::int32_t> stack{tree.root};
  while (!stack.empty()) {
    std::int32_t ref = stack.back();
    stack.pop_back();
    if (tree.is_leaf(ref)) {
      out.push_back(tree.leaf_row(ref));
    } else {
      stack.push_back(tree.nodes[ref].right);
      stack.push_back(tree.nodes[ref].left);
    }
  }
  return out;
}

}  // namespace testsup
