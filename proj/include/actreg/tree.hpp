#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "actreg/leverage.hpp"
#include "actreg/rng.hpp"
#include "actreg/types.hpp"

namespace actreg {

enum class SplitMethod { pca, coordinate };

// Full binary tree over the rows with fractional inclusion probability
// (p < 1); rows with p = 1 never compete and are not in the tree.
//
// Child references: ref >= 0 is an index into nodes, ref < 0 is a leaf,
// stored at leaves[-ref - 1].
struct CompetitionTree {
  struct Node {
    std::int32_t left;
    std::int32_t right;
  };
  std::vector<Node> nodes;           // pre-order; empty for a single-leaf tree
  std::vector<std::int32_t> leaves;  // row indices
  std::int32_t root = -1;

  bool is_leaf(std::int32_t ref) const { return ref < 0; }
  std::int32_t leaf_row(std::int32_t ref) const { return leaves[-ref - 1]; }

  Index leaf_count() const { return static_cast<Index>(leaves.size()); }
  // Levels from root to deepest leaf (single leaf -> 0).
  Index depth() const;
  std::vector<std::int32_t> sorted_rows() const;
};

// Builds the tree of Algorithm-style recursive median splits over the
// rows of x with probs[i] < 1.  At each node the rows are ordered along a
// direction (top principal direction of the node's centered sub-cloud for
// pca; cycling coordinates, root depth 0 -> column 0, for coordinate) and
// the first floor(m/2) go left.  Deterministic: directions are oriented
// so their first nonzero component is positive, projection ties fall back
// to ascending row index, and a degenerate principal direction (top two
// eigenvalues within 1e-12 relative) falls back to the lowest-index
// maximum-variance coordinate axis.
CompetitionTree build_tree(const Matrix& x, const InclusionProbabilities& probs,
                           SplitMethod method);

// Random tree shape over the same leaf set; used by verification sweeps.
CompetitionTree random_tree(const InclusionProbabilities& probs, RngState& rng);

// JSON round-trip.  Layout: {"schema_version":1,"root":<node>} where a
// node is either an integer row index or {"left":<node>,"right":<node>}.
// Serialization is byte-identical across runs for the same tree.
std::string tree_to_json(const CompetitionTree& tree);
CompetitionTree tree_from_json(const std::string& text);

}  // namespace actreg
