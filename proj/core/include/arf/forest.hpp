#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "arf/rng.hpp"
#include "arf/tabular.hpp"

namespace arf {

// Class codes for the real-vs-synthetic discriminator.
inline constexpr std::uint8_t kClassReal = 0;
inline constexpr std::uint8_t kClassSynthetic = 1;

struct ForestConfig {
  std::size_t n_trees = 30;
  std::size_t mtry = 0;           // 0: ceil(sqrt(p))
  std::size_t min_node_size = 5;  // counted on the node's training rows
  std::size_t max_depth = 0;      // 0: unlimited
  std::uint64_t seed = 0;

  bool operator==(const ForestConfig&) const = default;
};

// Throws Error on invalid settings. n_features must be >= 1.
void validate_config(const ForestConfig& config, std::size_t n_features);
std::size_t resolve_mtry(std::size_t mtry, std::size_t n_features);

enum class SplitKind : std::uint8_t { continuous, categorical };

struct Split {
  std::uint32_t feature = 0;
  SplitKind kind = SplitKind::continuous;
  double threshold = 0.0;              // continuous: value < threshold routes left
  std::vector<std::int32_t> left_set;  // categorical: sorted codes routed left

  bool operator==(const Split&) const = default;
};

struct TreeNode {
  std::int32_t left = -1;  // children; -1 marks a leaf
  std::int32_t right = -1;
  Split split;  // internal nodes only

  // Leaf payload. real_rows holds the ids (into the real dataset) of every
  // real row routed here, regardless of bootstrap inclusion; it is dropped on
  // serialization while n_real survives. inbag_* are the bootstrap class
  // counts used for prediction.
  std::uint64_t n_real = 0;
  std::uint32_t inbag_real = 0;
  std::uint32_t inbag_synth = 0;
  std::vector<std::uint32_t> real_rows;

  bool is_leaf() const { return left < 0; }
  bool operator==(const TreeNode&) const = default;
};

// Nodes in preorder; node id = index, root = 0.
struct Tree {
  std::vector<TreeNode> nodes;
  bool operator==(const Tree&) const = default;
};

struct Forest {
  std::vector<Tree> trees;
  // Per tree, per training row: 1 = row was out of the tree's bootstrap.
  // References the combined training table; not serialized.
  std::vector<std::vector<std::uint8_t>> oob;
  ForestConfig config;
};

// 1 - sum of squared class proportions, in [0, 0.5] for two classes.
// Throws when both counts are zero.
double gini_impurity(std::uint64_t count0, std::uint64_t count1);

struct SplitCandidate {
  Split split;
  double decrease = 0.0;
};

// Best admissible split over the candidate features, by Gini decrease.
// `rows` is the node's training multiset (ids repeat per bootstrap
// multiplicity); `labels` is indexed by row id. Returns nullopt when no split
// has strictly positive decrease with both children >= min_node_size.
// Ties break toward the lowest feature index, then the lowest threshold or
// lexicographically smallest left set.
std::optional<SplitCandidate> best_split(const Dataset& data,
                                         std::span<const std::uint8_t> labels,
                                         std::span<const std::uint32_t> rows,
                                         std::span<const std::uint32_t> features,
                                         std::size_t min_node_size);

// Grows one CART tree on the bootstrap multiset, then routes rows
// [0, n_real) of `data` down the finished tree to record leaf membership.
// The combined table must hold the real rows first.
Tree grow_tree(const Dataset& data, std::span<const std::uint8_t> labels,
               std::span<const std::uint32_t> bootstrap, std::size_t n_real,
               const ForestConfig& config, Rng& rng);

// Bagged forest: each tree draws its own bootstrap of all rows with
// replacement from a stream derived as hash(seed, tree index), so results do
// not depend on thread scheduling. Labels must be balanced and the real rows
// must occupy [0, n_real).
Forest fit_forest(const Dataset& data, std::span<const std::uint8_t> labels,
                  std::size_t n_real, const ForestConfig& config,
                  std::size_t n_threads = 1);

// Majority vote of each row's out-of-bag trees; vote ties predict synthetic.
// Rows with no out-of-bag tree leave the denominator; throws if that leaves
// nothing to score.
double oob_accuracy(const Forest& forest, const Dataset& data,
                    std::span<const std::uint8_t> labels);

// Deterministic routing: continuous `value < threshold` goes left,
// categorical membership in left_set goes left, anything else right.
std::int32_t assign_leaf(const Tree& tree, const Dataset& data, std::size_t row);

std::uint8_t predict_tree(const Tree& tree, const Dataset& data, std::size_t row);

// Per-feature constraints accumulated along the root-to-leaf path.
struct FeatureBounds {
  double lower = -std::numeric_limits<double>::infinity();  // continuous
  double upper = std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> allowed;  // categorical: one flag per level code

  bool operator==(const FeatureBounds&) const = default;
};

struct LeafBounds {
  std::vector<FeatureBounds> features;
  bool operator==(const LeafBounds&) const = default;
};

// Throws if nodeid is not a leaf of the tree.
LeafBounds leaf_bounds(const Tree& tree, std::int32_t nodeid, const Schema& schema);

// Bounds for every leaf, as (nodeid, bounds) in ascending nodeid order.
std::vector<std::pair<std::int32_t, LeafBounds>> all_leaf_bounds(const Tree& tree,
                                                                 const Schema& schema);

}  // namespace arf
