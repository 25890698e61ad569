#include "arf/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "arf/error.hpp"
#include "parallel.hpp"

namespace arf {

void validate_config(const ForestConfig& config, std::size_t n_features) {
  if (n_features == 0) throw Error("forest: dataset has no features");
  if (config.n_trees == 0) throw Error("forest: n_trees must be >= 1");
  if (config.min_node_size < 2) throw Error("forest: min_node_size must be >= 2");
  if (config.mtry > n_features)
    throw Error("forest: mtry exceeds the number of features");
}

std::size_t resolve_mtry(std::size_t mtry, std::size_t n_features) {
  if (mtry != 0) return mtry;
  const auto root = static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(n_features))));
  return std::clamp<std::size_t>(root, 1, n_features);
}

double gini_impurity(std::uint64_t count0, std::uint64_t count1) {
  if (count0 + count1 == 0) throw Error("gini_impurity: empty node");
  const double n = static_cast<double>(count0 + count1);
  const double p0 = static_cast<double>(count0) / n;
  const double p1 = static_cast<double>(count1) / n;
  return 1.0 - (p0 * p0 + p1 * p1);
}

namespace {

constexpr std::size_t kExhaustiveCategoryLimit = 10;

bool left_set_less(const std::vector<std::int32_t>& a, const std::vector<std::int32_t>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// decrease desc, then feature asc, then threshold asc / left_set lex asc.
bool candidate_better(const SplitCandidate& cand, const SplitCandidate& best) {
  if (cand.decrease != best.decrease) return cand.decrease > best.decrease;
  if (cand.split.feature != best.split.feature) return cand.split.feature < best.split.feature;
  if (cand.split.kind == SplitKind::continuous)
    return cand.split.threshold < best.split.threshold;
  return left_set_less(cand.split.left_set, best.split.left_set);
}

double weighted_decrease(double parent_gini, std::uint64_t c0l, std::uint64_t c1l,
                         std::uint64_t c0r, std::uint64_t c1r) {
  const auto nl = c0l + c1l;
  const auto nr = c0r + c1r;
  const double n = static_cast<double>(nl + nr);
  return parent_gini - (static_cast<double>(nl) / n) * gini_impurity(c0l, c1l) -
         (static_cast<double>(nr) / n) * gini_impurity(c0r, c1r);
}

void consider(std::optional<SplitCandidate>& best, SplitCandidate cand) {
  if (!(cand.decrease > 0.0)) return;
  if (!best || candidate_better(cand, *best)) best = std::move(cand);
}

void scan_continuous(const Dataset& data, std::span<const std::uint8_t> labels,
                     std::span<const std::uint32_t> rows, std::uint32_t feature,
                     std::size_t min_node_size, double parent_gini,
                     std::uint64_t parent_c1, std::optional<SplitCandidate>& best) {
  const auto values = data.continuous(feature);
  std::vector<std::pair<double, std::uint8_t>> sorted;
  sorted.reserve(rows.size());
  for (std::uint32_t r : rows) sorted.emplace_back(values[r], labels[r]);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const std::uint64_t n = sorted.size();
  const std::uint64_t parent_c0 = n - parent_c1;
  std::uint64_t c0l = 0, c1l = 0;
  for (std::uint64_t i = 0; i + 1 < n; ++i) {
    if (sorted[i].second == kClassSynthetic) ++c1l; else ++c0l;
    if (sorted[i].first == sorted[i + 1].first) continue;
    const std::uint64_t nl = i + 1, nr = n - nl;
    if (nl < min_node_size || nr < min_node_size) continue;
    const double threshold = std::midpoint(sorted[i].first, sorted[i + 1].first);
    if (!(threshold > sorted[i].first)) continue;  // adjacent representable values
    const double decrease =
        weighted_decrease(parent_gini, c0l, c1l, parent_c0 - c0l, parent_c1 - c1l);
    consider(best, {Split{feature, SplitKind::continuous, threshold, {}}, decrease});
  }
}

void scan_categorical(const Dataset& data, std::span<const std::uint8_t> labels,
                      std::span<const std::uint32_t> rows, std::uint32_t feature,
                      std::size_t n_levels, std::size_t min_node_size, double parent_gini,
                      std::optional<SplitCandidate>& best) {
  std::vector<std::uint64_t> c0(n_levels, 0), c1(n_levels, 0);
  const auto codes = data.codes(feature);
  for (std::uint32_t r : rows) {
    if (labels[r] == kClassSynthetic) ++c1[codes[r]]; else ++c0[codes[r]];
  }
  std::vector<std::int32_t> observed;
  for (std::size_t c = 0; c < n_levels; ++c)
    if (c0[c] + c1[c] > 0) observed.push_back(static_cast<std::int32_t>(c));
  const std::size_t k = observed.size();
  if (k < 2) return;

  auto evaluate = [&](std::vector<std::int32_t> left_set) {
    std::uint64_t c0l = 0, c1l = 0, c0r = 0, c1r = 0;
    for (std::int32_t c : observed) {
      const bool in_left = std::binary_search(left_set.begin(), left_set.end(), c);
      (in_left ? c0l : c0r) += c0[c];
      (in_left ? c1l : c1r) += c1[c];
    }
    const std::uint64_t nl = c0l + c1l, nr = c0r + c1r;
    if (nl < min_node_size || nr < min_node_size) return;
    const double decrease = weighted_decrease(parent_gini, c0l, c1l, c0r, c1r);
    consider(best,
             {Split{feature, SplitKind::categorical, 0.0, std::move(left_set)}, decrease});
  };

  if (k <= kExhaustiveCategoryLimit) {
    // Every partition exactly once: the left set always carries the smallest
    // observed code, the remaining k-1 codes toggle. The full set is skipped
    // (left sets must be proper subsets).
    const std::uint32_t combos = (1u << (k - 1)) - 1;
    for (std::uint32_t mask = 0; mask < combos; ++mask) {
      std::vector<std::int32_t> left_set{observed[0]};
      for (std::size_t j = 0; j + 1 < k; ++j)
        if (mask & (1u << j)) left_set.push_back(observed[j + 1]);
      evaluate(std::move(left_set));
    }
  } else {
    // Two-class reduction: order categories by synthetic-class proportion and
    // scan prefixes as a 1-D threshold problem.
    std::vector<std::int32_t> ordered = observed;
    std::sort(ordered.begin(), ordered.end(), [&](std::int32_t x, std::int32_t y) {
      const double px = static_cast<double>(c1[x]) / static_cast<double>(c0[x] + c1[x]);
      const double py = static_cast<double>(c1[y]) / static_cast<double>(c0[y] + c1[y]);
      if (px != py) return px < py;
      return x < y;
    });
    for (std::size_t cut = 1; cut < k; ++cut) {
      std::vector<std::int32_t> left_set(ordered.begin(), ordered.begin() + cut);
      std::sort(left_set.begin(), left_set.end());
      evaluate(std::move(left_set));
    }
  }
}

}  // namespace

std::optional<SplitCandidate> best_split(const Dataset& data,
                                         std::span<const std::uint8_t> labels,
                                         std::span<const std::uint32_t> rows,
                                         std::span<const std::uint32_t> features,
                                         std::size_t min_node_size) {
  if (rows.size() < 2 || features.empty()) return std::nullopt;
  std::uint64_t c1 = 0;
  for (std::uint32_t r : rows) c1 += labels[r] == kClassSynthetic;
  const double parent_gini = gini_impurity(rows.size() - c1, c1);

  std::optional<SplitCandidate> best;
  for (std::uint32_t f : features) {
    const Column& col = data.schema().column(f);
    if (col.kind == ColumnKind::continuous) {
      scan_continuous(data, labels, rows, f, min_node_size, parent_gini, c1, best);
    } else {
      scan_categorical(data, labels, rows, f, col.levels.size(), min_node_size,
                       parent_gini, best);
    }
  }
  return best;
}

namespace {

bool routes_left(const Split& split, const Dataset& data, std::uint32_t row) {
  if (split.kind == SplitKind::continuous)
    return data.continuous(split.feature)[row] < split.threshold;
  return std::binary_search(split.left_set.begin(), split.left_set.end(),
                            data.codes(split.feature)[row]);
}

struct NodeWork {
  std::int32_t parent;
  bool is_left;
  std::uint32_t begin, end;  // segment of the shared row buffer
  std::uint32_t depth;
};

}  // namespace

Tree grow_tree(const Dataset& data, std::span<const std::uint8_t> labels,
               std::span<const std::uint32_t> bootstrap, std::size_t n_real,
               const ForestConfig& config, Rng& rng) {
  const std::size_t p = data.n_columns();
  const std::size_t mtry = resolve_mtry(config.mtry, p);

  std::vector<std::uint32_t> rows(bootstrap.begin(), bootstrap.end());
  std::vector<std::uint32_t> feature_pool(p);
  std::iota(feature_pool.begin(), feature_pool.end(), 0u);
  std::vector<std::uint32_t> candidates(mtry);

  Tree tree;
  std::vector<NodeWork> stack;
  stack.push_back({-1, false, 0, static_cast<std::uint32_t>(rows.size()), 0});

  while (!stack.empty()) {
    const NodeWork work = stack.back();
    stack.pop_back();
    const auto id = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (work.parent >= 0) {
      (work.is_left ? tree.nodes[work.parent].left : tree.nodes[work.parent].right) = id;
    }

    const std::span<const std::uint32_t> segment(rows.data() + work.begin,
                                                 work.end - work.begin);
    std::uint64_t c1 = 0;
    for (std::uint32_t r : segment) c1 += labels[r] == kClassSynthetic;
    const std::uint64_t c0 = segment.size() - c1;

    const bool pure = c0 == 0 || c1 == 0;
    const bool depth_capped = config.max_depth != 0 && work.depth >= config.max_depth;
    std::optional<SplitCandidate> split;
    if (!pure && !depth_capped && segment.size() >= 2 * config.min_node_size) {
      // mtry features without replacement (partial Fisher-Yates), evaluated
      // in index order so tie-breaking is independent of the draw order.
      for (std::size_t i = 0; i < mtry; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.next_below(p - i));
        std::swap(feature_pool[i], feature_pool[j]);
        candidates[i] = feature_pool[i];
      }
      std::sort(candidates.begin(), candidates.end());
      split = best_split(data, labels, segment, candidates, config.min_node_size);
    }

    if (!split) {
      TreeNode& leaf = tree.nodes[id];
      leaf.inbag_real = static_cast<std::uint32_t>(c0);
      leaf.inbag_synth = static_cast<std::uint32_t>(c1);
      continue;
    }

    tree.nodes[id].split = std::move(split->split);
    const Split& rule = tree.nodes[id].split;
    const auto mid = std::partition(rows.begin() + work.begin, rows.begin() + work.end,
                                    [&](std::uint32_t r) { return routes_left(rule, data, r); });
    const auto cut = static_cast<std::uint32_t>(mid - rows.begin());
    // Right pushed first so the left subtree is numbered before it (preorder).
    stack.push_back({id, false, cut, work.end, work.depth + 1});
    stack.push_back({id, true, work.begin, cut, work.depth + 1});
  }

  // Leaf membership over the full real dataset, bootstrap or not.
  for (std::uint32_t r = 0; r < n_real; ++r) {
    TreeNode& leaf = tree.nodes[assign_leaf(tree, data, r)];
    leaf.real_rows.push_back(r);
    ++leaf.n_real;
  }
  return tree;
}

Forest fit_forest(const Dataset& data, std::span<const std::uint8_t> labels,
                  std::size_t n_real, const ForestConfig& config,
                  std::size_t n_threads) {
  validate_config(config, data.n_columns());
  const std::size_t n = data.n_rows();
  if (labels.size() != n) throw Error("fit_forest: labels do not match rows");
  std::size_t real_count = 0;
  for (std::uint8_t l : labels) real_count += l == kClassReal;
  if (real_count != n_real || 2 * n_real != n)
    throw Error("fit_forest: real and synthetic classes must be balanced");

  Forest forest;
  forest.config = config;
  forest.trees.resize(config.n_trees);
  forest.oob.assign(config.n_trees, {});

  parallel_for(config.n_trees, n_threads, [&](std::size_t t) {
    Rng rng(derive_stream(config.seed, stream::kTree, t));
    std::vector<std::uint32_t> bootstrap(n);
    std::vector<std::uint8_t> oob(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      bootstrap[i] = static_cast<std::uint32_t>(rng.next_below(n));
      oob[bootstrap[i]] = 0;
    }
    forest.trees[t] = grow_tree(data, labels, bootstrap, n_real, config, rng);
    forest.oob[t] = std::move(oob);
  });
  return forest;
}

std::int32_t assign_leaf(const Tree& tree, const Dataset& data, std::size_t row) {
  std::int32_t id = 0;
  while (!tree.nodes[id].is_leaf()) {
    const TreeNode& node = tree.nodes[id];
    id = routes_left(node.split, data, static_cast<std::uint32_t>(row)) ? node.left
                                                                        : node.right;
  }
  return id;
}

std::uint8_t predict_tree(const Tree& tree, const Dataset& data, std::size_t row) {
  const TreeNode& leaf = tree.nodes[assign_leaf(tree, data, row)];
  return leaf.inbag_synth >= leaf.inbag_real ? kClassSynthetic : kClassReal;
}

double oob_accuracy(const Forest& forest, const Dataset& data,
                    std::span<const std::uint8_t> labels) {
  const std::size_t n = data.n_rows();
  if (labels.size() != n) throw Error("oob_accuracy: labels do not match rows");
  for (const auto& mask : forest.oob)
    if (mask.size() != n)
      throw Error("oob_accuracy: forest was not trained on this table");

  std::uint64_t scored = 0, correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t votes_real = 0, votes_synth = 0;
    for (std::size_t t = 0; t < forest.trees.size(); ++t) {
      if (!forest.oob[t][i]) continue;
      if (predict_tree(forest.trees[t], data, i) == kClassSynthetic)
        ++votes_synth;
      else
        ++votes_real;
    }
    if (votes_real + votes_synth == 0) continue;
    const std::uint8_t prediction =
        votes_synth >= votes_real ? kClassSynthetic : kClassReal;
    ++scored;
    correct += prediction == labels[i];
  }
  if (scored == 0) throw Error("oob_accuracy: no row has an out-of-bag tree");
  return static_cast<double>(correct) / static_cast<double>(scored);
}

namespace {

LeafBounds unconstrained_bounds(const Schema& schema) {
  LeafBounds bounds;
  bounds.features.resize(schema.n_columns());
  for (std::size_t j = 0; j < schema.n_columns(); ++j) {
    if (schema.column(j).kind == ColumnKind::categorical)
      bounds.features[j].allowed.assign(schema.column(j).levels.size(), 1);
  }
  return bounds;
}

void apply_constraint(LeafBounds& bounds, const Split& split, bool went_left) {
  FeatureBounds& fb = bounds.features[split.feature];
  if (split.kind == SplitKind::continuous) {
    if (went_left)
      fb.upper = std::min(fb.upper, split.threshold);
    else
      fb.lower = std::max(fb.lower, split.threshold);
  } else {
    for (std::size_t c = 0; c < fb.allowed.size(); ++c) {
      const bool in_left = std::binary_search(split.left_set.begin(), split.left_set.end(),
                                              static_cast<std::int32_t>(c));
      if (in_left != went_left) fb.allowed[c] = 0;
    }
  }
}

std::vector<std::int32_t> parent_links(const Tree& tree) {
  std::vector<std::int32_t> parent(tree.nodes.size(), -1);
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& node = tree.nodes[i];
    if (node.is_leaf()) continue;
    parent[node.left] = static_cast<std::int32_t>(i);
    parent[node.right] = static_cast<std::int32_t>(i);
  }
  return parent;
}

LeafBounds bounds_for_leaf(const Tree& tree, std::int32_t nodeid, const Schema& schema,
                           const std::vector<std::int32_t>& parent) {
  // Collect the path bottom-up, then apply the split constraints in any
  // order: intersection is commutative.
  LeafBounds bounds = unconstrained_bounds(schema);
  std::int32_t child = nodeid;
  for (std::int32_t up = parent[child]; up >= 0; child = up, up = parent[child]) {
    apply_constraint(bounds, tree.nodes[up].split, tree.nodes[up].left == child);
  }
  return bounds;
}

}  // namespace

LeafBounds leaf_bounds(const Tree& tree, std::int32_t nodeid, const Schema& schema) {
  if (nodeid < 0 || static_cast<std::size_t>(nodeid) >= tree.nodes.size() ||
      !tree.nodes[nodeid].is_leaf())
    throw Error("leaf_bounds: node " + std::to_string(nodeid) + " is not a leaf");
  return bounds_for_leaf(tree, nodeid, schema, parent_links(tree));
}

std::vector<std::pair<std::int32_t, LeafBounds>> all_leaf_bounds(const Tree& tree,
                                                                 const Schema& schema) {
  const auto parent = parent_links(tree);
  std::vector<std::pair<std::int32_t, LeafBounds>> result;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (!tree.nodes[i].is_leaf()) continue;
    const auto id = static_cast<std::int32_t>(i);
    result.emplace_back(id, bounds_for_leaf(tree, id, schema, parent));
  }
  return result;
}

}  // namespace arf
