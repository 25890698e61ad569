#include "arf/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <ostream>

#include "arf/error.hpp"
#include "parallel.hpp"

namespace arf {

void validate_config(const ArfConfig& config) {
  if (config.n_trees == 0) throw Error("arf: n_trees must be >= 1");
  if (config.min_node_size < 2) throw Error("arf: min_node_size must be >= 2");
  if (!(config.delta >= 0.0 && config.delta < 0.5))
    throw Error("arf: delta must lie in [0, 0.5)");
  if (config.max_iters == 0) throw Error("arf: max_iters must be >= 1");
}

ForestConfig forest_config(const ArfConfig& config, std::uint64_t forest_seed) {
  ForestConfig fc;
  fc.n_trees = config.n_trees;
  fc.mtry = config.mtry;
  fc.min_node_size = config.min_node_size;
  fc.max_depth = config.max_depth;
  fc.seed = forest_seed;
  return fc;
}

Dataset marginal_bootstrap(const Dataset& real, std::size_t n, Rng& rng) {
  if (n == 0) throw Error("marginal_bootstrap: n must be >= 1");
  const std::size_t n_real = real.n_rows();
  if (n_real == 0) throw Error("marginal_bootstrap: empty dataset");

  std::vector<ColumnValues> columns;
  columns.reserve(real.n_columns());
  for (std::size_t j = 0; j < real.n_columns(); ++j) {
    if (real.schema().column(j).kind == ColumnKind::continuous) {
      const auto source = real.continuous(j);
      std::vector<double> values(n);
      for (std::size_t i = 0; i < n; ++i) values[i] = source[rng.next_below(n_real)];
      columns.emplace_back(std::move(values));
    } else {
      const auto source = real.codes(j);
      std::vector<std::int32_t> codes(n);
      for (std::size_t i = 0; i < n; ++i) codes[i] = source[rng.next_below(n_real)];
      columns.emplace_back(std::move(codes));
    }
  }
  return Dataset(real.schema(), std::move(columns));
}

namespace {

// Leaf ids and cumulative real-row counts of one tree, for weighted draws.
struct TreeLeafIndex {
  std::vector<std::int32_t> leaf_ids;
  std::vector<std::uint64_t> cumulative;
  std::uint64_t total = 0;
};

TreeLeafIndex index_leaves(const Tree& tree) {
  TreeLeafIndex index;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& node = tree.nodes[i];
    if (!node.is_leaf() || node.n_real == 0) continue;
    index.total += node.n_real;
    index.leaf_ids.push_back(static_cast<std::int32_t>(i));
    index.cumulative.push_back(index.total);
  }
  return index;
}

std::int32_t draw_leaf(const TreeLeafIndex& index, Rng& rng) {
  const std::uint64_t target = rng.next_below(index.total);
  const auto it =
      std::upper_bound(index.cumulative.begin(), index.cumulative.end(), target);
  return index.leaf_ids[static_cast<std::size_t>(it - index.cumulative.begin())];
}

}  // namespace

Dataset leaf_resample(const Forest& forest, const Dataset& real, std::size_t n,
                      std::uint64_t seed, std::size_t n_threads,
                      std::vector<LeafDraw>* draw_log) {
  if (n == 0) throw Error("leaf_resample: n must be >= 1");
  if (forest.trees.empty()) throw Error("leaf_resample: empty forest");

  std::vector<TreeLeafIndex> indexes;
  indexes.reserve(forest.trees.size());
  for (const Tree& tree : forest.trees) {
    indexes.push_back(index_leaves(tree));
    if (indexes.back().total == 0)
      throw Error("leaf_resample: a tree holds no real rows in any leaf");
    for (std::int32_t id : indexes.back().leaf_ids)
      if (tree.nodes[id].real_rows.size() != tree.nodes[id].n_real)
        throw Error("leaf_resample: forest lacks real-row membership (loaded artifact?)");
  }

  const std::size_t p = real.n_columns();
  std::vector<ColumnValues> columns;
  columns.reserve(p);
  for (std::size_t j = 0; j < p; ++j) {
    if (real.schema().column(j).kind == ColumnKind::continuous)
      columns.emplace_back(std::vector<double>(n));
    else
      columns.emplace_back(std::vector<std::int32_t>(n));
  }
  if (draw_log) draw_log->assign(n, {});

  parallel_for(n, n_threads, [&](std::size_t i) {
    Rng rng(derive_stream(seed, stream::kRow, i));
    const auto t = static_cast<std::uint32_t>(rng.next_below(forest.trees.size()));
    const std::int32_t leaf_id = draw_leaf(indexes[t], rng);
    const auto& member_rows = forest.trees[t].nodes[leaf_id].real_rows;
    if (draw_log) (*draw_log)[i] = {t, leaf_id};
    for (std::size_t j = 0; j < p; ++j) {
      const std::uint32_t r = member_rows[rng.next_below(member_rows.size())];
      if (real.schema().column(j).kind == ColumnKind::continuous)
        std::get<std::vector<double>>(columns[j])[i] = real.continuous(j)[r];
      else
        std::get<std::vector<std::int32_t>>(columns[j])[i] = real.codes(j)[r];
    }
  });
  return Dataset(real.schema(), std::move(columns));
}

namespace {

std::string format_accuracy(double accuracy) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", accuracy);
  return buf;
}

}  // namespace

FitResult adversarial_fit(const Dataset& real, const ArfConfig& config,
                          std::size_t n_threads, std::ostream* diag) {
  validate_config(config);
  const std::size_t n = real.n_rows();
  const std::size_t p = real.n_columns();
  if (p == 0) throw Error("arf: dataset has no columns");
  if (n < 2 * config.min_node_size)
    throw Error("arf: need at least 2*min_node_size rows, got " + std::to_string(n));
  validate_config(forest_config(config, 0), p);

  std::ostream& log = diag ? *diag : std::cerr;
  const double threshold = 0.5 + config.delta;

  std::vector<std::uint8_t> labels(2 * n, kClassReal);
  std::fill(labels.begin() + static_cast<std::ptrdiff_t>(n), labels.end(),
            kClassSynthetic);

  Rng marginal_rng(derive_stream(config.seed, stream::kMarginal));
  Dataset synthetic = marginal_bootstrap(real, n, marginal_rng);

  FitResult result;
  {
    const Dataset combined = concat_rows(real, synthetic);
    result.forest = fit_forest(
        combined, labels, n,
        forest_config(config, derive_stream(config.seed, stream::kForest, 0)), n_threads);
    result.trace.accuracies.push_back(oob_accuracy(result.forest, combined, labels));
  }
  if (config.verbose)
    log << "Initial accuracy is " << format_accuracy(result.trace.accuracies[0]) << '\n';

  std::size_t iteration = 0;
  while (result.trace.accuracies.back() > threshold && iteration < config.max_iters) {
    ++iteration;
    synthetic = leaf_resample(result.forest, real, n,
                              derive_stream(config.seed, stream::kResample, iteration),
                              n_threads);
    const Dataset combined = concat_rows(real, synthetic);
    result.forest = fit_forest(
        combined, labels, n,
        forest_config(config, derive_stream(config.seed, stream::kForest, iteration)),
        n_threads);
    result.trace.accuracies.push_back(oob_accuracy(result.forest, combined, labels));
    if (config.verbose)
      log << "Iteration number " << iteration << " reached accuracy of "
          << format_accuracy(result.trace.accuracies.back()) << '\n';
  }

  result.trace.iterations_used = iteration;
  result.trace.converged = result.trace.accuracies.back() <= threshold;
  if (!result.trace.converged)
    log << "Warning: accuracy " << format_accuracy(result.trace.accuracies.back())
        << " still above " << format_accuracy(threshold) << " after "
        << config.max_iters << " iterations; returning the last forest\n";
  return result;
}

}  // namespace arf
