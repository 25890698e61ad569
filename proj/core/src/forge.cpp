#include "arf/forge.hpp"

#include <algorithm>

#include "arf/error.hpp"
#include "arf/truncnorm.hpp"
#include "parallel.hpp"

namespace arf {

const LeafParamsTable& require_params(const ArfModel& model) {
  if (!model.params)
    throw Error("model has no density parameters; run the density estimation step first");
  return *model.params;
}

namespace {

// Cumulative coverages of one tree's parameterized leaves, for weighted draws.
struct TreeParamIndex {
  std::vector<double> cumulative;
  double total = 0.0;
};

std::size_t draw_weighted(const TreeParamIndex& index, Rng& rng) {
  const double target = rng.next_unit() * index.total;
  const auto it =
      std::upper_bound(index.cumulative.begin(), index.cumulative.end(), target);
  const auto i = static_cast<std::size_t>(it - index.cumulative.begin());
  return std::min(i, index.cumulative.size() - 1);
}

std::int32_t draw_category(const CategoricalParams& params, Rng& rng) {
  double total = 0.0;
  for (const auto& [code, prob] : params.probs) total += prob;
  const double target = rng.next_unit() * total;
  double acc = 0.0;
  for (const auto& [code, prob] : params.probs) {
    acc += prob;
    if (target < acc) return code;
  }
  return params.probs.back().first;
}

}  // namespace

Dataset forge(const ArfModel& model, std::size_t n, std::uint64_t seed,
              std::size_t n_threads, std::vector<LeafDraw>* draw_log) {
  const LeafParamsTable& table = require_params(model);
  if (table.trees.empty()) throw Error("forge: parameter table is empty");

  std::vector<TreeParamIndex> indexes(table.trees.size());
  for (std::size_t t = 0; t < table.trees.size(); ++t) {
    double total = 0.0;
    for (const LeafParams& leaf : table.trees[t]) {
      total += leaf.coverage;
      indexes[t].cumulative.push_back(total);
    }
    indexes[t].total = total;
    if (!(total > 0.0)) throw Error("forge: a tree has no leaf coverage");
  }

  const std::size_t p = model.schema.n_columns();
  std::vector<ColumnValues> columns;
  columns.reserve(p);
  for (std::size_t j = 0; j < p; ++j) {
    if (model.schema.column(j).kind == ColumnKind::continuous)
      columns.emplace_back(std::vector<double>(n));
    else
      columns.emplace_back(std::vector<std::int32_t>(n));
  }
  if (draw_log) draw_log->assign(n, {});

  parallel_for(n, n_threads, [&](std::size_t i) {
    Rng rng(derive_stream(seed, stream::kRow, i));
    const auto t = static_cast<std::uint32_t>(rng.next_below(table.trees.size()));
    const LeafParams& leaf = table.trees[t][draw_weighted(indexes[t], rng)];
    if (draw_log) (*draw_log)[i] = {t, leaf.nodeid};
    for (std::size_t j = 0; j < p; ++j) {
      if (const auto* tn = std::get_if<TruncNormParams>(&leaf.features[j])) {
        std::get<std::vector<double>>(columns[j])[i] =
            truncnorm_quantile(*tn, rng.next_unit_open());
      } else {
        std::get<std::vector<std::int32_t>>(columns[j])[i] =
            draw_category(std::get<CategoricalParams>(leaf.features[j]), rng);
      }
    }
  });
  return Dataset(model.schema, std::move(columns));
}

}  // namespace arf
