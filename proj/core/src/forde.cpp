#include "arf/forde.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "arf/error.hpp"
#include "parallel.hpp"

namespace arf {

namespace {

struct GlobalFeatureStats {
  double sd = 0.0;
  double range = 0.0;
};

double sample_sd(std::span<const double> values, double mean) {
  if (values.size() < 2) return 0.0;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::vector<GlobalFeatureStats> global_stats(const Dataset& real) {
  std::vector<GlobalFeatureStats> stats(real.n_columns());
  for (std::size_t j = 0; j < real.n_columns(); ++j) {
    if (real.schema().column(j).kind != ColumnKind::continuous) continue;
    const auto values = real.continuous(j);
    if (values.empty()) continue;
    double sum = 0.0, lo = values[0], hi = values[0];
    for (double v : values) {
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double mean = sum / static_cast<double>(values.size());
    stats[j].sd = sample_sd(values, mean);
    stats[j].range = hi - lo;
  }
  return stats;
}

}  // namespace

LeafParamsTable estimate_params(const Forest& forest, const Dataset& real,
                                double smoothing_alpha, std::size_t n_threads) {
  if (smoothing_alpha < 0.0) throw Error("estimate_params: alpha must be >= 0");
  const std::size_t n_real = real.n_rows();
  if (n_real == 0) throw Error("estimate_params: empty dataset");
  const std::size_t p = real.n_columns();
  const auto globals = global_stats(real);

  LeafParamsTable table;
  table.trees.resize(forest.trees.size());

  parallel_for(forest.trees.size(), n_threads, [&](std::size_t t) {
    const Tree& tree = forest.trees[t];
    std::vector<LeafParams>& leaves = table.trees[t];
    for (const auto& [nodeid, bounds] : all_leaf_bounds(tree, real.schema())) {
      const TreeNode& node = tree.nodes[nodeid];
      if (node.n_real == 0) continue;  // no mass, parameters not estimable
      if (node.real_rows.size() != node.n_real)
        throw Error("estimate_params: forest lacks real-row membership");

      LeafParams leaf;
      leaf.nodeid = nodeid;
      leaf.coverage = static_cast<double>(node.n_real) / static_cast<double>(n_real);
      leaf.features.reserve(p);

      for (std::size_t j = 0; j < p; ++j) {
        const Column& col = real.schema().column(j);
        if (col.kind == ColumnKind::continuous) {
          const auto values = real.continuous(j);
          double sum = 0.0;
          for (std::uint32_t r : node.real_rows) sum += values[r];
          const double mean = sum / static_cast<double>(node.real_rows.size());
          double ss = 0.0;
          for (std::uint32_t r : node.real_rows) {
            const double d = values[r] - mean;
            ss += d * d;
          }
          double sd = node.real_rows.size() >= 2
                          ? std::sqrt(ss / static_cast<double>(node.real_rows.size() - 1))
                          : 0.0;
          if (!(sd > 0.0)) sd = globals[j].sd;
          const double floor =
              globals[j].range > 0.0 ? 1e-9 * globals[j].range : 1e-9;
          sd = std::max(sd, floor);
          leaf.features.emplace_back(TruncNormParams{
              mean, sd, bounds.features[j].lower, bounds.features[j].upper});
        } else {
          const auto codes = real.codes(j);
          const auto& allowed = bounds.features[j].allowed;
          std::vector<std::uint64_t> counts(col.levels.size(), 0);
          for (std::uint32_t r : node.real_rows) ++counts[codes[r]];

          std::size_t n_allowed = 0;
          for (std::uint8_t a : allowed) n_allowed += a;
          const double denom = static_cast<double>(node.real_rows.size()) +
                               smoothing_alpha * static_cast<double>(n_allowed);
          CategoricalParams params;
          for (std::size_t c = 0; c < counts.size(); ++c) {
            if (!allowed[c]) continue;
            params.probs.emplace_back(
                static_cast<std::int32_t>(c),
                (static_cast<double>(counts[c]) + smoothing_alpha) / denom);
          }
          leaf.features.emplace_back(std::move(params));
        }
      }
      leaves.push_back(std::move(leaf));
    }
  });
  return table;
}

namespace {

std::string format_bound(double b) {
  if (std::isinf(b)) return b > 0 ? "inf" : "-inf";
  return format_double(b);
}

}  // namespace

void write_forde_csv(const LeafParamsTable& table, const Schema& schema,
                     std::ostream& cnt, std::ostream& cat, std::ostream& cov) {
  cnt << "tree,nodeid,variable,mean,sd,lower,upper\n";
  cat << "tree,nodeid,variable,level,prob\n";
  cov << "tree,nodeid,coverage\n";
  for (std::size_t t = 0; t < table.trees.size(); ++t) {
    for (const LeafParams& leaf : table.trees[t]) {
      cov << t << ',' << leaf.nodeid << ',' << format_double(leaf.coverage) << '\n';
      for (std::size_t j = 0; j < leaf.features.size(); ++j) {
        const Column& col = schema.column(j);
        if (const auto* tn = std::get_if<TruncNormParams>(&leaf.features[j])) {
          cnt << t << ',' << leaf.nodeid << ',';
          write_csv_field(cnt, col.name);
          cnt << ',' << format_double(tn->mean) << ',' << format_double(tn->sd) << ','
              << format_bound(tn->lower) << ',' << format_bound(tn->upper) << '\n';
        } else {
          const auto& probs = std::get<CategoricalParams>(leaf.features[j]).probs;
          for (const auto& [code, prob] : probs) {
            cat << t << ',' << leaf.nodeid << ',';
            write_csv_field(cat, col.name);
            cat << ',';
            write_csv_field(cat, col.levels[code]);
            cat << ',' << format_double(prob) << '\n';
          }
        }
      }
    }
  }
}

}  // namespace arf
