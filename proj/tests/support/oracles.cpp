#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "arf/adversarial.hpp"
#include "arf/density.hpp"
#include "arf/error.hpp"
#include "arf/forde.hpp"
#include "arf/rng.hpp"
#include "arf/truncnorm.hpp"

#include <limits>

namespace arf::test {

namespace {

constexpr double kGlNodes[5] = {0.1488743389816312108848, 0.4333953941292471907993,
                                0.6794095682990244062343, 0.8650633666889845107321,
                                0.9739065285171717200779};
constexpr double kGlWeights[5] = {0.2955242247147528701739, 0.2692667193099963550912,
                                  0.2190863625159820439955, 0.1494513491505805931458,
                                  0.0666713443086881375936};

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 int subintervals) {
  const double h = (b - a) / subintervals;
  double total = 0.0;
  for (int s = 0; s < subintervals; ++s) {
    const double mid = a + h * (s + 0.5);
    const double half = h / 2.0;
    for (int k = 0; k < 5; ++k) {
      total += kGlWeights[k] * half *
               (f(mid - half * kGlNodes[k]) + f(mid + half * kGlNodes[k]));
    }
  }
  return total;
}

namespace {

double oracle_gini(std::uint64_t c0, std::uint64_t c1) {
  const double n = static_cast<double>(c0 + c1);
  const double p0 = static_cast<double>(c0) / n;
  const double p1 = static_cast<double>(c1) / n;
  return 1.0 - (p0 * p0 + p1 * p1);
}

struct OracleCounts {
  std::uint64_t c0l = 0, c1l = 0, c0r = 0, c1r = 0;
};

bool oracle_candidate_better(const SplitCandidate& cand, const SplitCandidate& best) {
  if (cand.decrease != best.decrease) return cand.decrease > best.decrease;
  if (cand.split.feature != best.split.feature) return cand.split.feature < best.split.feature;
  if (cand.split.kind == SplitKind::continuous)
    return cand.split.threshold < best.split.threshold;
  return std::lexicographical_compare(
      cand.split.left_set.begin(), cand.split.left_set.end(),
      best.split.left_set.begin(), best.split.left_set.end());
}

}  // namespace

std::optional<SplitCandidate> oracle_best_split(const Dataset& data,
                                                std::span<const std::uint8_t> labels,
                                                std::span<const std::uint32_t> rows,
                                                std::span<const std::uint32_t> features,
                                                std::size_t min_node_size) {
  if (rows.size() < 2) return std::nullopt;
  std::uint64_t pc1 = 0;
  for (std::uint32_t r : rows) pc1 += labels[r] == kClassSynthetic;
  const std::uint64_t pc0 = rows.size() - pc1;
  const double parent = oracle_gini(pc0, pc1);
  const double n = static_cast<double>(rows.size());

  std::optional<SplitCandidate> best;
  auto offer = [&](Split split, const OracleCounts& counts) {
    const std::uint64_t nl = counts.c0l + counts.c1l;
    const std::uint64_t nr = counts.c0r + counts.c1r;
    if (nl < min_node_size || nr < min_node_size) return;
    const double decrease = parent -
                            (static_cast<double>(nl) / n) * oracle_gini(counts.c0l, counts.c1l) -
                            (static_cast<double>(nr) / n) * oracle_gini(counts.c0r, counts.c1r);
    if (!(decrease > 0.0)) return;
    SplitCandidate cand{std::move(split), decrease};
    if (!best || oracle_candidate_better(cand, *best)) best = std::move(cand);
  };

  for (std::uint32_t f : features) {
    const Column& col = data.schema().column(f);
    if (col.kind == ColumnKind::continuous) {
      const auto values = data.continuous(f);
      std::vector<double> distinct;
      for (std::uint32_t r : rows) distinct.push_back(values[r]);
      std::sort(distinct.begin(), distinct.end());
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
        const double threshold = std::midpoint(distinct[i], distinct[i + 1]);
        if (!(threshold > distinct[i])) continue;
        OracleCounts counts;
        for (std::uint32_t r : rows) {
          const bool left = values[r] < threshold;
          if (labels[r] == kClassSynthetic)
            ++(left ? counts.c1l : counts.c1r);
          else
            ++(left ? counts.c0l : counts.c0r);
        }
        offer(Split{f, SplitKind::continuous, threshold, {}}, counts);
      }
    } else {
      const auto codes = data.codes(f);
      std::vector<std::int32_t> observed;
      for (std::uint32_t r : rows) observed.push_back(codes[r]);
      std::sort(observed.begin(), observed.end());
      observed.erase(std::unique(observed.begin(), observed.end()), observed.end());
      const std::size_t k = observed.size();
      if (k < 2) continue;
      // Proper subsets holding the smallest observed code.
      for (std::uint32_t mask = 0; mask + 1 < (1u << (k - 1)); ++mask) {
        std::vector<std::int32_t> left_set{observed[0]};
        for (std::size_t j = 0; j + 1 < k; ++j)
          if (mask & (1u << j)) left_set.push_back(observed[j + 1]);
        OracleCounts counts;
        for (std::uint32_t r : rows) {
          const bool left = std::binary_search(left_set.begin(), left_set.end(), codes[r]);
          if (labels[r] == kClassSynthetic)
            ++(left ? counts.c1l : counts.c1r);
          else
            ++(left ? counts.c0l : counts.c0r);
        }
        offer(Split{f, SplitKind::categorical, 0.0, std::move(left_set)}, counts);
      }
    }
  }
  return best;
}

double oracle_ks(std::span<const double> a, std::span<const double> b) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  double d = 0.0;
  for (double v : pooled) {
    double fa = 0.0, fb = 0.0;
    for (double x : a) fa += x <= v;
    for (double x : b) fb += x <= v;
    fa /= static_cast<double>(a.size());
    fb /= static_cast<double>(b.size());
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

double oracle_density(const ArfModel& model, const Dataset& data, std::size_t row) {
  const LeafParamsTable& table = *model.params;
  double total = 0.0;
  for (const auto& leaves : table.trees) {
    for (const LeafParams& leaf : leaves) {
      double product = leaf.coverage;
      for (std::size_t j = 0; j < leaf.features.size() && product > 0.0; ++j) {
        if (const auto* tn = std::get_if<TruncNormParams>(&leaf.features[j])) {
          product *= truncnorm_pdf(*tn, data.continuous(j)[row]);
        } else {
          const auto& probs = std::get<CategoricalParams>(leaf.features[j]).probs;
          const std::int32_t code = data.codes(j)[row];
          double p = 0.0;
          for (const auto& [c, prob] : probs)
            if (c == code) p = prob;
          product *= p;
        }
      }
      total += product;
    }
  }
  return total / static_cast<double>(table.trees.size());
}

ArfModel random_small_model(std::uint64_t seed, std::size_t n_trees,
                            std::size_t max_depth, double alpha) {
  Rng rng(derive_stream(seed, 0xEC));
  const std::size_t n_features = 1 + rng.next_below(3);
  const std::size_t n = 24 + rng.next_below(40);

  std::vector<Column> schema_columns;
  std::vector<ColumnValues> columns;
  for (std::size_t j = 0; j < n_features; ++j) {
    const bool continuous = rng.next_unit() < 0.6;
    if (continuous) {
      schema_columns.push_back({"f" + std::to_string(j), ColumnKind::continuous, {}});
      std::vector<double> values(n);
      for (double& v : values) v = -3.0 + 6.0 * rng.next_unit();
      columns.emplace_back(std::move(values));
    } else {
      const std::size_t k = 2 + rng.next_below(3);
      std::vector<std::string> levels;
      for (std::size_t c = 0; c < k; ++c) levels.push_back("L" + std::to_string(c));
      schema_columns.push_back({"f" + std::to_string(j), ColumnKind::categorical, levels});
      std::vector<std::int32_t> codes(n);
      for (auto& c : codes) c = static_cast<std::int32_t>(rng.next_below(k));
      columns.emplace_back(std::move(codes));
    }
  }
  const Dataset real(Schema(std::move(schema_columns)), std::move(columns));

  ArfConfig config;
  config.n_trees = 1 + rng.next_below(n_trees);
  config.max_depth = 1 + rng.next_below(max_depth);
  config.min_node_size = 2;
  config.max_iters = 1;
  config.seed = derive_stream(seed, 0xF1);
  std::ostringstream sink;  // swallow non-convergence warnings
  const FitResult fit = adversarial_fit(real, config, 1, &sink);

  ArfModel model;
  model.schema = real.schema();
  model.forest = fit.forest;
  model.params = estimate_params(fit.forest, real, alpha);
  model.meta.config = config;
  model.meta.smoothing_alpha = alpha;
  model.meta.trace = fit.trace;
  model.meta.created_unix = 1700000000;
  return model;
}

Forest single_leaf_forest(const Dataset& real, std::size_t n_trees, std::uint64_t seed) {
  const std::size_t n = real.n_rows();
  Rng rng(derive_stream(seed, stream::kMarginal));
  const Dataset combined = concat_rows(real, marginal_bootstrap(real, n, rng));
  std::vector<std::uint8_t> labels(2 * n, kClassReal);
  std::fill(labels.begin() + static_cast<std::ptrdiff_t>(n), labels.end(),
            kClassSynthetic);
  ForestConfig config;
  config.n_trees = n_trees;
  config.min_node_size = 2 * n + 1;  // no admissible split anywhere
  config.seed = derive_stream(seed, stream::kForest);
  return fit_forest(combined, labels, n, config);
}

Dataset random_messy_dataset(std::uint64_t seed) {
  Rng rng(derive_stream(seed, 0xD5));
  static const std::string kNameAlphabet = "ab,\"\n x";
  const std::size_t n_cols = 1 + rng.next_below(4);
  const std::size_t n = rng.next_below(40);  // may be zero rows

  auto random_text = [&](std::size_t min_len) {
    const std::size_t len = min_len + rng.next_below(6);
    std::string s;
    for (std::size_t i = 0; i < len; ++i)
      s.push_back(kNameAlphabet[rng.next_below(kNameAlphabet.size())]);
    return s;
  };

  std::vector<Column> schema_columns;
  std::vector<ColumnValues> columns;
  for (std::size_t j = 0; j < n_cols; ++j) {
    std::string name;
    do {
      name = random_text(1);
    } while (std::any_of(schema_columns.begin(), schema_columns.end(),
                         [&](const Column& c) { return c.name == name; }));
    if (rng.next_unit() < 0.5) {
      schema_columns.push_back({name, ColumnKind::continuous, {}});
      std::vector<double> values(n);
      for (double& v : values) {
        v = (rng.next_unit() - 0.5) * std::pow(10.0, static_cast<double>(rng.next_below(15)) - 7.0);
      }
      columns.emplace_back(std::move(values));
    } else {
      const std::size_t k = 1 + rng.next_below(4);
      std::vector<std::string> levels;
      for (std::size_t c = 0; c < k; ++c) {
        std::string label;
        do {
          label = random_text(1);
        } while (std::find(levels.begin(), levels.end(), label) != levels.end());
        levels.push_back(label);
      }
      schema_columns.push_back({name, ColumnKind::categorical, levels});
      std::vector<std::int32_t> codes(n);
      for (auto& c : codes) c = static_cast<std::int32_t>(rng.next_below(k));
      columns.emplace_back(std::move(codes));
    }
  }
  return Dataset(Schema(std::move(schema_columns)), std::move(columns));
}

Box quantile_extended_box(const ArfModel& model) {
  const LeafParamsTable& table = *model.params;
  const std::size_t p = model.schema.n_columns();
  Box box;
  box.lower.assign(p, std::numeric_limits<double>::infinity());
  box.upper.assign(p, -std::numeric_limits<double>::infinity());
  for (const auto& leaves : table.trees) {
    for (const LeafParams& leaf : leaves) {
      for (std::size_t j = 0; j < p; ++j) {
        const auto& tn = std::get<TruncNormParams>(leaf.features[j]);
        const double lo = std::isfinite(tn.lower) ? tn.lower : truncnorm_quantile(tn, 0.01);
        const double hi = std::isfinite(tn.upper) ? tn.upper : truncnorm_quantile(tn, 0.99);
        box.lower[j] = std::min(box.lower[j], lo);
        box.upper[j] = std::max(box.upper[j], hi);
      }
    }
  }
  return box;
}

double grid_integral(const ArfModel& model, const Box& box, std::size_t points_per_dim) {
  const std::size_t p = model.schema.n_columns();
  const DensityModel density(model);
  if (p == 1) {
    const double h = (box.upper[0] - box.lower[0]) / static_cast<double>(points_per_dim);
    std::vector<double> xs(points_per_dim);
    for (std::size_t i = 0; i < points_per_dim; ++i)
      xs[i] = box.lower[0] + h * (static_cast<double>(i) + 0.5);
    const Dataset grid(model.schema, {ColumnValues(std::move(xs))});
    double total = 0.0;
    for (std::size_t i = 0; i < grid.n_rows(); ++i)
      total += std::exp(density.log_density(grid, i)) * h;
    return total;
  }
  if (p != 2) throw Error("grid_integral: only 1-D and 2-D models supported");
  const double hx = (box.upper[0] - box.lower[0]) / static_cast<double>(points_per_dim);
  const double hy = (box.upper[1] - box.lower[1]) / static_cast<double>(points_per_dim);
  std::vector<double> xs, ys;
  xs.reserve(points_per_dim * points_per_dim);
  ys.reserve(points_per_dim * points_per_dim);
  for (std::size_t i = 0; i < points_per_dim; ++i) {
    for (std::size_t k = 0; k < points_per_dim; ++k) {
      xs.push_back(box.lower[0] + hx * (static_cast<double>(i) + 0.5));
      ys.push_back(box.lower[1] + hy * (static_cast<double>(k) + 0.5));
    }
  }
  const Dataset grid(model.schema, {ColumnValues(std::move(xs)), ColumnValues(std::move(ys))});
  const Likelihood lik = density.total_log_likelihood(grid, 2);
  double total = 0.0;
  for (double v : lik.per_row) total += std::exp(v);
  return total * hx * hy;
}

}  // namespace arf::test
