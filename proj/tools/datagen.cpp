#include "datagen.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "arf/error.hpp"
#include "arf/rng.hpp"
#include "arf/truncnorm.hpp"

namespace arf::datagen {

namespace {

double normal_draw(Rng& rng) { return normal_quantile(rng.next_unit_open()); }

template <typename Swapper>
void shuffle_rows(std::size_t n, Rng& rng, Swapper&& swap_rows) {
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.next_below(i);
    if (j != i - 1) swap_rows(i - 1, j);
  }
}

}  // namespace

Dataset two_moons(std::size_t n, double noise, std::uint64_t seed) {
  if (n < 2) throw Error("two_moons: need at least 2 rows");
  Rng rng(derive_stream(seed, stream::kNoise));
  const std::size_t n_outer = n / 2;
  const std::size_t n_inner = n - n_outer;

  std::vector<double> dim1(n), dim2(n);
  std::vector<std::int32_t> label(n);
  const double pi = std::numbers::pi;
  for (std::size_t i = 0; i < n_outer; ++i) {
    const double t = pi * static_cast<double>(i) / static_cast<double>(n_outer - 1);
    dim1[i] = std::cos(t) + noise * normal_draw(rng);
    dim2[i] = std::sin(t) + noise * normal_draw(rng);
    label[i] = 0;
  }
  for (std::size_t i = 0; i < n_inner; ++i) {
    const double t = pi * static_cast<double>(i) / static_cast<double>(n_inner - 1);
    dim1[n_outer + i] = 1.0 - std::cos(t) + noise * normal_draw(rng);
    dim2[n_outer + i] = 0.5 - std::sin(t) + noise * normal_draw(rng);
    label[n_outer + i] = 1;
  }
  shuffle_rows(n, rng, [&](std::size_t a, std::size_t b) {
    std::swap(dim1[a], dim1[b]);
    std::swap(dim2[a], dim2[b]);
    std::swap(label[a], label[b]);
  });

  Schema schema({{"dim_1", ColumnKind::continuous, {}},
                 {"dim_2", ColumnKind::continuous, {}},
                 {"label", ColumnKind::categorical, {"0", "1"}}});
  std::vector<ColumnValues> columns;
  columns.emplace_back(std::move(dim1));
  columns.emplace_back(std::move(dim2));
  columns.emplace_back(std::move(label));
  return Dataset(std::move(schema), std::move(columns));
}

Dataset iid_mixed(std::size_t n, std::size_t n_continuous, std::size_t cat_levels,
                  std::uint64_t seed) {
  if (n == 0) throw Error("iid_mixed: need at least 1 row");
  if (n_continuous == 0 && cat_levels == 0) throw Error("iid_mixed: no columns requested");
  Rng rng(derive_stream(seed, stream::kNoise));

  std::vector<Column> schema_columns;
  std::vector<ColumnValues> columns;
  for (std::size_t j = 0; j < n_continuous; ++j) {
    schema_columns.push_back({"x" + std::to_string(j + 1), ColumnKind::continuous, {}});
    std::vector<double> values(n);
    for (double& v : values) v = rng.next_unit();
    columns.emplace_back(std::move(values));
  }
  if (cat_levels > 0) {
    std::vector<std::string> levels;
    for (std::size_t c = 0; c < cat_levels; ++c) levels.push_back("c" + std::to_string(c + 1));
    schema_columns.push_back({"group", ColumnKind::categorical, std::move(levels)});
    std::vector<std::int32_t> codes(n);
    for (auto& c : codes) c = static_cast<std::int32_t>(rng.next_below(cat_levels));
    columns.emplace_back(std::move(codes));
  }
  return Dataset(Schema(std::move(schema_columns)), std::move(columns));
}

Dataset correlated_gaussian(std::size_t n, double rho, std::uint64_t seed) {
  if (n < 2) throw Error("correlated_gaussian: need at least 2 rows");
  if (!(rho > -1.0 && rho < 1.0)) throw Error("correlated_gaussian: rho must lie in (-1,1)");
  Rng rng(derive_stream(seed, stream::kNoise));
  std::vector<double> x(n), y(n);
  const double tail = std::sqrt(1.0 - rho * rho);
  for (std::size_t i = 0; i < n; ++i) {
    const double z1 = normal_draw(rng);
    const double z2 = normal_draw(rng);
    x[i] = z1;
    y[i] = rho * z1 + tail * z2;
  }
  Schema schema({{"x", ColumnKind::continuous, {}}, {"y", ColumnKind::continuous, {}}});
  std::vector<ColumnValues> columns;
  columns.emplace_back(std::move(x));
  columns.emplace_back(std::move(y));
  return Dataset(std::move(schema), std::move(columns));
}

}  // namespace arf::datagen
