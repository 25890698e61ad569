#include "arf/stats.hpp"

#include <algorithm>
#include <cmath>

#include "arf/error.hpp"

namespace arf {

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error("ks_statistic: empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double total_variation(std::span<const std::int32_t> a, std::span<const std::int32_t> b,
                       std::size_t n_levels) {
  if (a.empty() || b.empty()) throw Error("total_variation: empty sample");
  std::vector<double> pa(n_levels, 0.0), pb(n_levels, 0.0);
  for (std::int32_t c : a) pa[c] += 1.0 / static_cast<double>(a.size());
  for (std::int32_t c : b) pb[c] += 1.0 / static_cast<double>(b.size());
  double tv = 0.0;
  for (std::size_t c = 0; c < n_levels; ++c) tv += std::abs(pa[c] - pb[c]);
  return 0.5 * tv;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error("pearson_correlation: need two samples of equal length >= 2");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace arf
