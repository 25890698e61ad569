#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace arf {

// Two-sample Kolmogorov-Smirnov statistic: sup |ECDF_a - ECDF_b|.
// Both samples must be non-empty.
double ks_statistic(std::span<const double> a, std::span<const double> b);

// Total variation distance between the empirical level distributions of two
// code samples: 0.5 * sum_c |p_a(c) - p_b(c)| over n_levels codes.
double total_variation(std::span<const std::int32_t> a, std::span<const std::int32_t> b,
                       std::size_t n_levels);

// Pearson correlation; 0 when either sample is constant.
double pearson_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace arf
