#pragma once

#include <cstdint>

#include "arf/tabular.hpp"

namespace arf::datagen {

// Two interleaved half-circles with Gaussian coordinate noise; columns
// dim_1, dim_2 (continuous) and label (categorical "0"/"1"). Rows shuffled.
Dataset two_moons(std::size_t n, double noise, std::uint64_t seed);

// Independent columns: n_continuous U(0,1) draws plus one categorical column
// with cat_levels uniform levels (skipped when cat_levels == 0).
Dataset iid_mixed(std::size_t n, std::size_t n_continuous, std::size_t cat_levels,
                  std::uint64_t seed);

// Bivariate normal pair (x, y) with correlation rho.
Dataset correlated_gaussian(std::size_t n, double rho, std::uint64_t seed);

}  // namespace arf::datagen
