#pragma once

// Independent oracles for the test suites: brute-force enumeration,
// quadrature and O(n^2) recomputation. These deliberately re-derive results
// from first principles instead of calling the code paths they check.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "arf/forest.hpp"
#include "arf/model.hpp"
#include "arf/tabular.hpp"

namespace arf::test {

// Composite 10-point Gauss-Legendre quadrature of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 int subintervals = 200);

// Exhaustive best-split search: every midpoint threshold, every proper
// subset of observed categories (canonicalized to contain the smallest
// observed code). Mirrors the documented tie-break order.
std::optional<SplitCandidate> oracle_best_split(const Dataset& data,
                                                std::span<const std::uint8_t> labels,
                                                std::span<const std::uint32_t> rows,
                                                std::span<const std::uint32_t> features,
                                                std::size_t min_node_size);

// Quadratic-time Kolmogorov-Smirnov: ECDF gap evaluated at every pooled point.
double oracle_ks(std::span<const double> a, std::span<const double> b);

// Mixture density by full (tree, leaf) enumeration over the parameter table;
// per-leaf factors are plain products, never routed through assign_leaf.
double oracle_density(const ArfModel& model, const Dataset& data, std::size_t row);

// Random small fitted model (<= n_trees trees, depth-capped) produced by the
// ordinary pipeline on random mixed data; used for oracle-equivalence sweeps.
ArfModel random_small_model(std::uint64_t seed, std::size_t n_trees = 3,
                            std::size_t max_depth = 3, double alpha = 0.0);

// Discriminator forest fit against a fresh marginal bootstrap of `real`,
// with min_node_size so large that every tree is a single root leaf.
Forest single_leaf_forest(const Dataset& real, std::size_t n_trees, std::uint64_t seed);

// Random mixed-kind dataset with adversarial column names and labels, for
// CSV round-trip properties.
Dataset random_messy_dataset(std::uint64_t seed);

// Integration box covering every leaf's support: finite split bounds are
// taken as-is, infinite ones are replaced by that leaf's 1%/99% truncated
// quantiles.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;
};
Box quantile_extended_box(const ArfModel& model);

// Midpoint-rule integral of exp(log_density) over the box (continuous-only
// models, 1 or 2 features).
double grid_integral(const ArfModel& model, const Box& box, std::size_t points_per_dim);

}  // namespace arf::test
