#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "arf/forest.hpp"
#include "arf/rng.hpp"
#include "arf/tabular.hpp"

namespace arf {

struct ArfConfig {
  std::size_t n_trees = 30;
  std::size_t min_node_size = 5;
  std::size_t mtry = 0;       // 0: ceil(sqrt(p))
  std::size_t max_depth = 0;  // 0: unlimited
  double delta = 0.0;         // convergence slack: stop at accuracy <= 0.5 + delta
  std::size_t max_iters = 10;
  std::uint64_t seed = 0;
  bool verbose = false;

  bool operator==(const ArfConfig&) const = default;
};

void validate_config(const ArfConfig& config);
ForestConfig forest_config(const ArfConfig& config, std::uint64_t forest_seed);

struct FitTrace {
  std::vector<double> accuracies;  // index 0 = initial discriminator
  bool converged = false;
  std::size_t iterations_used = 0;

  bool operator==(const FitTrace&) const = default;
};

// Column-wise independent resampling with replacement: preserves marginals,
// destroys cross-column dependence.
Dataset marginal_bootstrap(const Dataset& real, std::size_t n, Rng& rng);

struct LeafDraw {
  std::uint32_t tree = 0;
  std::int32_t nodeid = -1;
};

// Per output row: tree uniform, leaf proportional to its real-row count,
// then each feature drawn independently (with replacement) from the leaf's
// real rows. Rows use substreams derived from (seed, row), so output is
// identical for any thread count. draw_log, when given, records the chosen
// (tree, leaf) per row.
Dataset leaf_resample(const Forest& forest, const Dataset& real, std::size_t n,
                      std::uint64_t seed, std::size_t n_threads = 1,
                      std::vector<LeafDraw>* draw_log = nullptr);

struct FitResult {
  Forest forest;  // the last forest trained; its leaves feed density estimation
  FitTrace trace;
};

// The adversarial loop: marginal bootstrap, discriminate, regenerate within
// leaves, repeat until out-of-bag accuracy falls to 0.5 + delta or max_iters
// is hit. Non-convergence is reported through the trace, not an error.
// Verbose progress goes to diag (standard error when null).
FitResult adversarial_fit(const Dataset& real, const ArfConfig& config,
                          std::size_t n_threads = 1, std::ostream* diag = nullptr);

}  // namespace arf
