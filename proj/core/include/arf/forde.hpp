#pragma once

#include <cstdint>
#include <iosfwd>
#include <variant>
#include <vector>

#include "arf/forest.hpp"
#include "arf/tabular.hpp"
#include "arf/truncnorm.hpp"

namespace arf {

// Per-level probabilities of one categorical feature in one leaf. Only codes
// allowed by the leaf's bounds appear; probabilities sum to 1.
struct CategoricalParams {
  std::vector<std::pair<std::int32_t, double>> probs;  // (code, prob), code ascending

  bool operator==(const CategoricalParams&) const = default;
};

using LeafFeatureParams = std::variant<TruncNormParams, CategoricalParams>;

struct LeafParams {
  std::int32_t nodeid = -1;
  double coverage = 0.0;                       // fraction of real rows in this leaf
  std::vector<LeafFeatureParams> features;     // one record per schema column

  bool operator==(const LeafParams&) const = default;
};

// Estimated density parameters keyed by (tree, nodeid). Leaves that hold no
// real rows are dropped; within each tree the coverages of the remaining
// leaves sum to 1.
struct LeafParamsTable {
  std::vector<std::vector<LeafParams>> trees;  // per tree, ascending nodeid

  bool operator==(const LeafParamsTable&) const = default;
};

// Leaf-by-leaf estimation from the converged forest: coverage weights,
// truncated-normal mean/sd per continuous feature (bounds from the split
// path), smoothed category frequencies per categorical feature.
//
// Degenerate leaves fall back: a leaf sd that is undefined (< 2 rows) or zero
// is replaced by the feature's standard deviation over all real rows, then
// floored at 1e-9 of the feature's global range (1e-9 if the range is zero).
LeafParamsTable estimate_params(const Forest& forest, const Dataset& real,
                                double smoothing_alpha = 0.0,
                                std::size_t n_threads = 1);

// CSV export in three tables:
//   cnt: tree,nodeid,variable,mean,sd,lower,upper
//   cat: tree,nodeid,variable,level,prob
//   cov: tree,nodeid,coverage
void write_forde_csv(const LeafParamsTable& table, const Schema& schema,
                     std::ostream& cnt, std::ostream& cat, std::ostream& cov);

}  // namespace arf
