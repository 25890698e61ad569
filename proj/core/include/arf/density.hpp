#pragma once

#include <cstdint>
#include <vector>

#include "arf/model.hpp"
#include "arf/tabular.hpp"

namespace arf {

struct Likelihood {
  double sum = 0.0;  // -inf as soon as any row is -inf
  std::vector<double> per_row;
};

// Read-only evaluator over a fitted model. The joint density of a row is the
// tree-average of pi_leaf times the product of that leaf's per-feature
// densities, with the leaf picked by routing the row down each tree.
// Accumulation is in log space with a max-shifted log-sum-exp across trees;
// zero-coverage leaves contribute zero for their tree.
class DensityModel {
 public:
  explicit DensityModel(const ArfModel& model);  // model must outlive this

  // Natural-log density; -inf when every tree contributes zero mass. The
  // dataset's schema must equal the model schema (unknown categorical levels
  // are therefore rejected before evaluation, not folded into -inf).
  double log_density(const Dataset& data, std::size_t row) const;

  Likelihood total_log_likelihood(const Dataset& data, std::size_t n_threads = 1) const;

 private:
  const ArfModel* model_;
  // Per tree: leaf nodeid -> index into the params table, -1 for no coverage.
  std::vector<std::vector<std::int32_t>> param_of_node_;
};

// One-shot conveniences.
double log_density(const ArfModel& model, const Dataset& data, std::size_t row);
Likelihood total_log_likelihood(const ArfModel& model, const Dataset& data,
                                std::size_t n_threads = 1);

}  // namespace arf
