#include "arf/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "arf/error.hpp"
#include "arf/truncnorm.hpp"
#include "parallel.hpp"

namespace arf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double categorical_log_prob(const CategoricalParams& params, std::int32_t code) {
  const auto it = std::lower_bound(
      params.probs.begin(), params.probs.end(), code,
      [](const auto& entry, std::int32_t c) { return entry.first < c; });
  if (it == params.probs.end() || it->first != code || !(it->second > 0.0))
    return kNegInf;
  return std::log(it->second);
}

}  // namespace

DensityModel::DensityModel(const ArfModel& model) : model_(&model) {
  const LeafParamsTable& table = require_params(model);
  if (table.trees.size() != model.forest.trees.size())
    throw Error("density: parameter table does not match the forest");
  param_of_node_.resize(table.trees.size());
  for (std::size_t t = 0; t < table.trees.size(); ++t) {
    param_of_node_[t].assign(model.forest.trees[t].nodes.size(), -1);
    for (std::size_t k = 0; k < table.trees[t].size(); ++k) {
      const std::int32_t nodeid = table.trees[t][k].nodeid;
      if (nodeid < 0 || static_cast<std::size_t>(nodeid) >= param_of_node_[t].size())
        throw Error("density: parameter table references an unknown leaf");
      param_of_node_[t][nodeid] = static_cast<std::int32_t>(k);
    }
  }
}

double DensityModel::log_density(const Dataset& data, std::size_t row) const {
  if (!(data.schema() == model_->schema))
    throw Error("density: dataset schema does not match the model schema");
  const LeafParamsTable& table = *model_->params;
  const std::size_t n_trees = model_->forest.trees.size();

  double max_term = kNegInf;
  std::vector<double> terms;
  terms.reserve(n_trees);
  for (std::size_t t = 0; t < n_trees; ++t) {
    const std::int32_t leaf = assign_leaf(model_->forest.trees[t], data, row);
    const std::int32_t k = param_of_node_[t][leaf];
    if (k < 0) continue;  // zero-coverage leaf: this tree contributes nothing
    const LeafParams& params = table.trees[t][k];

    double term = std::log(params.coverage);
    for (std::size_t j = 0; j < params.features.size() && term != kNegInf; ++j) {
      if (const auto* tn = std::get_if<TruncNormParams>(&params.features[j])) {
        term += truncnorm_logpdf(*tn, data.continuous(j)[row]);
      } else {
        term += categorical_log_prob(std::get<CategoricalParams>(params.features[j]),
                                     data.codes(j)[row]);
      }
    }
    if (term == kNegInf) continue;
    terms.push_back(term);
    max_term = std::max(max_term, term);
  }

  if (terms.empty()) return kNegInf;
  double acc = 0.0;
  for (double term : terms) acc += std::exp(term - max_term);
  return max_term + std::log(acc) - std::log(static_cast<double>(n_trees));
}

Likelihood DensityModel::total_log_likelihood(const Dataset& data,
                                              std::size_t n_threads) const {
  Likelihood result;
  result.per_row.assign(data.n_rows(), 0.0);
  parallel_for(data.n_rows(), n_threads,
               [&](std::size_t i) { result.per_row[i] = log_density(data, i); });
  result.sum = 0.0;
  for (double v : result.per_row) result.sum += v;
  return result;
}

double log_density(const ArfModel& model, const Dataset& data, std::size_t row) {
  return DensityModel(model).log_density(data, row);
}

Likelihood total_log_likelihood(const ArfModel& model, const Dataset& data,
                                std::size_t n_threads) {
  return DensityModel(model).total_log_likelihood(data, n_threads);
}

}  // namespace arf
