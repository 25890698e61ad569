#pragma once

#include <cstdint>
#include <optional>

#include "arf/adversarial.hpp"
#include "arf/forde.hpp"
#include "arf/forest.hpp"
#include "arf/tabular.hpp"

namespace arf {

struct FitMetadata {
  ArfConfig config;
  double smoothing_alpha = 0.0;
  FitTrace trace;
  std::uint64_t created_unix = 0;  // set once at fit time, preserved on reload

  bool operator==(const FitMetadata&) const = default;
};

// A fitted generative model: schema, converged discriminator forest, leaf
// density parameters and fit provenance. Everything sampling and density
// evaluation need, nothing that references the training table.
struct ArfModel {
  Schema schema;
  Forest forest;
  std::optional<LeafParamsTable> params;
  FitMetadata meta;
};

// Throws an Error pointing the user at the estimation step when absent.
const LeafParamsTable& require_params(const ArfModel& model);

}  // namespace arf
