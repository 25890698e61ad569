#pragma once

#include <cstdint>
#include <vector>

#include "arf/adversarial.hpp"
#include "arf/model.hpp"
#include "arf/tabular.hpp"

namespace arf {

// Samples n rows from the fitted model: per row a uniform tree, a
// coverage-weighted leaf within it, then each feature independently from the
// leaf's estimated distribution (continuous through the truncated-normal
// quantile, categorical from its level table). Rows use substreams derived
// from (seed, row), so output is identical for any thread count.
// draw_log, when given, records the (tree, leaf) chosen per row.
Dataset forge(const ArfModel& model, std::size_t n, std::uint64_t seed,
              std::size_t n_threads = 1, std::vector<LeafDraw>* draw_log = nullptr);

}  // namespace arf
