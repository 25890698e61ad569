#pragma once

#include <stdexcept>
#include <string>

namespace arf {

// Single exception type for all recoverable errors (bad input, bad config,
// corrupt artifacts). Messages are user-facing.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace arf
