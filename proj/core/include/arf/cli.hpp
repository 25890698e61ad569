#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "arf/adversarial.hpp"

namespace arf::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;           // input/validation errors
inline constexpr int kExitNotConverged = 2;    // --strict only

struct FitOptions {
  std::string data_path;
  std::string model_path;
  std::vector<std::string> categorical;       // repeated --categorical overrides
  std::optional<std::string> override_path;   // name=kind file
  ArfConfig config;
  double alpha = 0.0;
  bool strict = false;
  std::optional<std::string> export_forde_dir;
  std::size_t threads = 0;  // 0: available parallelism
};

struct SampleOptions {
  std::string model_path;
  std::string out_path;  // "-" writes to standard output
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
};

struct LikOptions {
  std::string model_path;
  std::string data_path;
  std::optional<std::string> out_path;  // per-row CSV; "-" for standard output
  std::size_t threads = 0;
};

struct EvaluateOptions {
  std::string real_path;
  std::string synthetic_path;
  std::vector<std::string> categorical;
  std::optional<std::string> override_path;
};

// Commands write data to files/out and diagnostics to err, and return an
// exit code instead of throwing. Output files are written atomically.
int cmd_fit(const FitOptions& options, std::ostream& out, std::ostream& err);
int cmd_sample(const SampleOptions& options, std::ostream& out, std::ostream& err);
int cmd_lik(const LikOptions& options, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err);

}  // namespace arf::cli
