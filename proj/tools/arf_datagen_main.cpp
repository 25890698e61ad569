// Small generator for the datasets used in the docs and benchmarks.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "arf/error.hpp"
#include "arf/tabular.hpp"
#include "datagen.hpp"

namespace {

void emit(const arf::Dataset& data, const std::string& out_path) {
  std::ostringstream csv;
  arf::write_csv(data, csv);
  if (out_path == "-") {
    std::cout << csv.str();
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw arf::Error("cannot open " + out_path + " for writing");
  out << csv.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic benchmark dataset generator"};
  app.require_subcommand(1);
  app.fallthrough();  // --n/--seed/--out may follow the subcommand

  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::string out_path = "-";
  app.add_option("--n", n, "Rows to generate");
  app.add_option("--seed", seed, "Seed");
  app.add_option("--out", out_path, "Output CSV ('-' for stdout)");

  double noise = 0.1;
  CLI::App* moons = app.add_subcommand("moons", "Two interleaved noisy half-circles");
  moons->add_option("--noise", noise, "Gaussian coordinate noise");

  std::size_t n_continuous = 2;
  std::size_t cat_levels = 0;
  CLI::App* uniform = app.add_subcommand("uniform", "Independent uniform columns");
  uniform->add_option("--continuous", n_continuous, "Number of continuous columns");
  uniform->add_option("--cat-levels", cat_levels,
                      "Levels of an extra categorical column (0: none)");

  double rho = 0.95;
  CLI::App* gaussian = app.add_subcommand("gaussian", "Correlated bivariate normal pair");
  gaussian->add_option("--rho", rho, "Correlation");

  CLI11_PARSE(app, argc, argv);

  try {
    if (moons->parsed()) {
      emit(arf::datagen::two_moons(n, noise, seed), out_path);
    } else if (uniform->parsed()) {
      emit(arf::datagen::iid_mixed(n, n_continuous, cat_levels, seed), out_path);
    } else {
      emit(arf::datagen::correlated_gaussian(n, rho, seed), out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
