#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "arf/cli.hpp"

namespace {

void add_threads_flag(CLI::App* cmd, std::size_t& threads) {
  cmd->add_option("--threads", threads,
                  "Worker threads (default: available parallelism; 1 for the "
                  "strictest reproducibility)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial random forests for tabular density estimation and synthesis"};
  app.require_subcommand(1);

  arf::cli::FitOptions fit;
  CLI::App* cmd_fit = app.add_subcommand("fit", "Fit a model to a CSV dataset");
  cmd_fit->add_option("--data", fit.data_path, "Training CSV (header required)")->required();
  cmd_fit->add_option("--out", fit.model_path, "Output model artifact path")->required();
  cmd_fit->add_option("--categorical", fit.categorical,
                      "Treat a column as categorical (repeatable)");
  cmd_fit->add_option("--schema", fit.override_path,
                      "Column kind override file (name=continuous|categorical)");
  cmd_fit->add_option("--n-trees", fit.config.n_trees, "Trees per discriminator forest");
  cmd_fit->add_option("--min-node-size", fit.config.min_node_size,
                      "Minimum rows per node, counted on real+synthetic rows");
  cmd_fit->add_option("--mtry", fit.config.mtry,
                      "Features tried per split (0: ceil(sqrt(p)))");
  cmd_fit->add_option("--max-depth", fit.config.max_depth, "Tree depth cap (0: unlimited)");
  cmd_fit->add_option("--delta", fit.config.delta,
                      "Convergence slack: stop at accuracy <= 0.5 + delta");
  cmd_fit->add_option("--max-iters", fit.config.max_iters, "Adversarial iteration cap");
  cmd_fit->add_option("--alpha", fit.alpha, "Categorical smoothing pseudo-count");
  cmd_fit->add_option("--seed", fit.config.seed, "Master seed");
  cmd_fit->add_flag("--verbose", fit.config.verbose, "Print the accuracy trace");
  cmd_fit->add_flag("--strict", fit.strict, "Exit 2 when the fit does not converge");
  cmd_fit->add_option("--export-forde", fit.export_forde_dir,
                      "Also export the estimated parameters as CSV into this directory");
  add_threads_flag(cmd_fit, fit.threads);

  arf::cli::SampleOptions sample;
  CLI::App* cmd_sample = app.add_subcommand("sample", "Generate synthetic rows from a model");
  cmd_sample->add_option("--model", sample.model_path, "Model artifact")->required();
  cmd_sample->add_option("-n,--n", sample.n, "Rows to generate")->required();
  cmd_sample->add_option("--seed", sample.seed, "Sampling seed");
  cmd_sample->add_option("--out", sample.out_path, "Output CSV ('-' for stdout)")->required();
  add_threads_flag(cmd_sample, sample.threads);

  arf::cli::LikOptions lik;
  CLI::App* cmd_lik = app.add_subcommand("lik", "Evaluate log-likelihood of rows under a model");
  cmd_lik->add_option("--model", lik.model_path, "Model artifact")->required();
  cmd_lik->add_option("--data", lik.data_path, "CSV of rows to score")->required();
  cmd_lik->add_option("--out", lik.out_path, "Per-row log-likelihood CSV ('-' for stdout)");
  add_threads_flag(cmd_lik, lik.threads);

  arf::cli::EvaluateOptions evaluate;
  CLI::App* cmd_evaluate =
      app.add_subcommand("evaluate", "Compare real and synthetic CSVs feature by feature");
  cmd_evaluate->add_option("--real", evaluate.real_path, "Real data CSV")->required();
  cmd_evaluate->add_option("--synthetic", evaluate.synthetic_path, "Synthetic data CSV")
      ->required();
  cmd_evaluate->add_option("--categorical", evaluate.categorical,
                           "Treat a column as categorical in both files (repeatable)");
  cmd_evaluate->add_option("--schema", evaluate.override_path, "Column kind override file");

  CLI11_PARSE(app, argc, argv);

  if (cmd_fit->parsed()) return arf::cli::cmd_fit(fit, std::cout, std::cerr);
  if (cmd_sample->parsed()) return arf::cli::cmd_sample(sample, std::cout, std::cerr);
  if (cmd_lik->parsed()) return arf::cli::cmd_lik(lik, std::cout, std::cerr);
  return arf::cli::cmd_evaluate(evaluate, std::cout, std::cerr);
}
