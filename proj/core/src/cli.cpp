#include "arf/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "arf/density.hpp"
#include "arf/error.hpp"
#include "arf/forde.hpp"
#include "arf/forge.hpp"
#include "arf/model.hpp"
#include "arf/model_io.hpp"
#include "arf/stats.hpp"
#include "arf/tabular.hpp"

namespace arf::cli {

namespace {

namespace fs = std::filesystem;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open input file " + path);
  return in;
}

std::size_t resolve_threads(std::size_t threads) {
  if (threads != 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

KindOverrides gather_overrides(const std::optional<std::string>& override_path,
                               const std::vector<std::string>& categorical) {
  KindOverrides overrides;
  if (override_path) {
    std::ifstream in = open_input(*override_path);
    overrides = read_kind_overrides(in);
  }
  for (const std::string& name : categorical)
    overrides.insert_or_assign(name, ColumnKind::categorical);
  return overrides;
}

void write_text_output(const std::string& path, const std::string& content,
                       std::ostream& out) {
  if (path == "-") {
    out << content;
    return;
  }
  atomic_write_file(path, content);
}

std::string render_value(double v) { return format_double(v); }

int run_guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace

int cmd_fit(const FitOptions& options, std::ostream& out, std::ostream& err) {
  (void)out;  // fit reports status on err; stdout stays clean for data
  return run_guarded(err, [&]() -> int {
    const KindOverrides overrides =
        gather_overrides(options.override_path, options.categorical);
    std::ifstream in = open_input(options.data_path);
    const Dataset real = read_csv(in, overrides);

    const std::size_t threads = resolve_threads(options.threads);
    const FitResult fit = adversarial_fit(real, options.config, threads, &err);

    ArfModel model;
    model.schema = real.schema();
    model.forest = fit.forest;
    model.params = estimate_params(fit.forest, real, options.alpha, threads);
    model.meta.config = options.config;
    model.meta.smoothing_alpha = options.alpha;
    model.meta.trace = fit.trace;
    model.meta.created_unix = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
    save_model(model, options.model_path);

    if (options.export_forde_dir) {
      const fs::path dir(*options.export_forde_dir);
      std::error_code ec;
      fs::create_directories(dir, ec);
      std::ostringstream cnt, cat, cov;
      write_forde_csv(*model.params, model.schema, cnt, cat, cov);
      atomic_write_file(dir / "forde-cnt.csv", cnt.str());
      atomic_write_file(dir / "forde-cat.csv", cat.str());
      atomic_write_file(dir / "forde-cov.csv", cov.str());
    }

    err << "model written to " << options.model_path << " ("
        << (fit.trace.converged ? "converged" : "not converged") << " after "
        << fit.trace.iterations_used << " iterations)\n";
    if (!fit.trace.converged && options.strict) return kExitNotConverged;
    return kExitOk;
  });
}

int cmd_sample(const SampleOptions& options, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    const ArfModel model = load_model(options.model_path);
    std::ostringstream csv;
    if (options.n == 0) {
      const Dataset empty(model.schema, [&] {
        std::vector<ColumnValues> cols;
        for (std::size_t j = 0; j < model.schema.n_columns(); ++j) {
          if (model.schema.column(j).kind == ColumnKind::continuous)
            cols.emplace_back(std::vector<double>{});
          else
            cols.emplace_back(std::vector<std::int32_t>{});
        }
        return cols;
      }());
      write_csv(empty, csv);
    } else {
      const Dataset sample =
          forge(model, options.n, options.seed, resolve_threads(options.threads));
      write_csv(sample, csv);
    }
    write_text_output(options.out_path, csv.str(), out);
    return kExitOk;
  });
}

int cmd_lik(const LikOptions& options, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    const ArfModel model = load_model(options.model_path);
    std::ifstream in = open_input(options.data_path);
    const Dataset data = read_csv(in, model.schema);

    const DensityModel density(model);
    const Likelihood lik =
        density.total_log_likelihood(data, resolve_threads(options.threads));

    if (options.out_path) {
      std::ostringstream csv;
      csv << "log_likelihood\n";
      for (double v : lik.per_row) csv << render_value(v) << '\n';
      write_text_output(*options.out_path, csv.str(), out);
    }
    const std::size_t n = lik.per_row.size();
    const std::string mean =
        n == 0 ? "0" : render_value(lik.sum / static_cast<double>(n));
    out << "n=" << n << " mean=" << mean << " sum=" << (n == 0 ? "0" : render_value(lik.sum))
        << '\n';
    return kExitOk;
  });
}

int cmd_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    const KindOverrides overrides =
        gather_overrides(options.override_path, options.categorical);
    std::ifstream real_in = open_input(options.real_path);
    const Dataset real = read_csv(real_in, overrides);
    std::ifstream synth_in = open_input(options.synthetic_path);
    const Dataset synth = read_csv(synth_in, overrides);

    if (real.n_columns() != synth.n_columns())
      throw Error("evaluate: files have different column counts");
    for (std::size_t j = 0; j < real.n_columns(); ++j) {
      const Column& a = real.schema().column(j);
      const Column& b = synth.schema().column(j);
      if (a.name != b.name || a.kind != b.kind)
        throw Error("evaluate: column " + std::to_string(j + 1) +
                    " differs between files ('" + a.name + "' vs '" + b.name + "')");
    }

    for (std::size_t j = 0; j < real.n_columns(); ++j) {
      const Column& col = real.schema().column(j);
      if (col.kind == ColumnKind::continuous) {
        const double ks = ks_statistic(real.continuous(j), synth.continuous(j));
        out << col.name << " KS " << render_value(ks) << '\n';
      } else {
        // Align both files' codes on the union of observed levels.
        std::vector<std::string> levels = col.levels;
        std::unordered_map<std::string, std::int32_t> index;
        for (std::size_t c = 0; c < levels.size(); ++c)
          index.emplace(levels[c], static_cast<std::int32_t>(c));
        const Column& synth_col = synth.schema().column(j);
        std::vector<std::int32_t> remap(synth_col.levels.size());
        for (std::size_t c = 0; c < synth_col.levels.size(); ++c) {
          auto [it, inserted] = index.emplace(synth_col.levels[c],
                                              static_cast<std::int32_t>(levels.size()));
          if (inserted) levels.push_back(synth_col.levels[c]);
          remap[c] = it->second;
        }
        std::vector<std::int32_t> synth_codes(synth.codes(j).begin(), synth.codes(j).end());
        for (std::int32_t& c : synth_codes) c = remap[c];
        const double tv = total_variation(real.codes(j), synth_codes, levels.size());
        out << col.name << " TV " << render_value(tv) << '\n';
      }
    }
    return kExitOk;
  });
}

}  // namespace arf::cli
