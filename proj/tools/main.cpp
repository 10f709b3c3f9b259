// pacrnn command-line interface.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pacrnn/bound.hpp"
#include "pacrnn/certify.hpp"
#include "pacrnn/dynsys.hpp"
#include "pacrnn/errors.hpp"
#include "pacrnn/experiment.hpp"
#include "pacrnn/format.hpp"
#include "pacrnn/io.hpp"
#include "pacrnn/mixing.hpp"

namespace fs = std::filesystem;
using namespace pacrnn;

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitError = 2;

LambdaRule parse_lambda(const std::string& text) {
  if (text == "sqrt_n") return {};
  double v = 0.0;
  std::size_t used = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(v > 0.0)) {
    throw InvalidInput("--lambda must be \"sqrt_n\" or a positive number, got '" + text + "'");
  }
  return LambdaRule{v};
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  return f;
}

void finish(std::ofstream& f, const fs::path& path) {
  f.close();
  if (!f) throw Error("write failed for " + path.string());
}

/// Writes `body` into dir/name when an output directory is given, to stdout otherwise.
template <typename Writer>
void emit(const std::optional<fs::path>& dir, const std::string& name, Writer&& body) {
  if (!dir) {
    body(std::cout);
    return;
  }
  const fs::path path = *dir / name;
  auto f = open_out(path);
  body(f);
  finish(f, path);
  std::cerr << "wrote " << path.string() << "\n";
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::optional<std::string> lambda;
  std::optional<double> delta;
  std::optional<std::size_t> threads;
  std::optional<std::size_t> n_f;
  std::optional<std::size_t> n_seeds;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Data seed (first realisation)");
    cmd->add_option("--lambda", lambda, "Rate parameter: a positive number or sqrt_n");
    cmd->add_option("--delta", delta, "Confidence parameter in (0, 0.5]");
    cmd->add_option("--threads", threads, "Worker threads for per-sample evaluation")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--n-f", n_f, "Number of retained prior samples")->check(CLI::PositiveNumber);
  }

  void apply(ExperimentConfig& cfg) const {
    if (seed) cfg.seed = *seed;
    if (n) cfg.n_grid = {*n};
    if (lambda) cfg.lambda_rule = parse_lambda(*lambda);
    if (delta) cfg.delta = *delta;
    if (threads) cfg.threads = *threads;
    if (n_f) cfg.n_f = *n_f;
    if (n_seeds) cfg.n_seeds = *n_seeds;
    cfg.validate();
  }
};

ExperimentConfig load_config(const std::optional<fs::path>& path) {
  return path ? read_config(*path) : ExperimentConfig{};
}

void warn_clamped(const std::vector<BoundReport>& reports) {
  for (const auto& r : reports) {
    if (r.kl_clamped) {
      std::cerr << "warning: negative KL estimate clamped to 0 (seed " << r.seed << ", N " << r.n
                << ")\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PAC-Bayes generalisation bounds for stable recurrent predictors"};
  app.require_subcommand(1);

  fs::path model_path;
  std::optional<fs::path> config_path;
  std::optional<fs::path> out_dir;
  std::optional<fs::path> inputs_path;
  bool table_convention = false;
  double e_inf = 1.27;
  double e_std = 1.0;
  bool saturate = false;
  std::size_t n = 100;
  Overrides ov;

  auto* constants = app.add_subcommand("constants", "Print the class-S certificate of a model");
  constants->add_option("--model", model_path, "Model JSON")->required()->check(CLI::ExistingFile);
  constants->add_flag("--table-convention", table_convention,
                      "Use l_v = ||B|| / Lip(sigma_f) instead of Lip(sigma_f) ||B||");

  auto* check = app.add_subcommand("check-stability",
                                   "Contraction check; exits nonzero when it fails");
  check->add_option("--model", model_path, "Model JSON")->required()->check(CLI::ExistingFile);

  auto* data = app.add_subcommand("data-constants", "Print the data constants of a generator");
  data->add_option("--model", model_path, "Generator model JSON")
      ->required()
      ->check(CLI::ExistingFile);
  data->add_option("--e-inf", e_inf, "Sup-norm bound of the generator noise")
      ->check(CLI::PositiveNumber);
  data->add_flag("--saturate", saturate,
                 "Cap b_q by the saturation bound of the output activation");

  auto* sim = app.add_subcommand("simulate", "Simulate a model from s(0) = 0 over an input CSV");
  sim->add_option("--model", model_path, "Model JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--inputs", inputs_path, "Input CSV with columns [t,]v_0..")
      ->required()
      ->check(CLI::ExistingFile);
  sim->add_option("--out", out_dir, "Output directory (stdout when omitted)");

  auto* gen = app.add_subcommand("generate-data", "Synthesise a steady-state dataset");
  std::optional<fs::path> gen_model;
  std::uint64_t gen_seed = 0;
  gen->add_option("--model", gen_model, "Generator model JSON (built-in generator by default)")
      ->check(CLI::ExistingFile);
  gen->add_option("--seed", gen_seed, "Data seed");
  gen->add_option("--n", n, "Number of samples")->check(CLI::PositiveNumber);
  gen->add_option("--e-std", e_std, "Noise standard deviation before truncation")
      ->check(CLI::PositiveNumber);
  gen->add_option("--e-inf", e_inf, "Noise truncation bound")->check(CLI::PositiveNumber);
  gen->add_option("--out", out_dir, "Output directory (stdout when omitted)");

  auto* bound = app.add_subcommand("bound", "Bound for one data seed and one dataset size");
  bound->add_option("--config", config_path, "Experiment config JSON")
      ->check(CLI::ExistingFile);
  bound->add_option("--n", ov.n, "Dataset size")->check(CLI::PositiveNumber);
  bound->add_option("--out", out_dir, "Output directory (stdout when omitted)");
  ov.add_to(bound);

  auto* exp = app.add_subcommand("experiment", "Full experiment over the N grid and data seeds");
  exp->add_option("--config", config_path, "Experiment config JSON")->check(CLI::ExistingFile);
  exp->add_option("--out", out_dir, "Output directory")->required();
  exp->add_option("--n-seeds", ov.n_seeds, "Number of data realisations")
      ->check(CLI::PositiveNumber);
  ov.add_to(exp);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*constants) {
      const auto sys = read_model(model_path);
      const auto conv = table_convention ? LvConvention::table : LvConvention::proof;
      std::cout << constants_to_json(rnn_constants(sys, conv));
    } else if (*check) {
      const auto cert = check_contraction(read_model(model_path));
      std::cout << "{\"passed\": " << (cert.passed ? "true" : "false")
                << ", \"tau\": " << format_double(cert.tau) << "}\n";
      if (!cert.passed) return kExitCheckFailed;
    } else if (*data) {
      const auto sys = read_model(model_path);
      const auto consts = rnn_constants(sys);
      const auto dc = saturate ? effective_data_constants(sys, consts, e_inf)
                               : data_constants(consts, e_inf);
      std::cout << data_constants_to_json(dc);
    } else if (*sim) {
      const auto sys = read_model(model_path);
      std::ifstream in(*inputs_path, std::ios::binary);
      const auto inputs = read_inputs_csv(in);
      const Vector s0(sys.n_s(), 0.0);
      const auto result = simulate(sys, s0, inputs);
      emit(out_dir, "simulation.csv",
           [&](std::ostream& o) { write_simulation_csv(o, inputs, result); });
    } else if (*gen) {
      const RnnSystem g = gen_model ? read_model(*gen_model) : build_paper_generator();
      const auto traj = generate_dataset(g, gen_seed, n, e_std, e_inf);
      emit(out_dir, "trajectory.csv", [&](std::ostream& o) { write_trajectory_csv(o, traj); });
      if (out_dir) {
        write_model(*out_dir / "generator.json", g);
        std::cerr << "wrote " << (*out_dir / "generator.json").string() << "\n";
      }
    } else if (*bound) {
      auto cfg = load_config(config_path);
      if (!ov.n && cfg.n_grid.size() > 1) cfg.n_grid = {cfg.n_grid.back()};
      ov.apply(cfg);
      const auto run = run_seed(cfg, cfg.seed);
      warn_clamped(run.reports);
      emit(out_dir, "bound_reports.csv",
           [&](std::ostream& o) { write_reports_csv(o, run.reports); });
    } else if (*exp) {
      auto cfg = load_config(config_path);
      ov.apply(cfg);
      const auto reports = run_experiment(cfg);
      warn_clamped(reports);
      emit_curves(reports, *out_dir);
      {
        const fs::path path = *out_dir / "config.json";
        auto f = open_out(path);
        f << config_to_json(cfg);
        finish(f, path);
      }
      write_summary_csv(std::cout, summarize(reports));
      std::cerr << "wrote " << (*out_dir).string()
                << "/{bound_reports,summary,crossover}.csv and config.json\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
