#include "pacrnn/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <string>

#include "pacrnn/errors.hpp"
#include "pacrnn/io.hpp"
#include "pacrnn/parallel.hpp"

namespace pacrnn {

double LambdaRule::at(std::size_t n) const {
  return fixed ? *fixed : std::sqrt(static_cast<double>(n));
}

void ExperimentConfig::validate() const {
  if (n_grid.empty()) throw InvalidInput("config: n_grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] == 0) throw InvalidInput("config: dataset sizes must be positive");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
      throw InvalidInput("config: n_grid must be strictly ascending");
    }
  }
  if (n_seeds == 0) throw InvalidInput("config: n_seeds must be positive");
  if (!(prior_sigma2 > 0.0)) throw InvalidInput("config: prior_sigma2 must be positive");
  if (lambda_rule.fixed && !(*lambda_rule.fixed > 0.0 && std::isfinite(*lambda_rule.fixed))) {
    throw InvalidInput("config: fixed lambda must be positive");
  }
  if (!(delta > 0.0 && delta <= 0.5)) throw InvalidConfidence("config: delta must lie in (0, 0.5]");
  if (n_f == 0) throw InvalidInput("config: n_f must be positive");
  if (!(e_inf > 0.0) || !(e_std > 0.0)) throw InvalidInput("config: e_inf and e_std must be positive");
  if (!(tau_max > 0.0 && tau_max < 1.0)) throw InvalidInput("config: tau_max must lie in (0, 1)");
  if (!(burn_in_tol > 0.0)) throw InvalidInput("config: burn_in_tol must be positive");
  if (threads == 0) throw InvalidInput("config: threads must be >= 1");
  loss.validate();
  if (loss.kind == LossKind::softmax_xent && loss.classes != PredictorShape::n_y) {
    throw InvalidInput("config: softmax loss needs one predictor output per class, predictor has " +
                       std::to_string(PredictorShape::n_y));
  }
  chain_for(0).validate();
}

ChainConfig ExperimentConfig::chain_for(std::uint64_t data_seed) const {
  ChainConfig c = chain;
  c.steps = chain.burn_in + n_f * chain.thin;
  c.seed = mix_seed(data_seed, 1);
  return c;
}

RnnSystem PredictorShape::system(std::span<const double> theta) {
  if (theta.size() != dim) {
    throw InvalidInput("predictor parameter vector has " + std::to_string(theta.size()) +
                       " entries, expected " + std::to_string(dim));
  }
  RnnSystem s;
  s.a = Matrix(2, 2, {theta[0], theta[1], theta[2], theta[3]});
  s.b = Matrix(2, 1, {theta[4], theta[5]});
  s.b_s = {theta[6], theta[7]};
  s.c = Matrix(1, 2, {theta[8], theta[9]});
  s.d = Matrix(1, 1, {theta[10]});
  s.b_y = {theta[11]};
  s.sigma_f = {ActivationKind::relu};
  s.sigma_g = {ActivationKind::tanh};
  return s;
}

Vector PredictorShape::initial_state(std::span<const double> theta) {
  if (theta.size() != dim) throw InvalidInput("predictor parameter vector has wrong size");
  return {theta[12], theta[13]};
}

Vector PredictorShape::flatten(const RnnSystem& sys, std::span<const double> s0) {
  if (sys.n_s() != n_s || sys.n_v() != n_x || sys.n_y() != n_y || s0.size() != n_s) {
    throw InvalidInput("flatten: system does not have the predictor shape");
  }
  Vector theta;
  theta.reserve(dim);
  for (double x : sys.a.data()) theta.push_back(x);
  for (double x : sys.b.data()) theta.push_back(x);
  theta.insert(theta.end(), sys.b_s.begin(), sys.b_s.end());
  for (double x : sys.c.data()) theta.push_back(x);
  for (double x : sys.d.data()) theta.push_back(x);
  theta.insert(theta.end(), sys.b_y.begin(), sys.b_y.end());
  theta.insert(theta.end(), s0.begin(), s0.end());
  return theta;
}

RnnSystem build_paper_generator() {
  RnnSystem g;
  g.a = {{0.52, 0.23}, {0.23, -0.52}};
  g.b = {{-0.82, -0.45}, {0.36, -0.96}};
  g.b_s = {0.38, -0.06};
  g.c = {{0.05, -0.10}, {-0.11, 0.01}};
  g.d = {{0.09, -0.11}, {0.05, -0.16}};
  g.b_y = {-0.53, -0.79};
  g.sigma_f = {ActivationKind::relu};
  g.sigma_g = {ActivationKind::tanh};
  return g;
}

Trajectory generate_dataset(const RnnSystem& gen, std::uint64_t seed, std::size_t n,
                            double e_std, double e_inf, double burn_in_tol) {
  gen.validate();
  if (n == 0) throw InvalidInput("generate_dataset: n must be positive");
  if (gen.n_y() < 2) throw InvalidInput("generate_dataset: generator needs outputs [y; x]");
  const ClassSConstants consts = rnn_constants(gen);
  const double input_bound = e_inf * std::sqrt(static_cast<double>(gen.n_v()));
  const double steady = steady_state_bound(gen, consts.tau, input_bound);
  const std::size_t burn = burn_in_length(consts, 0.0, steady, burn_in_tol);

  SeededRng rng(mix_seed(seed, 0));
  std::vector<Vector> noise;
  noise.reserve(burn + n);
  for (std::size_t t = 0; t < burn + n; ++t) {
    noise.push_back(truncated_gaussian(rng, e_std, e_inf, gen.n_v()));
  }
  const auto outputs = steady_state_outputs(gen, noise, burn);

  Trajectory traj;
  traj.inputs.reserve(n);
  traj.outputs.reserve(n);
  for (const auto& o : outputs) {
    traj.outputs.push_back({o[0]});
    traj.inputs.emplace_back(o.begin() + 1, o.end());
  }
  return traj;
}

Trajectory generate_dataset(std::uint64_t seed, std::size_t n, double e_std, double e_inf) {
  return generate_dataset(build_paper_generator(), seed, n, e_std, e_inf);
}

LogDensity truncated_prior(double prior_sigma2, double tau_max) {
  return [prior_sigma2, tau_max](std::span<const double> theta) {
    const auto cert = check_contraction(PredictorShape::system(theta));
    if (!cert.passed || !(cert.tau < tau_max)) return -std::numeric_limits<double>::infinity();
    double sq = 0.0;
    for (double x : theta) sq += x * x;
    return -0.5 * sq / prior_sigma2;
  };
}

SampleRecord certify_sample(std::span<const double> theta, const LossSpec& loss,
                            const DataConstants& data, LossLipschitzOptions opts) {
  SampleRecord r;
  r.theta.assign(theta.begin(), theta.end());
  r.constants = rnn_constants(PredictorShape::system(theta));
  r.gh = g_and_h(r.constants);
  r.l_ell = loss_lipschitz(loss, data, r.gh, opts);
  r.s0_norm = norm2(PredictorShape::initial_state(theta));
  return r;
}

std::vector<std::vector<double>> prefix_losses(std::span<const SampleRecord> records,
                                               const LossSpec& loss, const Trajectory& data,
                                               std::span<const std::size_t> ns,
                                               std::size_t threads) {
  if (ns.empty()) return {};
  if (ns.back() > data.size()) throw InvalidInput("prefix_losses: dataset shorter than largest N");
  std::vector<std::vector<double>> out(ns.size(), std::vector<double>(records.size()));
  parallel_for(records.size(), threads, [&](std::size_t i) {
    const RnnSystem pred = PredictorShape::system(records[i].theta);
    Vector s = PredictorShape::initial_state(records[i].theta);
    Vector next(pred.n_s());
    Vector yhat(pred.n_y());
    double total = 0.0;
    std::size_t j = 0;
    for (std::size_t t = 0; t < ns.back(); ++t) {
      pred.step_into(s, data.inputs[t], next, yhat);
      total += loss_value(loss, data.outputs[t], yhat);
      s.swap(next);
      while (j < ns.size() && ns[j] == t + 1) {
        out[j][i] = total / static_cast<double>(ns[j]);
        ++j;
      }
    }
  });
  return out;
}

SeedRun run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const RnnSystem gen = build_paper_generator();
  const DataConstants data = effective_data_constants(gen, rnn_constants(gen), cfg.e_inf);
  const Trajectory traj =
      generate_dataset(gen, seed, cfg.n_grid.back(), cfg.e_std, cfg.e_inf, cfg.burn_in_tol);

  SeedRun run;
  run.seed = seed;
  const Vector init(PredictorShape::dim, 0.0);
  run.chain = mh_sample(truncated_prior(cfg.prior_sigma2, cfg.tau_max), init, cfg.chain_for(seed));

  run.records.resize(run.chain.samples.size());
  parallel_for(run.records.size(), cfg.threads, [&](std::size_t i) {
    const auto& theta = run.chain.samples[i];
    const auto cert = check_contraction(PredictorShape::system(theta));
    if (!cert.passed || !(cert.tau < cfg.tau_max)) {
      throw InvariantViolation("retained prior sample " + std::to_string(i) + " has tau = " +
                               std::to_string(cert.tau) + " >= tau_max");
    }
    run.records[i] = certify_sample(theta, cfg.loss, data, cfg.loss_lipschitz);
  });

  const auto losses = prefix_losses(run.records, cfg.loss, traj, cfg.n_grid, cfg.threads);
  for (std::size_t j = 0; j < cfg.n_grid.size(); ++j) {
    const std::size_t n = cfg.n_grid[j];
    const double lambda = cfg.lambda_rule.at(n);
    for (std::size_t i = 0; i < run.records.size(); ++i) run.records[i].emp_loss = losses[j][i];
    refresh_exponents(run.records, data, lambda, n);
    for (const auto& r : run.records) {
      if (!std::isfinite(r.psi1_exp) || !std::isfinite(r.psi2_exp)) {
        throw InvariantViolation("non-finite bound exponent for a retained sample");
      }
    }
    run.reports.push_back(assemble_bound(run.records, n, lambda, cfg.delta, seed));
  }
  return run;
}

std::vector<BoundReport> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<BoundReport> reports;
  for (std::size_t k = 0; k < cfg.n_seeds; ++k) {
    auto run = run_seed(cfg, cfg.seed + k);
    reports.insert(reports.end(), run.reports.begin(), run.reports.end());
  }
  return reports;
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::vector<SummaryRow> summarize(std::span<const BoundReport> reports) {
  std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> by_n;
  for (const auto& r : reports) {
    by_n[r.n].first.push_back(r.total);
    by_n[r.n].second.push_back(r.post_emp_loss);
  }
  std::vector<SummaryRow> rows;
  for (const auto& [n, vals] : by_n) {
    const auto& [totals, emps] = vals;
    SummaryRow row;
    row.n = n;
    row.n_seeds = totals.size();
    row.total_median = median(totals);
    row.total_min = *std::min_element(totals.begin(), totals.end());
    row.total_max = *std::max_element(totals.begin(), totals.end());
    row.emp_median = median(emps);
    row.emp_min = *std::min_element(emps.begin(), emps.end());
    row.emp_max = *std::max_element(emps.begin(), emps.end());
    rows.push_back(row);
  }
  return rows;
}

std::optional<std::size_t> crossover(std::span<const std::size_t> ns,
                                     std::span<const double> totals) {
  if (ns.size() != totals.size()) throw InvalidInput("crossover: length mismatch");
  std::optional<std::size_t> found;
  for (std::size_t i = ns.size(); i-- > 0;) {
    if (!(totals[i] < kVacuityLevel)) break;
    found = ns[i];
  }
  return found;
}

void emit_curves(std::span<const BoundReport> reports, const std::filesystem::path& dir) {
  if (reports.empty()) throw InvalidInput("emit_curves: no reports");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());

  auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot open " + p.string() + " for writing");
    return f;
  };
  auto close = [](std::ofstream& f, const std::filesystem::path& p) {
    f.close();
    if (!f) throw Error("write failed for " + p.string());
  };

  const auto report_path = dir / "bound_reports.csv";
  auto f = open(report_path);
  write_reports_csv(f, reports);
  close(f, report_path);

  const auto rows = summarize(reports);
  const auto summary_path = dir / "summary.csv";
  auto s = open(summary_path);
  write_summary_csv(s, rows);
  close(s, summary_path);

  // Per-seed and median crossover points.
  std::map<std::uint64_t, std::pair<std::vector<std::size_t>, std::vector<double>>> by_seed;
  for (const auto& r : reports) {
    by_seed[r.seed].first.push_back(r.n);
    by_seed[r.seed].second.push_back(r.total);
  }
  const auto cross_path = dir / "crossover.csv";
  auto c = open(cross_path);
  c << "seed,n_star\n";
  for (const auto& [seed, v] : by_seed) {
    const auto n_star = crossover(v.first, v.second);
    c << seed << ',' << (n_star ? std::to_string(*n_star) : std::string("none")) << '\n';
  }
  std::vector<std::size_t> ns;
  std::vector<double> medians;
  for (const auto& row : rows) {
    ns.push_back(row.n);
    medians.push_back(row.total_median);
  }
  const auto n_star = crossover(ns, medians);
  c << "median," << (n_star ? std::to_string(*n_star) : std::string("none")) << '\n';
  close(c, cross_path);
}

}  // namespace pacrnn
