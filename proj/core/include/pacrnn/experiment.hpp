#pragma once

// End-to-end synthetic experiment: a fixed RNN generator produces data, a
// stability-truncated Gaussian prior over same-shaped RNN predictors is
// sampled by Metropolis-Hastings, and the PAC-Bayes bound with the Gibbs
// posterior is evaluated over a grid of dataset sizes and data seeds.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "pacrnn/bound.hpp"
#include "pacrnn/certify.hpp"
#include "pacrnn/dynsys.hpp"
#include "pacrnn/loss.hpp"
#include "pacrnn/mcmc.hpp"
#include "pacrnn/mixing.hpp"

namespace pacrnn {

/// lambda = sqrt(N) unless a fixed value is given.
struct LambdaRule {
  std::optional<double> fixed;

  double at(std::size_t n) const;
};

struct ExperimentConfig {
  std::vector<std::size_t> n_grid{5, 9, 20, 50, 100, 200, 500, 1000};
  std::size_t n_seeds = 10;
  /// Data realisation k uses seed `seed + k`.
  std::uint64_t seed = 0;
  double prior_sigma2 = 0.02;
  LambdaRule lambda_rule;
  double delta = 0.025;
  std::size_t n_f = 5000;
  /// `steps` is derived as burn_in + n_f * thin; `seed` is ignored (chain
  /// seeds are derived from the data seed).
  ChainConfig chain{0, 2000, 10, 0.05, 0};
  LossSpec loss;
  double e_inf = 1.27;
  double e_std = 1.0;
  double tau_max = 0.995;
  /// Tolerance on the distance to the steady state after the data burn-in.
  double burn_in_tol = 1e-9;
  LossLipschitzOptions loss_lipschitz;
  std::size_t threads = 1;

  /// Throws InvalidInput / InvalidConfidence on inconsistent settings.
  void validate() const;
  ChainConfig chain_for(std::uint64_t data_seed) const;
};

/// Predictor with the generator's shape: n_s = 2, n_x = 1, n_y = 1,
/// relu state map, tanh output map. Parameter layout (14 entries):
///   A (4, row-major) | B (2) | b_s (2) | C (2) | D (1) | b_y (1) | s0 (2)
struct PredictorShape {
  static constexpr std::size_t n_s = 2;
  static constexpr std::size_t n_x = 1;
  static constexpr std::size_t n_y = 1;
  static constexpr std::size_t dim = 14;

  static RnnSystem system(std::span<const double> theta);
  static Vector initial_state(std::span<const double> theta);
  static Vector flatten(const RnnSystem& sys, std::span<const double> s0);
};

/// The fixed two-state relu/tanh generator with outputs [y; x].
RnnSystem build_paper_generator();

/// Steady-state data from `gen` driven by i.i.d. truncated Gaussian noise:
/// the first output coordinate is the label y(t), the remaining ones the
/// predictor input x(t). The burn-in is sized so the state is within
/// `burn_in_tol` of the steady state. The first n samples do not depend on
/// n, so shorter datasets are prefixes of longer ones.
Trajectory generate_dataset(const RnnSystem& gen, std::uint64_t seed, std::size_t n,
                            double e_std, double e_inf, double burn_in_tol = 1e-9);
Trajectory generate_dataset(std::uint64_t seed, std::size_t n, double e_std, double e_inf);

/// -theta^T theta / (2 sigma^2) when the predictor is contractive with
/// tau < tau_max, -infinity otherwise.
LogDensity truncated_prior(double prior_sigma2, double tau_max);

/// Constants, Lipschitz constant and s0 norm of one prior sample (loss and
/// exponents left at zero).
SampleRecord certify_sample(std::span<const double> theta, const LossSpec& loss,
                            const DataConstants& data, LossLipschitzOptions opts = {});

/// Empirical loss of every record on each prefix length in `ns` (ascending),
/// in a single pass per record. Result[j][i] is record i at ns[j].
std::vector<std::vector<double>> prefix_losses(std::span<const SampleRecord> records,
                                               const LossSpec& loss, const Trajectory& data,
                                               std::span<const std::size_t> ns,
                                               std::size_t threads);

struct SeedRun {
  std::uint64_t seed = 0;
  Chain chain;
  std::vector<SampleRecord> records;  // exponents/losses of the last grid point
  std::vector<BoundReport> reports;   // one per grid point, ascending N
};

/// All grid points for one data seed. Exponents of `records` are refreshed
/// per grid point; the returned records hold the values of the largest N.
SeedRun run_seed(const ExperimentConfig& cfg, std::uint64_t seed);

/// Reports ordered by (seed, N). Throws InvariantViolation if a retained
/// sample violates the stability truncation.
std::vector<BoundReport> run_experiment(const ExperimentConfig& cfg);

/// Square loss of the zero predictor against tanh labels never exceeds 1;
/// totals at or above this level are vacuous.
inline constexpr double kVacuityLevel = 1.0;

struct SummaryRow {
  std::size_t n = 0;
  std::size_t n_seeds = 0;
  double total_median = 0.0, total_min = 0.0, total_max = 0.0;
  double emp_median = 0.0, emp_min = 0.0, emp_max = 0.0;
};

std::vector<SummaryRow> summarize(std::span<const BoundReport> reports);

/// Smallest grid N from which `totals` (ascending N) stay below the vacuity
/// level, or nullopt.
std::optional<std::size_t> crossover(std::span<const std::size_t> ns,
                                     std::span<const double> totals);

/// Writes bound_reports.csv, summary.csv and crossover.csv into `dir`
/// (created if needed). Throws Error with the path on I/O failure.
void emit_curves(std::span<const BoundReport> reports, const std::filesystem::path& dir);

}  // namespace pacrnn
