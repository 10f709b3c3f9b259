#pragma once

// Assembly of the PAC-Bayes generalisation-gap bound from prior samples.
//
// Per prior sample theta the bound needs two moment-generating exponents
//
//   psi1(theta) = (2 lambda^2 L^2 / N) (b_q (G + H) + theta_bar G)^2
//   psi2(theta) = (2 lambda L C / N) (2 b_q H + ||s0|| l_gs / (1 - tau))
//
// which are aggregated as psi_hat = (lme(psi1) + lme(psi2)) / 2 with lme the
// log-mean-exp over the prior cloud. The Gibbs posterior
// rho ~ pi exp(-lambda L_hat) is handled by importance reweighting of the
// same prior samples, and the final bound reads
//
//   E_rho L <= E_rho L_hat + (KL(rho||pi) + ln(1/delta) + psi_hat) / lambda
//
// with probability at least 1 - 2 delta.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pacrnn/class_s.hpp"
#include "pacrnn/mixing.hpp"
#include "pacrnn/numerics.hpp"

namespace pacrnn {

struct SampleRecord {
  Vector theta;
  double s0_norm = 0.0;
  ClassSConstants constants;
  GhPair gh;
  double l_ell = 0.0;
  double emp_loss = 0.0;
  double psi1_exp = 0.0;
  double psi2_exp = 0.0;
};

struct BoundReport {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  double delta = 0.0;
  double kl = 0.0;
  double psi_hat = 0.0;
  double r_n = 0.0;
  double post_emp_loss = 0.0;
  double total = 0.0;
  double z_hat = 1.0;
  std::size_t n_samples = 0;
  bool kl_clamped = false;
};

double psi1_exponent(double lambda, std::size_t n, double l_ell, const DataConstants& data,
                     const GhPair& gh);

/// Throws NotClassS when c.tau >= 1.
double psi2_exponent(double lambda, std::size_t n, double l_ell, const ClassSConstants& c,
                     double b_q, const GhPair& gh, double s0_norm);

/// Recomputes both exponents of every record for a new (lambda, n).
void refresh_exponents(std::span<SampleRecord> records, const DataConstants& data, double lambda,
                       std::size_t n);

/// (lme(psi1) + lme(psi2)) / 2. Throws InvalidInput when empty.
double psi_hat(std::span<const SampleRecord> samples);

/// beta_i = exp(-lambda_n * loss_i).
std::vector<double> gibbs_weights(std::span<const double> losses, double lambda_n);

struct GibbsEstimates {
  double z_hat = 1.0;
  double kl = 0.0;
  double post_emp_loss = 0.0;
  /// The raw estimate was negative (Monte-Carlo noise) and was set to 0.
  bool kl_clamped = false;
};

/// Self-normalised importance estimates over prior samples:
///   1/z_hat = mean(beta), kl = ln z_hat + z_hat mean(beta ln beta),
///   post_emp_loss = z_hat mean(beta loss).
/// Throws InvalidInput on length mismatch, empty input or beta <= 0.
GibbsEstimates gibbs_estimates(std::span<const double> beta, std::span<const double> losses);

/// (kl + ln(1/delta) + psi_hat) / lambda. Throws InvalidConfidence when
/// delta is outside (0, 0.5], InvalidInput when lambda <= 0.
double pac_bound(double lambda, double delta, double kl, double psi_hat_val);

struct CatoniConstants {
  double g1 = 0.0;
  double g2 = 0.0;
};

/// Sample maxima of
///   G1 = 2 L^2 (b_q (G + H) + theta_bar G)^2
///   G2 = 2 L C (2 b_q H + ||s0|| l_gs / (1 - tau)).
/// These are lower estimates of the suprema over the whole parameter set.
CatoniConstants estimate_g1_g2(std::span<const SampleRecord> samples, const DataConstants& data);

/// Axis-aligned box of parameters searched by uniform random draws.
struct ParameterBox {
  Vector lower;
  Vector upper;
  std::size_t draws = 0;
  std::uint64_t seed = 0;
};

/// Returns the certified record of theta, or nullopt when theta lies outside
/// the class-S parameter set.
using SampleEvaluator = std::function<std::optional<SampleRecord>(std::span<const double>)>;

/// Sample maxima over `samples` and `box.draws` uniform draws from the box.
/// Rejected draws are skipped. Still a lower estimate of the suprema.
CatoniConstants estimate_g1_g2(std::span<const SampleRecord> samples, const DataConstants& data,
                               const ParameterBox& box, const SampleEvaluator& evaluate);

/// (kl + ln(1/delta) + lambda^2 G1 / N + lambda G2 / N) / lambda.
double catoni_r_n(double lambda, std::size_t n, double delta, double kl,
                  const CatoniConstants& g);

/// Full report from records whose emp_loss and exponents are current.
/// Gibbs weights use `lambda`.
BoundReport assemble_bound(std::span<const SampleRecord> records, std::size_t n, double lambda,
                           double delta, std::uint64_t seed);

}  // namespace pacrnn
