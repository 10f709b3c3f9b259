#include "pacrnn/bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pacrnn/errors.hpp"

namespace pacrnn {

namespace {

void check_rate(double lambda, std::size_t n) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidInput("lambda must be positive");
  if (n == 0) throw InvalidInput("N must be positive");
}

double amplitude_term(const DataConstants& data, const GhPair& gh) {
  return data.b_q * (gh.g + gh.h) + data.theta_bar * gh.g;
}

double transient_term(const ClassSConstants& c, double b_q, const GhPair& gh, double s0_norm) {
  if (!(c.tau < 1.0)) throw NotClassS("tau >= 1", c.tau);
  return 2.0 * b_q * gh.h + s0_norm * c.l_gs / (1.0 - c.tau);
}

}  // namespace

double psi1_exponent(double lambda, std::size_t n, double l_ell, const DataConstants& data,
                     const GhPair& gh) {
  check_rate(lambda, n);
  const double a = amplitude_term(data, gh);
  return 2.0 * lambda * lambda * l_ell * l_ell / static_cast<double>(n) * a * a;
}

double psi2_exponent(double lambda, std::size_t n, double l_ell, const ClassSConstants& c,
                     double b_q, const GhPair& gh, double s0_norm) {
  check_rate(lambda, n);
  return 2.0 * lambda * l_ell * c.c / static_cast<double>(n) *
         transient_term(c, b_q, gh, s0_norm);
}

void refresh_exponents(std::span<SampleRecord> records, const DataConstants& data, double lambda,
                       std::size_t n) {
  for (auto& r : records) {
    r.psi1_exp = psi1_exponent(lambda, n, r.l_ell, data, r.gh);
    r.psi2_exp = psi2_exponent(lambda, n, r.l_ell, r.constants, data.b_q, r.gh, r.s0_norm);
  }
}

double psi_hat(std::span<const SampleRecord> samples) {
  if (samples.empty()) throw InvalidInput("psi_hat: empty sample set");
  std::vector<double> e1(samples.size());
  std::vector<double> e2(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    e1[i] = samples[i].psi1_exp;
    e2[i] = samples[i].psi2_exp;
  }
  return 0.5 * (log_mean_exp(e1) + log_mean_exp(e2));
}

std::vector<double> gibbs_weights(std::span<const double> losses, double lambda_n) {
  std::vector<double> beta(losses.size());
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (!std::isfinite(losses[i])) throw InvalidInput("gibbs_weights: non-finite loss");
    beta[i] = std::exp(-lambda_n * losses[i]);
  }
  return beta;
}

GibbsEstimates gibbs_estimates(std::span<const double> beta, std::span<const double> losses) {
  if (beta.empty() || beta.size() != losses.size()) {
    throw InvalidInput("gibbs_estimates: beta and losses must be non-empty and equally long");
  }
  double sum_b = 0.0;
  for (double b : beta) {
    if (!(b > 0.0) || !std::isfinite(b)) {
      throw InvalidInput("gibbs_estimates: weights must be positive and finite");
    }
    sum_b += b;
  }
  double sum_blogb = 0.0;
  double sum_bl = 0.0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    sum_blogb += beta[i] * std::log(beta[i]);
    sum_bl += beta[i] * losses[i];
  }
  // Ratios of sums: the 1/N_f factors of the three means cancel except in
  // z_hat itself.
  const double n = static_cast<double>(beta.size());
  GibbsEstimates out;
  out.z_hat = n / sum_b;
  out.kl = std::log(out.z_hat) + sum_blogb / sum_b;
  out.post_emp_loss = sum_bl / sum_b;
  if (out.kl < 0.0) {
    out.kl = 0.0;
    out.kl_clamped = true;
  }
  return out;
}

double pac_bound(double lambda, double delta, double kl, double psi_hat_val) {
  if (!(delta > 0.0 && delta <= 0.5)) throw InvalidConfidence("delta must lie in (0, 0.5]");
  if (!(lambda > 0.0)) throw InvalidInput("lambda must be positive");
  return (kl + std::log(1.0 / delta) + psi_hat_val) / lambda;
}

static void fold_catoni(CatoniConstants& out, const SampleRecord& s, const DataConstants& data) {
  const double a = amplitude_term(data, s.gh);
  out.g1 = std::max(out.g1, 2.0 * s.l_ell * s.l_ell * a * a);
  out.g2 = std::max(out.g2, 2.0 * s.l_ell * s.constants.c *
                                transient_term(s.constants, data.b_q, s.gh, s.s0_norm));
}

CatoniConstants estimate_g1_g2(std::span<const SampleRecord> samples, const DataConstants& data) {
  if (samples.empty()) throw InvalidInput("estimate_g1_g2: empty sample set");
  CatoniConstants out{-std::numeric_limits<double>::infinity(),
                      -std::numeric_limits<double>::infinity()};
  for (const auto& s : samples) fold_catoni(out, s, data);
  return out;
}

CatoniConstants estimate_g1_g2(std::span<const SampleRecord> samples, const DataConstants& data,
                               const ParameterBox& box, const SampleEvaluator& evaluate) {
  if (box.lower.size() != box.upper.size()) {
    throw InvalidInput("estimate_g1_g2: box bounds differ in dimension");
  }
  for (std::size_t i = 0; i < box.lower.size(); ++i) {
    if (!(box.lower[i] <= box.upper[i])) throw InvalidInput("estimate_g1_g2: empty box");
  }
  if (box.draws > 0 && !evaluate) throw InvalidInput("estimate_g1_g2: no evaluator");
  auto out = estimate_g1_g2(samples, data);
  SeededRng rng(box.seed);
  Vector theta(box.lower.size());
  for (std::size_t k = 0; k < box.draws; ++k) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      theta[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * rng.uniform();
    }
    if (const auto rec = evaluate(theta)) fold_catoni(out, *rec, data);
  }
  return out;
}

double catoni_r_n(double lambda, std::size_t n, double delta, double kl,
                  const CatoniConstants& g) {
  check_rate(lambda, n);
  const double nn = static_cast<double>(n);
  return pac_bound(lambda, delta, kl, lambda * lambda / nn * g.g1 + lambda / nn * g.g2);
}

BoundReport assemble_bound(std::span<const SampleRecord> records, std::size_t n, double lambda,
                           double delta, std::uint64_t seed) {
  if (records.empty()) throw InvalidInput("assemble_bound: no samples");
  std::vector<double> losses(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) losses[i] = records[i].emp_loss;
  const auto beta = gibbs_weights(losses, lambda);
  const auto est = gibbs_estimates(beta, losses);

  BoundReport r;
  r.n = n;
  r.seed = seed;
  r.lambda = lambda;
  r.delta = delta;
  r.kl = est.kl;
  r.kl_clamped = est.kl_clamped;
  r.z_hat = est.z_hat;
  r.post_emp_loss = est.post_emp_loss;
  r.psi_hat = psi_hat(records);
  r.r_n = pac_bound(lambda, delta, r.kl, r.psi_hat);
  r.total = r.post_emp_loss + r.r_n;
  r.n_samples = records.size();
  return r;
}

}  // namespace pacrnn
