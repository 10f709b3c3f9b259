#include "pacrnn/certify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pacrnn/errors.hpp"

namespace pacrnn {

bool ClassSConstants::valid() const noexcept {
  auto ok = [](double x) { return std::isfinite(x) && x >= 0.0; };
  return std::isfinite(c) && c >= 1.0 && tau >= 0.0 && tau < 1.0 && ok(l_v) && ok(l_gs) &&
         ok(l_gv);
}

ContractionCertificate check_contraction(const RnnSystem& sys) {
  sys.validate();
  const double tau = sys.sigma_f.lipschitz() * spectral_norm(sys.a);
  return {tau < 1.0, tau};
}

ClassSConstants rnn_constants(const RnnSystem& sys, LvConvention lv) {
  const auto cert = check_contraction(sys);
  if (!cert.passed) {
    throw NotClassS("Lip(sigma_f)*||A||_2 = " + std::to_string(cert.tau) + " is not below 1",
                    cert.tau);
  }
  const double lip_f = sys.sigma_f.lipschitz();
  const double lip_g = sys.sigma_g.lipschitz();
  const double norm_b = spectral_norm(sys.b);
  ClassSConstants out;
  out.c = 1.0;
  out.tau = cert.tau;
  out.l_v = lv == LvConvention::proof ? lip_f * norm_b : norm_b / lip_f;
  out.l_gs = lip_g * spectral_norm(sys.c);
  out.l_gv = lip_g * spectral_norm(sys.d);
  return out;
}

std::optional<Matrix> check_linear_lyapunov(const Matrix& a, double mu) {
  if (!a.square()) throw InvalidInput("check_linear_lyapunov: a must be square");
  if (!(mu > 0.0 && mu < 1.0)) throw InvalidInput("check_linear_lyapunov: mu must lie in (0,1)");
  const Matrix eye = Matrix::identity(a.rows());
  // Throws InstabilityError unless a is Schur.
  discrete_lyapunov(a, eye);
  Matrix p;
  try {
    p = discrete_lyapunov((1.0 / std::sqrt(mu)) * a, eye);
  } catch (const InstabilityError&) {
    return std::nullopt;
  }
  // a^T P a - mu P = -mu I in exact arithmetic; accept within 1e-9.
  const Matrix gap = a.transpose() * p * a - mu * p;
  for (std::size_t i = 0; i < gap.rows(); ++i) {
    for (std::size_t j = 0; j < gap.cols(); ++j) {
      const double expected = i == j ? -mu : 0.0;
      if (std::abs(gap(i, j) - expected) > 1e-9 * std::max(1.0, p.frobenius_norm())) {
        return std::nullopt;
      }
    }
  }
  return p;
}

ClassSConstants series_compose(const ClassSConstants& c1, const ClassSConstants& c2,
                               CompositionOptions opts) {
  for (const auto* c : {&c1, &c2}) {
    if (!(c->tau < 1.0)) throw NotClassS("series_compose: tau >= 1", c->tau);
  }
  if (!c1.valid() || !c2.valid()) throw InvalidInput("series_compose: invalid constants");
  double tt = std::max(c1.tau, c2.tau);
  if (tt == 0.0) {
    if (!opts.allow_zero_tau) {
      throw SingularComposition("series_compose: max(tau1, tau2) = 0 makes ln(tau) undefined");
    }
    tt = 1e-12;
  }
  const double g = -2.0 / (std::numbers::e * std::log(tt));
  const double cross_c = g * c2.l_v * c1.l_gs;
  const double cross_v = c2.l_v * g * std::max(c1.l_gs * c1.l_v, c1.l_gv);

  ClassSConstants out;
  out.c = std::sqrt(c1.c * c1.c * (1.0 + cross_c * cross_c / tt) + c2.c * c2.c);
  out.tau = std::sqrt(tt);
  out.l_v = std::sqrt(c1.l_v * c1.l_v + cross_v * cross_v / (tt * tt * tt));
  out.l_gs = c2.l_gs;
  out.l_gv = c2.l_gv;
  return out;
}

ClassSConstants augment_full_generator(const ClassSConstants& gen, const ClassSConstants& pred,
                                       CompositionOptions opts) {
  ClassSConstants passthrough = pred;
  passthrough.l_gv = std::sqrt(pred.l_gv * pred.l_gv + 1.0);
  return series_compose(gen, passthrough, opts);
}

ClassSConstants error_system_constants(const ClassSConstants& gen, const ClassSConstants& pred,
                                       CompositionOptions opts) {
  return augment_full_generator(gen, pred, opts);
}

GhPair g_and_h(const ClassSConstants& c) {
  if (!(c.tau < 1.0)) throw NotClassS("g_and_h: tau >= 1", c.tau);
  const double gain = c.l_gs * c.l_v;
  const double one_minus = 1.0 - c.tau;
  return {gain / one_minus + c.l_gv, gain / (one_minus * one_minus)};
}

}  // namespace pacrnn
