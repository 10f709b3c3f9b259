#include "pacrnn/loss.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "pacrnn/certify.hpp"
#include "pacrnn/errors.hpp"

namespace pacrnn {

void LossSpec::validate() const {
  if (kind == LossKind::softmax_xent && classes < 2) {
    throw InvalidInput("softmax loss needs at least 2 classes");
  }
}

double loss_value(const LossSpec& spec, std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) {
    throw InvalidInput("loss_value: label has dimension " + std::to_string(y.size()) +
                       ", prediction " + std::to_string(yhat.size()));
  }
  if (spec.kind == LossKind::square) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double e = yhat[i] - y[i];
      s += e * e;
    }
    return s;
  }

  if (yhat.size() != spec.classes) {
    throw InvalidInput("loss_value: softmax over " + std::to_string(spec.classes) +
                       " classes got a prediction of dimension " + std::to_string(yhat.size()));
  }
  double mx = yhat.empty() ? 0.0 : yhat[0];
  for (double v : yhat) mx = std::max(mx, v);
  double z = 0.0;
  for (double v : yhat) z += std::exp(v - mx);
  const double lse = mx + std::log(z);
  double loss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] >= 0.0 && y[i] <= 1.0)) throw InvalidInput("loss_value: soft label outside [0,1]");
    loss -= y[i] * (yhat[i] - lse);
  }
  return loss;
}

double loss_lipschitz(const LossSpec& spec, const DataConstants& data, const GhPair& gh,
                      LossLipschitzOptions opts) {
  if (spec.kind == LossKind::square) {
    return 2.0 * data.b_q * (opts.conservative ? gh.g + 1.0 : gh.g);
  }
  const double k = static_cast<double>(spec.classes);
  return k * (2.0 * data.b_q * gh.g + std::log(k) + 2.0);
}

namespace {

// Mean loss over t in [from, N) with the predictor started at s0 at t = 0.
double windowed_loss(const LossSpec& spec, const RnnSystem& pred, std::span<const double> s0,
                     const Trajectory& data, std::size_t from) {
  if (data.inputs.size() != data.outputs.size()) {
    throw InvalidInput("trajectory input/output lengths differ");
  }
  if (from >= data.size()) throw InvalidInput("empty loss window");
  if (s0.size() != pred.n_s()) throw InvalidInput("initial state dimension != n_s");
  for (std::size_t t = 0; t < data.size(); ++t) {
    if (data.inputs[t].size() != pred.n_v()) {
      throw InvalidInput("trajectory input dimension " + std::to_string(data.inputs[t].size()) +
                         " != predictor n_v " + std::to_string(pred.n_v()));
    }
    if (data.outputs[t].size() != pred.n_y()) {
      throw InvalidInput("trajectory label dimension != predictor n_y");
    }
  }
  std::vector<double> s(s0.begin(), s0.end());
  std::vector<double> next(pred.n_s());
  std::vector<double> yhat(pred.n_y());
  double total = 0.0;
  for (std::size_t t = 0; t < data.size(); ++t) {
    pred.step_into(s, data.inputs[t], next, yhat);
    if (t >= from) total += loss_value(spec, data.outputs[t], yhat);
    s.swap(next);
  }
  return total / static_cast<double>(data.size() - from);
}

}  // namespace

double empirical_loss(const LossSpec& spec, const RnnSystem& pred, std::span<const double> s0,
                      const Trajectory& data) {
  return windowed_loss(spec, pred, s0, data, 0);
}

double infinite_horizon_loss(const LossSpec& spec, const RnnSystem& pred,
                             const Trajectory& data_with_prefix, std::size_t burn_in) {
  if (burn_in >= data_with_prefix.size()) {
    throw InvalidInput("infinite_horizon_loss: burn-in leaves no samples");
  }
  const std::vector<double> zero(pred.n_s(), 0.0);
  return windowed_loss(spec, pred, zero, data_with_prefix, burn_in);
}

double transient_gap_bound(const ClassSConstants& c, double l_ell, double b_q, double s0_norm,
                           std::size_t n) {
  if (n == 0) throw InvalidInput("transient_gap_bound: n must be positive");
  const GhPair gh = g_and_h(c);
  return (l_ell * c.c / static_cast<double>(n)) *
         (2.0 * b_q * gh.h + s0_norm * c.l_gs / (1.0 - c.tau));
}

}  // namespace pacrnn
