#pragma once

// Loss functions, their Lipschitz certificates, and the finite- and
// infinite-horizon average losses of a recurrent predictor.

#include <cstddef>
#include <span>

#include "pacrnn/class_s.hpp"
#include "pacrnn/dynsys.hpp"
#include "pacrnn/mixing.hpp"

namespace pacrnn {

enum class LossKind { square, softmax_xent };

struct LossSpec {
  LossKind kind = LossKind::square;
  std::size_t classes = 2;  // softmax only, >= 2

  void validate() const;
};

/// square: ||yhat - y||^2.
/// softmax_xent: -sum_i y_i ln softmax(yhat)_i, with soft labels y in [0,1].
double loss_value(const LossSpec& spec, std::span<const double> y, std::span<const double> yhat);

struct LossLipschitzOptions {
  /// Square loss: use 2 b_q (g + 1), which also accounts for the label
  /// amplitude, instead of 2 b_q g.
  bool conservative = false;
};

/// square: 2 b_q g (or 2 b_q (g + 1) when conservative);
/// softmax: K (2 b_q g + ln K + 2).
double loss_lipschitz(const LossSpec& spec, const DataConstants& data, const GhPair& gh,
                      LossLipschitzOptions opts = {});

/// (1/N) sum_t loss(y(t), yhat(t)) with the predictor started at s0.
double empirical_loss(const LossSpec& spec, const RnnSystem& pred, std::span<const double> s0,
                      const Trajectory& data);

/// Average loss over the samples after `burn_in`, with the predictor run
/// from zero over the whole trajectory so that its state has (approximately)
/// forgotten the initial condition by the start of the window.
double infinite_horizon_loss(const LossSpec& spec, const RnnSystem& pred,
                             const Trajectory& data_with_prefix, std::size_t burn_in);

/// (l_ell C / N) (2 b_q h + s0_norm l_gs / (1 - tau)); bounds
/// |infinite_horizon_loss - empirical_loss| for every data realisation.
double transient_gap_bound(const ClassSConstants& c, double l_ell, double b_q, double s0_norm,
                           std::size_t n);

}  // namespace pacrnn
