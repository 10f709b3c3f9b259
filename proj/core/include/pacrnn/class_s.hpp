#pragma once

namespace pacrnn {

/// Certificate constants of a class-S system.
///
///   ||s(t) - s_v(t)|| <= c * tau^(t - t0) * ||s(t0) - s_v(t0)||   (UEC)
///   l_v:  input-to-state sensitivity
///   l_gs: output map Lipschitz constant in the state
///   l_gv: output map Lipschitz constant in the input
struct ClassSConstants {
  double c = 1.0;
  double tau = 0.0;
  double l_v = 0.0;
  double l_gs = 0.0;
  double l_gv = 0.0;

  /// c >= 1, 0 <= tau < 1, Lipschitz constants finite and non-negative.
  bool valid() const noexcept;

  friend bool operator==(const ClassSConstants&, const ClassSConstants&) = default;
};

/// Robustness aggregates of a predictor certificate:
///   g = l_gs * l_v / (1 - tau) + l_gv
///   h = l_gs * l_v / (1 - tau)^2
struct GhPair {
  double g = 0.0;
  double h = 0.0;
};

}  // namespace pacrnn
