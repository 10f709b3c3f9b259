#pragma once

// Amplitude and weak-dependence constants of the data process, and the
// induced bounds on a predictor's output process.

#include <optional>

#include "pacrnn/class_s.hpp"
#include "pacrnn/dynsys.hpp"

namespace pacrnn {

struct DataConstants {
  double b_q = 1.0;        // amplitude bound on the stacked [y; x]
  double theta_bar = 0.0;  // theta_inf(1) mixing bound
  double e_inf = 1.0;      // ||e_g(0)||_inf of the generator noise
};

/// Constants of the steady-state output of a class-S generator driven by
/// i.i.d. noise with ||e||_inf <= e_inf:
///   b_q       = 2 e_inf (l_gv + l_v l_gs / (1 - tau))
///   theta_bar = 2 e_inf l_v l_gs / (1 - tau)^2
/// Throws NotClassS when tau >= 1.
DataConstants data_constants(const ClassSConstants& gen, double e_inf);

/// sqrt(n_y) when the output activation saturates (|sigma_g| <= 1 per
/// coordinate, Euclidean norm of the stacked output), nullopt otherwise.
std::optional<double> saturation_bound(const RnnSystem& sys);

/// data_constants with b_q replaced by min(b_q, saturation_bound) when the
/// generator saturates. Valid because every bound is monotone in b_q.
DataConstants effective_data_constants(const RnnSystem& gen, const ClassSConstants& consts,
                                       double e_inf);

struct PredictorMixing {
  double theta_o = 0.0;  // mixing bound of the predictor output process
  double o_inf = 0.0;    // amplitude bound of the predictor output
};

/// theta_o = theta_bar g + b_q h, o_inf = b_q g.
PredictorMixing predictor_mixing(const DataConstants& data, const GhPair& gh);

}  // namespace pacrnn
