#include "pacrnn/mixing.hpp"

#include <algorithm>
#include <cmath>

#include "pacrnn/certify.hpp"
#include "pacrnn/errors.hpp"

namespace pacrnn {

DataConstants data_constants(const ClassSConstants& gen, double e_inf) {
  if (!(gen.tau < 1.0)) throw NotClassS("data_constants: generator tau >= 1", gen.tau);
  if (!(e_inf > 0.0) || !std::isfinite(e_inf)) {
    throw InvalidInput("data_constants: e_inf must be positive and finite");
  }
  const double one_minus = 1.0 - gen.tau;
  const double gain = gen.l_v * gen.l_gs;
  DataConstants out;
  out.e_inf = e_inf;
  out.b_q = 2.0 * e_inf * (gen.l_gv + gain / one_minus);
  out.theta_bar = 2.0 * e_inf * gain / (one_minus * one_minus);
  return out;
}

std::optional<double> saturation_bound(const RnnSystem& sys) {
  if (!sys.sigma_g.saturating()) return std::nullopt;
  return std::sqrt(static_cast<double>(sys.n_y()));
}

DataConstants effective_data_constants(const RnnSystem& gen, const ClassSConstants& consts,
                                       double e_inf) {
  DataConstants out = data_constants(consts, e_inf);
  if (auto sat = saturation_bound(gen)) out.b_q = std::min(out.b_q, *sat);
  return out;
}

PredictorMixing predictor_mixing(const DataConstants& data, const GhPair& gh) {
  return {data.theta_bar * gh.g + data.b_q * gh.h, data.b_q * gh.g};
}

}  // namespace pacrnn
