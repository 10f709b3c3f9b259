#pragma once

// Class-S certificates for RNN-shaped systems and for systems built from
// them by series interconnection.

#include <optional>

#include "pacrnn/class_s.hpp"
#include "pacrnn/dynsys.hpp"
#include "pacrnn/numerics.hpp"

namespace pacrnn {

/// Which input-to-state constant to report for a single RNN layer.
enum class LvConvention {
  /// l_v = Lip(sigma_f) * ||B||_2, the constant the contraction argument yields.
  proof,
  /// l_v = ||B||_2 / Lip(sigma_f), as printed in the summary table of RNN
  /// constants. Kept for comparison runs only.
  table,
};

/// C = 1, tau = Lip(sigma_f)||A||, l_v = Lip(sigma_f)||B||,
/// l_gs = Lip(sigma_g)||C||, l_gv = Lip(sigma_g)||D||.
/// Throws NotClassS (carrying tau) when Lip(sigma_f)||A|| >= 1.
ClassSConstants rnn_constants(const RnnSystem& sys, LvConvention lv = LvConvention::proof);

struct ContractionCertificate {
  bool passed = false;
  double tau = 0.0;  // Lip(sigma_f)||A||, reported on failure too
};

/// f is a contraction in s iff Lip(sigma_f)||A||_2 < 1.
ContractionCertificate check_contraction(const RnnSystem& sys);

/// Quadratic Lyapunov certificate for the linear map s -> a s:
/// P > 0 with a^T P a <= mu P. Obtained from the discrete Lyapunov equation
/// for a / sqrt(mu) with q = I, so a^T P a = mu (P - I).
///
/// Returns nullopt when a is Schur but rho(a)^2 > mu; throws
/// InstabilityError when rho(a) >= 1.
std::optional<Matrix> check_linear_lyapunov(const Matrix& a, double mu);

struct CompositionOptions {
  /// Replace max(tau1, tau2) = 0 by 1e-12 instead of throwing.
  bool allow_zero_tau = false;
};

/// Constants of S1 -> S2 (S1's output drives S2):
///   tau~ = max(tau1, tau2), G = -2 / (e ln tau~)
///   C    = sqrt(C1^2 (1 + (G L2v Lg1s)^2 / tau~) + C2^2)
///   tau  = sqrt(tau~)
///   L_v  = sqrt(L1v^2 + (L2v G max(Lg1s L1v, Lg1v))^2 / tau~^3)
///   l_gs = Lg2s, l_gv = Lg2v
/// Throws SingularComposition when tau~ = 0 (unless allowed), NotClassS when
/// either tau >= 1 and InvalidInput on otherwise invalid constants.
ClassSConstants series_compose(const ClassSConstants& c1, const ClassSConstants& c2,
                               CompositionOptions opts = {});

/// Generator followed by predictor, with the generator's label passed
/// through to the output: the predictor's output constants become
/// (l_gs, sqrt(l_gv^2 + 1)) before series composition.
ClassSConstants augment_full_generator(const ClassSConstants& gen, const ClassSConstants& pred,
                                       CompositionOptions opts = {});

/// Prediction-error system y - yhat. Same constants as the full generator.
ClassSConstants error_system_constants(const ClassSConstants& gen, const ClassSConstants& pred,
                                       CompositionOptions opts = {});

/// Throws NotClassS when tau >= 1.
GhPair g_and_h(const ClassSConstants& c);

}  // namespace pacrnn
