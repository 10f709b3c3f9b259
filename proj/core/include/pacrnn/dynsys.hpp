#pragma once

// RNN-shaped discrete-time state-space systems
//
//   s(t+1) = sigma_f(A s(t) + B v(t) + b_s)
//   y(t)   = sigma_g(C s(t) + D v(t) + b_y)
//
// and their steady-state (infinite past) approximation by burn-in.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pacrnn/class_s.hpp"
#include "pacrnn/numerics.hpp"

namespace pacrnn {

enum class ActivationKind { relu, tanh, sigmoid, identity };

struct Activation {
  ActivationKind kind = ActivationKind::identity;

  /// 1 for relu, tanh and identity; 0.25 for sigmoid.
  double lipschitz() const noexcept;
  double operator()(double x) const noexcept;
  /// True when the image is bounded (tanh, sigmoid).
  bool saturating() const noexcept;

  std::string_view name() const noexcept;
  static Activation parse(std::string_view name);

  friend bool operator==(const Activation&, const Activation&) = default;
};

struct RnnSystem {
  Matrix a;    // n_s x n_s
  Matrix b;    // n_s x n_v
  Vector b_s;  // n_s
  Matrix c;    // n_y x n_s
  Matrix d;    // n_y x n_v
  Vector b_y;  // n_y
  Activation sigma_f;
  Activation sigma_g;

  std::size_t n_s() const noexcept { return a.rows(); }
  std::size_t n_v() const noexcept { return b.cols(); }
  std::size_t n_y() const noexcept { return c.rows(); }

  /// Throws InvalidInput on inconsistent dimensions or non-finite weights.
  void validate() const;

  Vector next_state(std::span<const double> s, std::span<const double> v) const;
  Vector output(std::span<const double> s, std::span<const double> v) const;

  /// Allocation-free step: writes y(t) into `y` and s(t+1) into `next`.
  /// Dimensions are not checked; `next` must not alias `s`.
  void step_into(std::span<const double> s, std::span<const double> v, std::span<double> next,
                 std::span<double> y) const noexcept;

  friend bool operator==(const RnnSystem&, const RnnSystem&) = default;
};

/// A dataset: predictor inputs x(t) and labels y(t), t = 0..N-1.
struct Trajectory {
  std::vector<Vector> inputs;
  std::vector<Vector> outputs;

  std::size_t size() const noexcept { return inputs.size(); }
  void validate() const;
};

struct SimulationResult {
  std::vector<Vector> states;   // s(0)..s(N-1)
  std::vector<Vector> outputs;  // y(0)..y(N-1)
};

SimulationResult simulate(const RnnSystem& sys, std::span<const double> s0,
                          std::span<const Vector> inputs);

/// Smallest T with c * tau^T * (s0_bound + steady_bound) <= tol.
///
/// `steady_bound` bounds the norm of the steady-state trajectory (see
/// steady_state_bound), so the product bounds the distance to it after T
/// steps. Throws NotClassS when tau >= 1.
std::size_t burn_in_length(const ClassSConstants& consts, double s0_bound, double steady_bound,
                           double tol);

/// Norm bound on the steady-state trajectory of a contractive RNN driven by
/// inputs with ||v|| <= input_bound:
///   sup ||f(0, v)|| / (1 - tau),
/// with ||sigma(z)|| <= ||sigma(0)|| + Lip(sigma) ||z||.
double steady_state_bound(const RnnSystem& sys, double tau, double input_bound);

/// Runs from s0 = 0 over the whole input list and drops the first
/// `burn_in` outputs. Throws InvalidInput when burn_in >= inputs.size().
std::vector<Vector> steady_state_outputs(const RnnSystem& sys, std::span<const Vector> inputs,
                                         std::size_t burn_in);

/// Two RNNs in series: the first block's output drives the second block.
struct Cascade {
  RnnSystem first;
  RnnSystem second;

  std::size_t n_s() const noexcept { return first.n_s() + second.n_s(); }

  /// Simulates `first` over the inputs, then `second` over its outputs.
  SimulationResult simulate_blockwise(std::span<const double> s0,
                                      std::span<const Vector> inputs) const;
  /// Simulates the stacked state [s1; s2] one step at a time.
  SimulationResult simulate_stacked(std::span<const double> s0,
                                    std::span<const Vector> inputs) const;
};

}  // namespace pacrnn
