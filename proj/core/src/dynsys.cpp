#include "pacrnn/dynsys.hpp"

#include <cmath>
#include <string>

#include "pacrnn/errors.hpp"

namespace pacrnn {

double Activation::lipschitz() const noexcept {
  return kind == ActivationKind::sigmoid ? 0.25 : 1.0;
}

double Activation::operator()(double x) const noexcept {
  switch (kind) {
    case ActivationKind::relu:
      return x > 0.0 ? x : 0.0;
    case ActivationKind::tanh:
      return std::tanh(x);
    case ActivationKind::sigmoid:
      return 1.0 / (1.0 + std::exp(-x));
    case ActivationKind::identity:
      break;
  }
  return x;
}

bool Activation::saturating() const noexcept {
  return kind == ActivationKind::tanh || kind == ActivationKind::sigmoid;
}

std::string_view Activation::name() const noexcept {
  switch (kind) {
    case ActivationKind::relu:
      return "relu";
    case ActivationKind::tanh:
      return "tanh";
    case ActivationKind::sigmoid:
      return "sigmoid";
    case ActivationKind::identity:
      break;
  }
  return "identity";
}

Activation Activation::parse(std::string_view name) {
  if (name == "relu") return {ActivationKind::relu};
  if (name == "tanh") return {ActivationKind::tanh};
  if (name == "sigmoid") return {ActivationKind::sigmoid};
  if (name == "identity" || name == "linear") return {ActivationKind::identity};
  throw InvalidInput("unknown activation '" + std::string(name) + "'");
}

void RnnSystem::validate() const {
  const std::size_t ns = a.rows();
  if (ns == 0 || !a.square()) throw InvalidInput("RnnSystem: A must be square and non-empty");
  if (b.rows() != ns || b_s.size() != ns) throw InvalidInput("RnnSystem: B/b_s row count != n_s");
  if (c.cols() != ns) throw InvalidInput("RnnSystem: C column count != n_s");
  if (d.rows() != c.rows() || d.cols() != b.cols() || b_y.size() != c.rows()) {
    throw InvalidInput("RnnSystem: D/b_y shape inconsistent with C and B");
  }
  if (c.rows() == 0) throw InvalidInput("RnnSystem: n_y must be positive");
  auto finite = [](const Vector& v) {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  };
  if (!a.all_finite() || !b.all_finite() || !c.all_finite() || !d.all_finite() || !finite(b_s) ||
      !finite(b_y)) {
    throw InvalidInput("RnnSystem: non-finite weight");
  }
}

namespace {

// out = sigma(m1 x1 + m2 x2 + bias), accumulated in a fixed order.
void affine_activate_into(const Matrix& m1, std::span<const double> x1, const Matrix& m2,
                          std::span<const double> x2, const Vector& bias, const Activation& sigma,
                          std::span<double> out) noexcept {
  for (std::size_t r = 0; r < m1.rows(); ++r) {
    double z = 0.0;
    for (std::size_t k = 0; k < m1.cols(); ++k) z += m1(r, k) * x1[k];
    for (std::size_t k = 0; k < m2.cols(); ++k) z += m2(r, k) * x2[k];
    out[r] = sigma(z + bias[r]);
  }
}

Vector affine_activate(const Matrix& m1, std::span<const double> x1, const Matrix& m2,
                       std::span<const double> x2, const Vector& bias, const Activation& sigma) {
  Vector out(m1.rows());
  affine_activate_into(m1, x1, m2, x2, bias, sigma, out);
  return out;
}

void check_dims(const RnnSystem& sys, std::span<const double> s, std::span<const double> v) {
  if (s.size() != sys.n_s()) {
    throw InvalidInput("state has dimension " + std::to_string(s.size()) + ", expected " +
                       std::to_string(sys.n_s()));
  }
  if (v.size() != sys.n_v()) {
    throw InvalidInput("input has dimension " + std::to_string(v.size()) + ", expected " +
                       std::to_string(sys.n_v()));
  }
}

}  // namespace

Vector RnnSystem::next_state(std::span<const double> s, std::span<const double> v) const {
  check_dims(*this, s, v);
  return affine_activate(a, s, b, v, b_s, sigma_f);
}

Vector RnnSystem::output(std::span<const double> s, std::span<const double> v) const {
  check_dims(*this, s, v);
  return affine_activate(c, s, d, v, b_y, sigma_g);
}

void RnnSystem::step_into(std::span<const double> s, std::span<const double> v,
                          std::span<double> next, std::span<double> y) const noexcept {
  affine_activate_into(c, s, d, v, b_y, sigma_g, y);
  affine_activate_into(a, s, b, v, b_s, sigma_f, next);
}

void Trajectory::validate() const {
  if (inputs.size() != outputs.size()) throw InvalidInput("Trajectory: input/output length mismatch");
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    if (inputs[t].size() != inputs.front().size() || outputs[t].size() != outputs.front().size()) {
      throw InvalidInput("Trajectory: ragged sample at t=" + std::to_string(t));
    }
    for (double x : inputs[t])
      if (!std::isfinite(x)) throw InvalidInput("Trajectory: non-finite input");
    for (double x : outputs[t])
      if (!std::isfinite(x)) throw InvalidInput("Trajectory: non-finite output");
  }
}

SimulationResult simulate(const RnnSystem& sys, std::span<const double> s0,
                          std::span<const Vector> inputs) {
  SimulationResult r;
  r.states.reserve(inputs.size());
  r.outputs.reserve(inputs.size());
  Vector s(s0.begin(), s0.end());
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    r.outputs.push_back(sys.output(s, inputs[t]));
    Vector next = sys.next_state(s, inputs[t]);
    r.states.push_back(std::move(s));
    s = std::move(next);
  }
  return r;
}

std::size_t burn_in_length(const ClassSConstants& consts, double s0_bound, double steady_bound,
                           double tol) {
  if (!(consts.tau < 1.0)) throw NotClassS("burn_in_length: tau >= 1", consts.tau);
  if (!(tol > 0.0)) throw InvalidInput("burn_in_length: tol must be positive");
  double err = consts.c * (s0_bound + steady_bound);
  std::size_t t = 0;
  while (err > tol) {
    err *= consts.tau;
    ++t;
  }
  return t;
}

double steady_state_bound(const RnnSystem& sys, double tau, double input_bound) {
  if (!(tau < 1.0)) throw NotClassS("steady_state_bound: tau >= 1", tau);
  Vector at_origin(sys.n_s());
  for (std::size_t i = 0; i < sys.n_s(); ++i) at_origin[i] = sys.sigma_f(0.0);
  const double drive = spectral_norm(sys.b) * input_bound + norm2(sys.b_s);
  return (norm2(at_origin) + sys.sigma_f.lipschitz() * drive) / (1.0 - tau);
}

std::vector<Vector> steady_state_outputs(const RnnSystem& sys, std::span<const Vector> inputs,
                                         std::size_t burn_in) {
  if (burn_in >= inputs.size()) {
    throw InvalidInput("steady_state_outputs: burn-in " + std::to_string(burn_in) +
                       " leaves no samples out of " + std::to_string(inputs.size()));
  }
  const Vector s0(sys.n_s(), 0.0);
  auto sim = simulate(sys, s0, inputs);
  return {std::make_move_iterator(sim.outputs.begin() + static_cast<std::ptrdiff_t>(burn_in)),
          std::make_move_iterator(sim.outputs.end())};
}

SimulationResult Cascade::simulate_blockwise(std::span<const double> s0,
                                             std::span<const Vector> inputs) const {
  auto r1 = simulate(first, s0.subspan(0, first.n_s()), inputs);
  auto r2 = simulate(second, s0.subspan(first.n_s()), r1.outputs);
  SimulationResult r;
  r.outputs = std::move(r2.outputs);
  r.states.resize(inputs.size());
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    r.states[t] = r1.states[t];
    r.states[t].insert(r.states[t].end(), r2.states[t].begin(), r2.states[t].end());
  }
  return r;
}

SimulationResult Cascade::simulate_stacked(std::span<const double> s0,
                                           std::span<const Vector> inputs) const {
  if (s0.size() != n_s()) throw InvalidInput("Cascade: stacked state has wrong dimension");
  SimulationResult r;
  Vector s(s0.begin(), s0.end());
  const std::size_t n1 = first.n_s();
  for (const auto& v : inputs) {
    std::span<const double> s1(s.data(), n1);
    std::span<const double> s2(s.data() + n1, s.size() - n1);
    const Vector y1 = first.output(s1, v);
    r.outputs.push_back(second.output(s2, y1));
    Vector next = first.next_state(s1, v);
    const Vector next2 = second.next_state(s2, y1);
    next.insert(next.end(), next2.begin(), next2.end());
    r.states.push_back(std::move(s));
    s = std::move(next);
  }
  return r;
}

}  // namespace pacrnn
