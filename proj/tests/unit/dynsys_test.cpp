#include <cmath>

#include <gtest/gtest.h>

#include "pacrnn/certify.hpp"
#include "pacrnn/dynsys.hpp"
#include "pacrnn/errors.hpp"
#include "pacrnn/experiment.hpp"
#include "test_support.hpp"

namespace pacrnn {
namespace {

using testing::distance;
using testing::random_contractive;
using testing::random_inputs;

RnnSystem zero_system(std::size_t n_s, std::size_t n_v, std::size_t n_y) {
  RnnSystem s;
  s.a = Matrix(n_s, n_s);
  s.b = Matrix(n_s, n_v);
  s.b_s = Vector(n_s, 0.0);
  s.c = Matrix(n_y, n_s);
  s.d = Matrix(n_y, n_v);
  s.b_y = Vector(n_y, 0.0);
  return s;
}

TEST(Activation, TableValues) {
  EXPECT_EQ(Activation{ActivationKind::relu}.lipschitz(), 1.0);
  EXPECT_EQ(Activation{ActivationKind::tanh}.lipschitz(), 1.0);
  EXPECT_EQ(Activation{ActivationKind::sigmoid}.lipschitz(), 0.25);
  EXPECT_EQ(Activation{ActivationKind::identity}.lipschitz(), 1.0);
  EXPECT_EQ(Activation{ActivationKind::relu}(-2.0), 0.0);
  EXPECT_EQ(Activation{ActivationKind::sigmoid}(0.0), 0.5);
  EXPECT_TRUE(Activation{ActivationKind::tanh}.saturating());
  EXPECT_FALSE(Activation{ActivationKind::relu}.saturating());
}

TEST(Activation, ParseRoundTrip) {
  for (auto k : {ActivationKind::relu, ActivationKind::tanh, ActivationKind::sigmoid,
                 ActivationKind::identity}) {
    const Activation a{k};
    EXPECT_EQ(Activation::parse(a.name()), a);
  }
  EXPECT_EQ(Activation::parse("linear").kind, ActivationKind::identity);
  EXPECT_THROW(Activation::parse("softplus"), InvalidInput);
}

TEST(Simulate, ZeroSystem) {
  const RnnSystem s = zero_system(3, 2, 1);
  const std::vector<Vector> inputs{{1, 2}, {3, 4}, {-5, 6}};
  const auto r = simulate(s, Vector{0, 0, 0}, inputs);
  ASSERT_EQ(r.states.size(), 3u);
  for (const auto& x : r.states)
    for (double v : x) EXPECT_EQ(v, 0.0);
  for (const auto& y : r.outputs) EXPECT_EQ(y[0], 0.0);
}

TEST(Simulate, PureDelay) {
  RnnSystem s = zero_system(2, 2, 2);
  s.b = Matrix::identity(2);
  const std::vector<Vector> inputs{{0.3, -0.7}, {0.0, 0.0}};
  const auto r = simulate(s, Vector{0, 0}, inputs);
  EXPECT_EQ(r.states[1], (Vector{0.3, -0.7}));
}

TEST(Simulate, DimensionErrors) {
  const RnnSystem s = zero_system(2, 1, 1);
  EXPECT_THROW(simulate(s, Vector{0}, std::vector<Vector>{{1}}), InvalidInput);
  EXPECT_THROW(simulate(s, Vector{0, 0}, std::vector<Vector>{{1, 2}}), InvalidInput);
  RnnSystem bad = s;
  bad.b_y = {};
  EXPECT_THROW(bad.validate(), InvalidInput);
}

// Independent straight-line evaluation of the generator equations.
TEST(Simulate, GeneratorMatchesStraightLineReference) {
  const RnnSystem g = build_paper_generator();
  SeededRng rng(0);
  std::vector<Vector> inputs;
  for (int t = 0; t < 5; ++t) inputs.push_back(truncated_gaussian(rng, 1.0, 1.27, 2));
  const auto r = simulate(g, Vector{0.0, 0.0}, inputs);

  double s0 = 0.0, s1 = 0.0;
  for (int t = 0; t < 5; ++t) {
    const double v0 = inputs[t][0], v1 = inputs[t][1];
    const double y0 = std::tanh(0.05 * s0 + -0.10 * s1 + 0.09 * v0 + -0.11 * v1 + -0.53);
    const double y1 = std::tanh(-0.11 * s0 + 0.01 * s1 + 0.05 * v0 + -0.16 * v1 + -0.79);
    EXPECT_EQ(r.outputs[t][0], y0) << "t=" << t;
    EXPECT_EQ(r.outputs[t][1], y1) << "t=" << t;
    EXPECT_EQ(r.states[t][0], s0);
    EXPECT_EQ(r.states[t][1], s1);
    const double n0 = std::max(0.0, 0.52 * s0 + 0.23 * s1 + -0.82 * v0 + -0.45 * v1 + 0.38);
    const double n1 = std::max(0.0, 0.23 * s0 + -0.52 * s1 + 0.36 * v0 + -0.96 * v1 + -0.06);
    s0 = n0;
    s1 = n1;
  }
}

TEST(Simulate, TanhOutputsBounded) {
  SeededRng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const RnnSystem s = random_contractive(rng, 3, 2, 2, 0.9);
    const auto r = simulate(s, Vector{5, -5, 5}, random_inputs(rng, 100, 2, 3.0));
    for (const auto& y : r.outputs)
      for (double v : y) {
        EXPECT_GT(v, -1.0);
        EXPECT_LT(v, 1.0);
      }
  }
}

TEST(StepInto, MatchesNextStateAndOutput) {
  SeededRng rng(4);
  const RnnSystem s = random_contractive(rng, 3, 2, 2, 0.8);
  const Vector x{0.1, -0.2, 0.3}, v{0.5, -1.0};
  Vector next(3), y(2);
  s.step_into(x, v, next, y);
  EXPECT_EQ(next, s.next_state(x, v));
  EXPECT_EQ(y, s.output(x, v));
}

TEST(BurnInLength, Examples) {
  const ClassSConstants c{1.0, 0.5, 1.0, 1.0, 1.0};
  EXPECT_EQ(burn_in_length(c, 0.5, 0.5, std::ldexp(1.0, -20)), 20u);
  EXPECT_EQ(burn_in_length(ClassSConstants{1.0, 0.0, 1, 1, 1}, 1.0, 1.0, 1e-9), 1u);
  EXPECT_EQ(burn_in_length(c, 0.5, 0.5, 1.0), 0u);
  EXPECT_EQ(burn_in_length(c, 0.5, 0.5, 2.0), 0u);
  EXPECT_THROW(burn_in_length(ClassSConstants{1.0, 1.0, 1, 1, 1}, 1.0, 1.0, 1e-9), NotClassS);
  EXPECT_THROW(burn_in_length(c, 0.5, 0.5, 0.0), InvalidInput);
}

TEST(BurnInLength, IsMinimal) {
  for (double tau : {0.1, 0.5, 0.9, 0.99}) {
    const ClassSConstants c{1.5, tau, 1, 1, 1};
    const std::size_t t = burn_in_length(c, 2.0, 3.0, 1e-6);
    ASSERT_GT(t, 0u);
    EXPECT_LE(1.5 * std::pow(tau, double(t)) * 5.0, 1e-6 * (1 + 1e-12));
    EXPECT_GT(1.5 * std::pow(tau, double(t - 1)) * 5.0, 1e-6);
  }
}

TEST(SteadyState, ZeroBurnInIsPlainSimulation) {
  SeededRng rng(8);
  const RnnSystem s = random_contractive(rng, 2, 1, 1, 0.7);
  const auto inputs = random_inputs(rng, 30, 1, 1.0);
  EXPECT_EQ(steady_state_outputs(s, inputs, 0), simulate(s, Vector{0, 0}, inputs).outputs);
  EXPECT_THROW(steady_state_outputs(s, inputs, 30), InvalidInput);
}

TEST(SteadyState, ForgetsInitialState) {
  SeededRng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const RnnSystem s = random_contractive(rng, 3, 2, 2, 0.3 + 0.6 * rng.uniform());
    const auto c = rnn_constants(s);
    const double in_bound = 1.27 * std::sqrt(2.0);
    const double steady = steady_state_bound(s, c.tau, in_bound);
    const Vector s0a{3.0, -1.0, 2.0}, s0b{-2.0, 0.5, 0.0};
    const double s0_bound = std::max(norm2(s0a), norm2(s0b));
    const std::size_t burn = burn_in_length(c, s0_bound, steady, 1e-9);
    const auto inputs = random_inputs(rng, burn + 20, 2, 1.27);
    const auto ra = simulate(s, s0a, inputs);
    const auto rb = simulate(s, s0b, inputs);
    for (std::size_t t = burn; t < inputs.size(); ++t) {
      EXPECT_LE(distance(ra.outputs[t], rb.outputs[t]), 2.0 * c.l_gs * 1e-9 + 1e-15);
    }
  }
}

TEST(SteadyState, ConstantInputConvergesToFixedPoint) {
  SeededRng rng(12);
  const RnnSystem s = random_contractive(rng, 3, 2, 2, 0.6);
  const Vector u{0.4, -0.9};
  // Fixed-point iteration oracle for s* = f(s*, u), run far past convergence.
  Vector x(3, 0.0);
  for (int k = 0; k < 2000; ++k) x = s.next_state(x, u);
  const Vector y_star = s.output(x, u);
  const auto c = rnn_constants(s);
  const std::size_t burn =
      burn_in_length(c, 0.0, steady_state_bound(s, c.tau, norm2(u)), 1e-12);
  const std::vector<Vector> inputs(burn + 5, u);
  for (const auto& y : steady_state_outputs(s, inputs, burn)) {
    EXPECT_LE(distance(y, y_star), 1e-11);
  }
}

TEST(SteadyState, BoundDominatesTrajectoryNorm) {
  SeededRng rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const RnnSystem s = random_contractive(rng, 3, 2, 1, 0.9);
    const auto c = rnn_constants(s);
    const double bound = steady_state_bound(s, c.tau, 1.0 * std::sqrt(2.0));
    const auto r = simulate(s, Vector{0, 0, 0}, random_inputs(rng, 500, 2, 1.0));
    for (const auto& x : r.states) EXPECT_LE(norm2(x), bound);
  }
}

TEST(Cascade, BlockwiseEqualsStacked) {
  SeededRng rng(15);
  const Cascade cas{random_contractive(rng, 2, 1, 2, 0.5), random_contractive(rng, 3, 2, 1, 0.7)};
  const auto inputs = random_inputs(rng, 40, 1, 1.0);
  const Vector s0{0.1, 0.2, -0.3, 0.4, 0.5};
  const auto a = cas.simulate_blockwise(s0, inputs);
  const auto b = cas.simulate_stacked(s0, inputs);
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.outputs, b.outputs);
}

}  // namespace
}  // namespace pacrnn
