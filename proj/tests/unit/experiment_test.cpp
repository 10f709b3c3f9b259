#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "pacrnn/errors.hpp"
#include "pacrnn/experiment.hpp"
#include "pacrnn/io.hpp"

namespace pacrnn {
namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.n_grid = {5, 20, 80};
  cfg.n_seeds = 2;
  cfg.n_f = 200;
  cfg.chain.burn_in = 200;
  cfg.chain.thin = 2;
  return cfg;
}

TEST(Config, Validation) {
  EXPECT_NO_THROW(ExperimentConfig{}.validate());
  auto bad = [](auto mutate) {
    ExperimentConfig cfg;
    mutate(cfg);
    return cfg;
  };
  EXPECT_THROW(bad([](auto& c) { c.lambda_rule.fixed = 0.0; }).validate(), InvalidInput);
  EXPECT_THROW(bad([](auto& c) { c.n_grid = {}; }).validate(), InvalidInput);
  EXPECT_THROW(bad([](auto& c) { c.n_grid = {5, 5}; }).validate(), InvalidInput);
  EXPECT_THROW(bad([](auto& c) { c.n_grid = {9, 5}; }).validate(), InvalidInput);
  EXPECT_THROW(bad([](auto& c) { c.delta = 0.6; }).validate(), InvalidConfidence);
  EXPECT_THROW(bad([](auto& c) { c.tau_max = 1.0; }).validate(), InvalidInput);
  EXPECT_THROW(bad([](auto& c) { c.prior_sigma2 = 0.0; }).validate(), InvalidInput);
  EXPECT_THROW(bad([](auto& c) { c.n_seeds = 0; }).validate(), InvalidInput);
  EXPECT_THROW(bad([](auto& c) { c.loss = {LossKind::softmax_xent, 2}; }).validate(),
               InvalidInput);
}

TEST(Config, ChainForDerivesStepsAndSeed) {
  const ExperimentConfig cfg;
  const auto c = cfg.chain_for(3);
  EXPECT_EQ(c.steps, cfg.chain.burn_in + cfg.n_f * cfg.chain.thin);
  EXPECT_EQ(c.retained(), cfg.n_f);
  EXPECT_EQ(c.seed, mix_seed(3, 1));
}

TEST(LambdaRule, Values) {
  EXPECT_EQ(LambdaRule{}.at(49), 7.0);
  EXPECT_EQ(LambdaRule{2.5}.at(49), 2.5);
}

TEST(PredictorShape, FlattenRoundTrip) {
  Vector theta(PredictorShape::dim);
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = 0.1 * double(i) - 0.55;
  const RnnSystem s = PredictorShape::system(theta);
  EXPECT_EQ(s.n_s(), 2u);
  EXPECT_EQ(s.n_v(), 1u);
  EXPECT_EQ(s.n_y(), 1u);
  EXPECT_EQ(s.sigma_f.kind, ActivationKind::relu);
  EXPECT_EQ(s.sigma_g.kind, ActivationKind::tanh);
  EXPECT_EQ(s.a(0, 1), theta[1]);
  EXPECT_EQ(s.d(0, 0), theta[10]);
  EXPECT_EQ(PredictorShape::flatten(s, PredictorShape::initial_state(theta)), theta);
  EXPECT_THROW(PredictorShape::system(Vector(13)), InvalidInput);
}

TEST(Generator, ModelJsonRoundTripIsBitExact) {
  const RnnSystem g = build_paper_generator();
  EXPECT_EQ(model_from_json(model_to_json(g)), g);
}

TEST(GenerateDataset, BoundsAndDeterminism) {
  const auto d = generate_dataset(4, 2000, 1.0, 1.27);
  ASSERT_EQ(d.size(), 2000u);
  for (std::size_t t = 0; t < d.size(); ++t) {
    ASSERT_EQ(d.inputs[t].size(), 1u);
    ASSERT_EQ(d.outputs[t].size(), 1u);
    const double y = d.outputs[t][0], x = d.inputs[t][0];
    EXPECT_LT(std::abs(y), 1.0);
    EXPECT_LT(std::abs(x), 1.0);
    EXPECT_LE(std::hypot(y, x), std::sqrt(2.0));
  }
  const auto again = generate_dataset(4, 2000, 1.0, 1.27);
  EXPECT_EQ(d.inputs, again.inputs);
  EXPECT_EQ(d.outputs, again.outputs);
  const auto other = generate_dataset(5, 2000, 1.0, 1.27);
  EXPECT_NE(d.outputs, other.outputs);
}

TEST(GenerateDataset, ShorterIsPrefix) {
  const auto longer = generate_dataset(1, 100, 1.0, 1.27);
  const auto shorter = generate_dataset(1, 10, 1.0, 1.27);
  for (std::size_t t = 0; t < 10; ++t) {
    EXPECT_EQ(shorter.inputs[t], longer.inputs[t]);
    EXPECT_EQ(shorter.outputs[t], longer.outputs[t]);
  }
}

TEST(TruncatedPrior, Support) {
  const auto ld = truncated_prior(0.02, 0.995);
  Vector theta(PredictorShape::dim, 0.0);
  EXPECT_EQ(ld(theta), 0.0);
  theta[0] = 0.2;
  EXPECT_DOUBLE_EQ(ld(theta), -0.5 * 0.04 / 0.02);
  theta[0] = 1.0;
  theta[3] = 1.0;
  EXPECT_EQ(ld(theta), -std::numeric_limits<double>::infinity());
  theta[0] = 0.996;
  theta[3] = 0.0;
  EXPECT_EQ(ld(theta), -std::numeric_limits<double>::infinity());
}

TEST(PrefixLosses, MatchEmpiricalLoss) {
  const auto data = generate_dataset(0, 50, 1.0, 1.27);
  const auto dc = effective_data_constants(build_paper_generator(),
                                           rnn_constants(build_paper_generator()), 1.27);
  SeededRng rng(61);
  std::vector<SampleRecord> recs;
  for (int i = 0; i < 20; ++i) {
    Vector theta(PredictorShape::dim);
    for (double& x : theta) x = 0.15 * rng.normal();
    recs.push_back(certify_sample(theta, LossSpec{}, dc));
  }
  const std::vector<std::size_t> ns{1, 7, 50};
  const auto l1 = prefix_losses(recs, LossSpec{}, data, ns, 1);
  const auto l3 = prefix_losses(recs, LossSpec{}, data, ns, 3);
  EXPECT_EQ(l1, l3);
  for (std::size_t j = 0; j < ns.size(); ++j) {
    Trajectory prefix;
    prefix.inputs.assign(data.inputs.begin(), data.inputs.begin() + ns[j]);
    prefix.outputs.assign(data.outputs.begin(), data.outputs.begin() + ns[j]);
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const RnnSystem p = PredictorShape::system(recs[i].theta);
      EXPECT_EQ(l1[j][i],
                empirical_loss(LossSpec{}, p, PredictorShape::initial_state(recs[i].theta), prefix));
    }
  }
  const std::vector<std::size_t> too_long{51};
  EXPECT_THROW(prefix_losses(recs, LossSpec{}, data, too_long, 1), InvalidInput);
}

TEST(CertifySample, Fields) {
  Vector theta(PredictorShape::dim, 0.0);
  theta[0] = 0.5;
  theta[8] = 0.3;
  theta[12] = 3.0;
  theta[13] = 4.0;
  const DataConstants d{1.4, 2.0, 1.27};
  const auto r = certify_sample(theta, LossSpec{}, d);
  EXPECT_EQ(r.s0_norm, 5.0);
  EXPECT_NEAR(r.constants.tau, 0.5, 1e-15);
  EXPECT_NEAR(r.constants.l_gs, 0.3, 1e-15);
  EXPECT_EQ(r.l_ell, 2.0 * d.b_q * r.gh.g);
}

TEST(RunSeed, ReportsAndInvariants) {
  const auto cfg = small_config();
  const auto run = run_seed(cfg, 0);
  ASSERT_EQ(run.reports.size(), cfg.n_grid.size());
  ASSERT_EQ(run.records.size(), cfg.n_f);
  for (std::size_t j = 0; j < run.reports.size(); ++j) {
    const auto& r = run.reports[j];
    EXPECT_EQ(r.n, cfg.n_grid[j]);
    EXPECT_EQ(r.lambda, std::sqrt(double(r.n)));
    EXPECT_EQ(r.n_samples, cfg.n_f);
    EXPECT_EQ(r.total, r.post_emp_loss + r.r_n);
    EXPECT_GE(r.kl, 0.0);
  }
  double lo = 1e300, hi = -1e300;
  for (const auto& rec : run.records) {
    EXPECT_LT(rec.constants.tau, cfg.tau_max);
    EXPECT_TRUE(std::isfinite(rec.psi1_exp));
    EXPECT_TRUE(std::isfinite(rec.psi2_exp));
    lo = std::min(lo, rec.emp_loss);
    hi = std::max(hi, rec.emp_loss);
  }
  EXPECT_GE(run.reports.back().post_emp_loss, lo);
  EXPECT_LE(run.reports.back().post_emp_loss, hi);
}

TEST(RunSeed, DoublingNHalvesPsi2WithFixedLambda) {
  auto cfg = small_config();
  cfg.lambda_rule.fixed = 3.0;
  cfg.n_grid = {40, 80};
  auto run = run_seed(cfg, 1);
  const DataConstants d = effective_data_constants(build_paper_generator(),
                                                   rnn_constants(build_paper_generator()),
                                                   cfg.e_inf);
  auto at_40 = run.records;
  refresh_exponents(at_40, d, 3.0, 40);
  for (std::size_t i = 0; i < at_40.size(); ++i) {
    EXPECT_EQ(run.records[i].psi2_exp, 0.5 * at_40[i].psi2_exp);
  }
}

TEST(RunExperiment, ThreadCountDoesNotChangeResults) {
  auto cfg = small_config();
  const auto a = run_experiment(cfg);
  cfg.threads = 4;
  const auto b = run_experiment(cfg);
  std::ostringstream sa, sb;
  write_reports_csv(sa, a);
  write_reports_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  ASSERT_EQ(a.size(), cfg.n_grid.size() * cfg.n_seeds);
  EXPECT_EQ(a[0].seed, cfg.seed);
  EXPECT_EQ(a.back().seed, cfg.seed + cfg.n_seeds - 1);
}

TEST(Summarize, MedianMinMax) {
  std::vector<BoundReport> reports;
  for (std::uint64_t s = 0; s < 4; ++s) {
    BoundReport r;
    r.n = 10;
    r.seed = s;
    r.total = 1.0 + double(s);
    r.post_emp_loss = 0.1 * double(s);
    reports.push_back(r);
  }
  BoundReport extra;
  extra.n = 5;
  extra.total = 9.0;
  reports.push_back(extra);
  const auto rows = summarize(reports);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].n, 5u);
  EXPECT_EQ(rows[1].n_seeds, 4u);
  EXPECT_EQ(rows[1].total_median, 2.5);
  EXPECT_EQ(rows[1].total_min, 1.0);
  EXPECT_EQ(rows[1].total_max, 4.0);
  EXPECT_NEAR(rows[1].emp_median, 0.15, 1e-15);
}

TEST(Crossover, Cases) {
  const std::vector<std::size_t> ns{5, 9, 20, 50};
  EXPECT_EQ(crossover(ns, std::vector<double>{2.0, 0.9, 0.8, 0.7}), 9u);
  EXPECT_EQ(crossover(ns, std::vector<double>{0.5, 1.2, 0.8, 0.7}), 20u);
  EXPECT_EQ(crossover(ns, std::vector<double>{0.5, 0.6, 0.8, 0.7}), 5u);
  EXPECT_FALSE(crossover(ns, std::vector<double>{0.5, 0.6, 0.8, 1.0}).has_value());
  EXPECT_THROW(crossover(ns, std::vector<double>{1.0}), InvalidInput);
}

TEST(EmitCurves, SingleReportGolden) {
  BoundReport r;
  r.n = 9;
  r.seed = 2;
  r.lambda = 3.0;
  r.delta = 0.025;
  r.kl = 0.5;
  r.psi_hat = 1.25;
  r.r_n = 2.0;
  r.post_emp_loss = 0.125;
  r.total = 2.125;
  r.z_hat = 1.5;
  r.n_samples = 100;
  const auto dir = std::filesystem::temp_directory_path() / "pacrnn_emit_single";
  std::filesystem::remove_all(dir);
  emit_curves(std::vector<BoundReport>{r}, dir);
  EXPECT_EQ(read_file(dir / "bound_reports.csv"),
            "N,seed,lambda,delta,kl,psi_hat,r_N,post_emp_loss,total_bound,z_hat,n_samples\n"
            "9,2,3,0.025,0.5,1.25,2,0.125,2.125,1.5,100\n");
  EXPECT_EQ(read_file(dir / "summary.csv"),
            "N,n_seeds,total_median,total_min,total_max,emp_median,emp_min,emp_max,"
            "vacuity_level,non_vacuous\n"
            "9,1,2.125,2.125,2.125,0.125,0.125,0.125,1,0\n");
  EXPECT_EQ(read_file(dir / "crossover.csv"), "seed,n_star\n2,none\nmedian,none\n");
  std::filesystem::remove_all(dir);
  EXPECT_THROW(emit_curves(std::vector<BoundReport>{}, dir), InvalidInput);
}

TEST(EmitCurves, UnwritableDirectoryReportsPath) {
  const auto file = std::filesystem::temp_directory_path() / "pacrnn_not_a_dir";
  std::ofstream(file) << "x";
  try {
    emit_curves(std::vector<BoundReport>{BoundReport{}}, file / "sub");
    FAIL() << "expected Error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("pacrnn_not_a_dir"), std::string::npos);
  }
  std::filesystem::remove(file);
}

}  // namespace
}  // namespace pacrnn
