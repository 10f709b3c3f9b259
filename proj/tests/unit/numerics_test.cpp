#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "pacrnn/errors.hpp"
#include "pacrnn/numerics.hpp"
#include "test_support.hpp"

namespace pacrnn {
namespace {

using testing::oracle_spectral_norm;
using testing::random_matrix;
using testing::to_eigen;

TEST(Matrix, ConstructionAndAccess) {
  Matrix m{{1, 2, 3}, {4, 5, 6}};
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 3u);
  EXPECT_EQ(m(1, 2), 6.0);
  EXPECT_EQ(m.transpose()(2, 1), 6.0);
  EXPECT_THROW((Matrix(2, 2, std::vector<double>{1, 2, 3})), InvalidInput);
  EXPECT_THROW((Matrix{{1, 2}, {3}}), InvalidInput);
}

TEST(Matrix, ProductMatchesEigen) {
  SeededRng rng(3);
  const Matrix a = random_matrix(rng, 3, 4);
  const Matrix b = random_matrix(rng, 4, 2);
  const Matrix p = a * b;
  const Eigen::MatrixXd q = to_eigen(a) * to_eigen(b);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 2; ++c) EXPECT_NEAR(p(r, c), q(r, c), 1e-14);
  EXPECT_THROW(a * a, InvalidInput);
}

TEST(SpectralNorm, SymmetricExample) {
  const Matrix a{{0.52, 0.23}, {0.23, -0.52}};
  EXPECT_NEAR(spectral_norm(a), std::sqrt(0.52 * 0.52 + 0.23 * 0.23), 1e-14);
  EXPECT_NEAR(spectral_norm(a), 0.568594, 1e-6);
}

TEST(SpectralNorm, TrivialCases) {
  EXPECT_DOUBLE_EQ(spectral_norm(Matrix::identity(2)), 1.0);
  EXPECT_EQ(spectral_norm(Matrix(3, 2)), 0.0);
  EXPECT_NEAR(spectral_norm(Matrix{{3.0, 4.0}}), 5.0, 1e-14);
  EXPECT_NEAR(spectral_norm(Matrix{{3.0}, {4.0}}), 5.0, 1e-14);
}

TEST(SpectralNorm, StartVectorOrthogonalToDominantDirection) {
  // The all-ones start is orthogonal to (1, -1), the dominant direction.
  const Matrix m{{2.0, -2.0}, {-2.0, 2.0}};
  EXPECT_NEAR(spectral_norm(m + Matrix::identity(2)), 5.0, 1e-12);
  const Matrix d{{1.0, 0.0, 0.0}, {0.0, -3.0, 0.0}, {0.0, 0.0, 2.0}};
  EXPECT_NEAR(spectral_norm(d), 3.0, 1e-12);
}

TEST(SpectralNorm, RepeatedSingularValues) {
  const double c = std::cos(0.3), s = std::sin(0.3);
  EXPECT_NEAR(spectral_norm(0.7 * Matrix{{c, -s}, {s, c}}), 0.7, 1e-12);
  EXPECT_NEAR(spectral_norm(2.5 * Matrix::identity(5)), 2.5, 1e-12);
}

TEST(SpectralNorm, MatchesEigenOracleOnRandomMatrices) {
  SeededRng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t r = 1 + rng.next_u64() % 8;
    const std::size_t c = 1 + rng.next_u64() % 8;
    const Matrix m = random_matrix(rng, r, c);
    const double want = oracle_spectral_norm(m);
    EXPECT_NEAR(spectral_norm(m), want, 1e-10 * want) << r << "x" << c << " trial " << trial;
  }
}

TEST(SpectralNorm, RejectsNonFinite) {
  Matrix m = Matrix::identity(2);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(spectral_norm(m), InvalidInput);
  m(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(spectral_norm(m), InvalidInput);
}

TEST(LogMeanExp, Examples) {
  EXPECT_EQ(log_mean_exp(std::vector<double>{0.0, 0.0}), 0.0);
  EXPECT_EQ(log_mean_exp(std::vector<double>{1000.0, 1000.0}), 1000.0);
  EXPECT_NEAR(log_mean_exp(std::vector<double>{0.0, std::log(3.0)}), std::log(2.0), 1e-15);
  EXPECT_NEAR(log_mean_exp(std::vector<double>{-1e6, 1e6}), 1e6 - std::log(2.0), 1e-9);
}

TEST(LogMeanExp, ShiftInvariance) {
  SeededRng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v = testing::random_vector(rng, 1 + trial % 50, 10.0);
    const double base = log_mean_exp(v);
    const double shift = 100.0 * rng.normal();
    for (double& x : v) x += shift;
    EXPECT_NEAR(log_mean_exp(v), base + shift, 1e-12 * std::max(1.0, std::abs(base + shift)));
  }
}

TEST(LogMeanExp, Errors) {
  EXPECT_THROW(log_mean_exp(std::vector<double>{}), InvalidInput);
  EXPECT_THROW(log_mean_exp(std::vector<double>{0.0, std::nan("")}), InvalidInput);
}

TEST(SeededRng, DeterministicAndInRange) {
  SeededRng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    differs |= (u != c.uniform());
  }
  EXPECT_TRUE(differs);
}

TEST(SeededRng, NormalMoments) {
  SeededRng rng(7);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(SeededRng, MixSeedSeparatesStreams) {
  EXPECT_NE(mix_seed(0, 0), mix_seed(0, 1));
  EXPECT_NE(mix_seed(0, 1), mix_seed(1, 0));
  EXPECT_EQ(mix_seed(9, 3), mix_seed(9, 3));
}

TEST(TruncatedGaussian, RespectsBound) {
  SeededRng rng(1);
  const Vector v = truncated_gaussian(rng, 1.0, 1.27, 10000);
  ASSERT_EQ(v.size(), 10000u);
  for (double x : v) ASSERT_LE(std::abs(x), 1.27);
}

TEST(TruncatedGaussian, WideTruncationIsGaussian) {
  SeededRng rng(2);
  const Vector v = truncated_gaussian(rng, 1.0, 1e6, 100000);
  double s2 = 0.0, s = 0.0;
  for (double x : v) {
    s += x;
    s2 += x * x;
  }
  const double mean = s / v.size();
  EXPECT_NEAR(s2 / v.size() - mean * mean, 1.0, 0.02);
}

TEST(TruncatedGaussian, DeterministicAndDegenerate) {
  SeededRng a(9), b(9);
  EXPECT_EQ(truncated_gaussian(a, 1.0, 1.27, 100), truncated_gaussian(b, 1.0, 1.27, 100));
  EXPECT_THROW(truncated_gaussian(a, 1.0, 1e-7, 1), DegenerateTruncation);
  EXPECT_THROW(truncated_gaussian(a, 0.0, 1.0, 1), InvalidInput);
}

TEST(DiscreteLyapunov, Examples) {
  EXPECT_EQ(discrete_lyapunov(Matrix(2, 2), Matrix::identity(2)), Matrix::identity(2));
  const Matrix p = discrete_lyapunov(Matrix{{0.5}}, Matrix{{1.0}});
  EXPECT_NEAR(p(0, 0), 4.0 / 3.0, 1e-14);
  EXPECT_THROW(discrete_lyapunov(1.2 * Matrix::identity(2), Matrix::identity(2)),
               InstabilityError);
  EXPECT_THROW(discrete_lyapunov(Matrix::identity(2), Matrix::identity(2)), InstabilityError);
}

TEST(DiscreteLyapunov, ResidualSymmetryAndDefiniteness) {
  SeededRng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const Matrix a = testing::with_norm(random_matrix(rng, n, n), 0.2 + 0.75 * rng.uniform());
    const Matrix l = random_matrix(rng, n, n);
    const Matrix q = l * l.transpose() + Matrix::identity(n);
    const Matrix p = discrete_lyapunov(a, q);
    const Matrix residual = a.transpose() * p * a - p + q;
    EXPECT_LE(residual.frobenius_norm(), 1e-10 * std::max(1.0, p.frobenius_norm()));
    EXPECT_EQ(p, p.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(p));
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(DiscreteLyapunov, NonNormalSchurMatrix) {
  // Spectral radius 0.5 but ||a|| = 10: the series must not be judged by the norm.
  const Matrix a{{0.5, 10.0}, {0.0, 0.5}};
  const Matrix p = discrete_lyapunov(a, Matrix::identity(2));
  const Matrix residual = a.transpose() * p * a - p + Matrix::identity(2);
  EXPECT_LE(residual.frobenius_norm(), 1e-10 * p.frobenius_norm());
}

}  // namespace
}  // namespace pacrnn
