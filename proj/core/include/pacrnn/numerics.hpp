#pragma once

// Deterministic numerical primitives shared by the rest of the library.
//
// Everything here is single-threaded and sums in ascending index order, so
// results are bit-identical between runs and independent of how callers
// distribute work across threads.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace pacrnn {

using Vector = std::vector<double>;

/// Dense real matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  bool all_finite() const noexcept;
  Matrix transpose() const;
  double frobenius_norm() const;

  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Matrix operator+(const Matrix& a, const Matrix& b);
  friend Matrix operator-(const Matrix& a, const Matrix& b);
  friend Matrix operator*(double s, const Matrix& m);
  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// y = m * x.
Vector matvec(const Matrix& m, std::span<const double> x);
double norm2(std::span<const double> v);
double norm_inf(std::span<const double> v);

/// Largest singular value (induced 2-norm).
///
/// Power iteration on the smaller Gram matrix (m^T m or m m^T) from the
/// all-ones start vector; stops once the Rayleigh quotient is stable to
/// 1e-12 relative (with a geometric tail estimate) or after 10^4 iterations.
/// Canonical basis vectors whose Rayleigh quotient exceeds the converged
/// value are used as restarts, which covers start vectors orthogonal to the
/// dominant singular direction.
///
/// Throws InvalidInput on non-finite entries.
double spectral_norm(const Matrix& m);

/// ln((1/n) * sum_i exp(v_i)), max-shifted. Throws InvalidInput when empty
/// or when any value is non-finite.
double log_mean_exp(std::span<const double> values);

/// Seeded pseudo-random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Uniform and normal variates are derived here rather than with
/// <random> distributions (whose algorithms are implementation-defined), so
/// a given seed produces the same stream on every platform.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Uniform on [0, 1), 53 random bits.
  double uniform();
  /// Standard normal via the Marsaglia polar method.
  double normal();
  std::uint64_t next_u64() { return engine_(); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// n draws from N(0, std^2) conditioned on |x| <= bound (rejection).
/// Throws DegenerateTruncation when bound/std < 1e-6.
Vector truncated_gaussian(SeededRng& rng, double std, double bound, std::size_t n);

/// Solves a^T P a - P + q = 0 by summing P = sum_k (a^T)^k q a^k until the
/// increment drops below 1e-14 (relative to P). Throws InstabilityError when
/// the series has not converged after 10^5 terms or visibly diverges.
Matrix discrete_lyapunov(const Matrix& a, const Matrix& q);

}  // namespace pacrnn
