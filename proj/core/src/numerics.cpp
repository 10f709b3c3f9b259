#include "pacrnn/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pacrnn/errors.hpp"

namespace pacrnn {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (data_.size() != rows_ * cols_) {
    throw InvalidInput("Matrix: expected " + std::to_string(rows_ * cols_) +
                       " entries, got " + std::to_string(data_.size()));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw InvalidInput("Matrix: ragged initializer");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double x : data_) s += x * x;
  return std::sqrt(s);
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols_ != b.rows_) throw InvalidInput("Matrix product: inner dimensions differ");
  Matrix out(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    for (std::size_t j = 0; j < b.cols_; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols_; ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  }
  return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InvalidInput("Matrix sum: shape mismatch");
  Matrix out = a;
  for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] += b.data_[i];
  return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InvalidInput("Matrix difference: shape mismatch");
  Matrix out = a;
  for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] -= b.data_[i];
  return out;
}

Matrix operator*(double s, const Matrix& m) {
  Matrix out = m;
  for (double& x : out.data_) x *= s;
  return out;
}

Vector matvec(const Matrix& m, std::span<const double> x) {
  if (x.size() != m.cols()) {
    throw InvalidInput("matvec: matrix has " + std::to_string(m.cols()) +
                       " columns, vector has " + std::to_string(x.size()) + " entries");
  }
  Vector y(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) s += m(r, c) * x[c];
    y[r] = s;
  }
  return y;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

namespace {

constexpr double kPowerTol = 1e-12;
constexpr int kPowerMaxIter = 10000;

// Dominant eigenvalue of the symmetric PSD matrix g, starting from v.
double power_iteration(const Matrix& g, Vector v) {
  const double eps = std::numeric_limits<double>::epsilon();
  double nv = norm2(v);
  if (nv == 0.0) return 0.0;
  for (double& x : v) x /= nv;

  double lam = 0.0;
  double prev_lam = 0.0;
  double prev_delta = 0.0;
  for (int it = 0; it < kPowerMaxIter; ++it) {
    Vector w = matvec(g, v);
    double rayleigh = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) rayleigh += v[i] * w[i];
    const double nw = norm2(w);
    if (nw == 0.0) return 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / nw;
    lam = rayleigh;
    if (it > 0) {
      const double delta = std::abs(lam - prev_lam);
      if (delta <= 8.0 * eps * lam) break;
      if (delta <= kPowerTol * lam && prev_delta > 0.0) {
        // Geometric convergence: remaining error ~ delta * q / (1 - q).
        const double q = std::min(delta / prev_delta, 1.0 - 1e-6);
        if (delta * q / (1.0 - q) <= kPowerTol * lam) break;
      }
      prev_delta = delta;
    }
    prev_lam = lam;
  }
  return lam;
}

}  // namespace

double spectral_norm(const Matrix& m) {
  if (!m.all_finite()) throw InvalidInput("spectral_norm: non-finite entry");
  if (m.empty()) return 0.0;
  const Matrix g = m.rows() >= m.cols() ? m.transpose() * m : m * m.transpose();
  const std::size_t k = g.rows();

  double best = power_iteration(g, Vector(k, 1.0));
  // e_i^T g e_i is a lower bound on the top eigenvalue; if one beats the
  // current estimate the all-ones start missed the dominant direction.
  for (bool improved = true; improved;) {
    improved = false;
    for (std::size_t i = 0; i < k; ++i) {
      if (g(i, i) > best * (1.0 + 1e-9)) {
        Vector e(k, 0.0);
        e[i] = 1.0;
        const double lam = power_iteration(g, std::move(e));
        if (lam > best) {
          best = lam;
          improved = true;
        }
      }
    }
  }
  return std::sqrt(std::max(best, 0.0));
}

double log_mean_exp(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("log_mean_exp: empty input");
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidInput("log_mean_exp: non-finite value");
    mx = std::max(mx, v);
  }
  double s = 0.0;
  for (double v : values) s += std::exp(v - mx);
  return mx + std::log(s) - std::log(static_cast<double>(values.size()));
}

double SeededRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Vector truncated_gaussian(SeededRng& rng, double std, double bound, std::size_t n) {
  if (!(std > 0.0) || !(bound > 0.0) || !std::isfinite(std)) {
    throw InvalidInput("truncated_gaussian: std and bound must be positive");
  }
  if (bound / std < 1e-6) {
    throw DegenerateTruncation("truncated_gaussian: bound/std = " + std::to_string(bound / std) +
                               " is below 1e-6");
  }
  Vector out;
  out.reserve(n);
  while (out.size() < n) {
    const double x = std * rng.normal();
    if (std::abs(x) <= bound) out.push_back(x);
  }
  return out;
}

Matrix discrete_lyapunov(const Matrix& a, const Matrix& q) {
  if (!a.square() || !q.square() || a.rows() != q.rows()) {
    throw InvalidInput("discrete_lyapunov: a and q must be square and of equal size");
  }
  if (!a.all_finite() || !q.all_finite()) throw InvalidInput("discrete_lyapunov: non-finite entry");

  constexpr int kMaxTerms = 100000;
  const Matrix at = a.transpose();
  Matrix p = q;
  Matrix term = q;
  for (int k = 1; k < kMaxTerms; ++k) {
    term = at * term * a;
    p = p + term;
    const double inc = term.frobenius_norm();
    if (!std::isfinite(inc) || inc > 1e150) {
      throw InstabilityError("discrete_lyapunov: series diverges (spectral radius >= 1)");
    }
    if (inc <= 1e-14 * std::max(p.frobenius_norm(), 1e-300)) {
      return 0.5 * (p + p.transpose());
    }
  }
  throw InstabilityError("discrete_lyapunov: series did not converge within 1e5 terms");
}

}  // namespace pacrnn
