#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace plab {

/// Dense real vector. All entries are expected to stay finite.
using Vector = std::vector<double>;

/// Throws std::invalid_argument when a call-site contract is violated.
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matmul: inner dimensions differ");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.row(i);
    double* orow = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = arow[k];
      const double* brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

/// m * v for a row-major matrix; result has m.rows() entries.
inline Vector matvec(const Matrix& m, const Vector& v) {
  require(m.cols() == v.size(), "matvec: dimension mismatch");
  Vector out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* row = m.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) acc += row[j] * v[j];
    out[i] = acc;
  }
  return out;
}

/// m^T * v; result has m.cols() entries.
inline Vector tmatvec(const Matrix& m, const Vector& v) {
  require(m.rows() == v.size(), "tmatvec: dimension mismatch");
  Vector out(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* row = m.row(i);
    const double vi = v[i];
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += row[j] * vi;
  }
  return out;
}

/// Outer product u v^T with shape (u.size(), v.size()).
inline Matrix outer(const Vector& u, const Vector& v) {
  Matrix out(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    double* row = out.row(i);
    for (std::size_t j = 0; j < v.size(); ++j) row[j] = u[i] * v[j];
  }
  return out;
}

/// Frobenius inner product: sum of elementwise products.
inline double frobenius_inner(const Matrix& a, const Matrix& b) {
  require(a.same_shape(b), "frobenius_inner: shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a.data()[i] * b.data()[i];
  return acc;
}

inline double frobenius_norm(const Matrix& a) {
  return std::sqrt(frobenius_inner(a, a));
}

/// One step of the splitmix64 mixing function.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Folds `v` into the running seed `h`. Chaining mix_seed calls over a
/// tuple of values gives a stable per-tuple stream identifier.
inline std::uint64_t mix_seed(std::uint64_t h, std::uint64_t v) {
  return splitmix64(h ^ splitmix64(v));
}

/// Deterministic random stream.
///
/// The engine is std::mt19937_64 (bit-exact by the standard), uniforms map
/// the top 53 bits into (0,1), and normals use the Box-Muller transform
/// consuming exactly two uniforms per generated pair. Equal seeds plus equal
/// call sequences give identical streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform draw strictly inside (0,1).
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal draw. The second value of each Box-Muller pair is
  /// cached and returned by the next call.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double next_gaussian(double mean, double stddev) {
    return mean + stddev * next_gaussian();
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// i.i.d. normal vector. std == 0 returns the constant-mean vector without
/// consuming any draws.
inline Vector sample_gaussian(Rng& rng, std::size_t dim, double mean, double stddev) {
  require(stddev >= 0.0, "sample_gaussian: negative stddev");
  Vector out(dim, mean);
  if (stddev == 0.0) return out;
  for (std::size_t i = 0; i < dim; ++i) out[i] = rng.next_gaussian(mean, stddev);
  return out;
}

/// Matrix with i.i.d. normal entries, filled in row-major order.
inline Matrix sample_gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols,
                                     double mean, double stddev) {
  require(stddev >= 0.0, "sample_gaussian_matrix: negative stddev");
  Matrix out(rows, cols, mean);
  if (stddev == 0.0) return out;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = rng.next_gaussian(mean, stddev);
  return out;
}

}  // namespace plab
