#pragma once

// Test-only reference implementations. These stay deliberately naive and
// independent of the library code paths they are used to check.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "perturblab/numerics.hpp"

namespace oracle {

// Textbook i-j-k triple loop.
inline plab::Matrix matmul_naive(const plab::Matrix& a, const plab::Matrix& b) {
  plab::Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  return out;
}

inline double frobenius_inner_naive(const plab::Matrix& a, const plab::Matrix& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * b(i, j);
  return acc;
}

// Rank <= 1 check through every 2x2 minor.
inline bool all_minors_vanish(const plab::Matrix& m, double tol) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t k = i + 1; k < m.rows(); ++k)
      for (std::size_t j = 0; j < m.cols(); ++j)
        for (std::size_t l = j + 1; l < m.cols(); ++l) {
          const double minor = m(i, j) * m(k, l) - m(i, l) * m(k, j);
          if (std::abs(minor) > tol) return false;
        }
  return true;
}

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};

inline Moments estimate_moments(const std::vector<double>& samples) {
  double sum = 0.0;
  for (double v : samples) sum += v;
  const double mean = sum / static_cast<double>(samples.size());
  double sq = 0.0;
  for (double v : samples) sq += (v - mean) * (v - mean);
  Moments m;
  m.mean = mean;
  m.stddev = std::sqrt(sq / static_cast<double>(samples.size()));
  return m;
}

// Central finite differences of a scalar function of a flat parameter
// vector. The function is re-evaluated at x +/- h per coordinate.
inline std::vector<double> finite_diff_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x, double h = 1e-5) {
  std::vector<double> grad(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double fp = f(x);
    x[i] = saved - h;
    const double fm = f(x);
    x[i] = saved;
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

// Relative gap with a unit floor, as customary for gradient checks.
inline double rel_gap(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

inline double max_rel_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, rel_gap(a[i], b[i]));
  return worst;
}

}  // namespace oracle
