#pragma once

// Teacher/student two-layer linear dynamics.
//
// A fixed teacher W* (ly x lx) labels fresh Gaussian inputs; a student
// W2 (ly x lh) * W1 (lh x lx) is trained online with one of three update
// rules on the squared-error loss L(x, y) = 1/2 ||y - W2 W1 x||^2:
//
//   SGD    dW1 = -eta (W2^T r) (x)^T,             r  = W2 W1 x - y
//          dW2 = -eta r (W1 x)^T
//   LSPR   SGD term plus the gradient of lambda * L(x', y) at the
//          perturbed input x' = omega*sigma*z + x, z ~ N(0, I)
//   SCR    SGD term plus the gradient of lambda * 1/2 ||W2 W1 x' - c||^2
//          where c = W2 W1 x is held constant (no gradient through the
//          clean branch)
//
// Both weight deltas of one step are evaluated at the pre-step weights.
// Progress is tracked by epsilon (mean squared entry of W2 W1 - W*) and
// gamma (Frobenius cosine between W2 W1 and W*).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "perturblab/numerics.hpp"

namespace plab::lindyn {

enum class Method { kSgd, kLspr, kScr };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::kSgd: return "SGD";
    case Method::kLspr: return "LSPR";
    case Method::kScr: return "SCR";
  }
  return "?";
}

inline Method parse_method(const std::string& name) {
  if (name == "SGD") return Method::kSgd;
  if (name == "LSPR") return Method::kLspr;
  if (name == "SCR") return Method::kScr;
  throw std::invalid_argument("unknown lindyn method: " + name);
}

struct DynConfig {
  std::size_t lx = 100;
  std::size_t lh = 10000;
  std::size_t ly = 10;
  double eta = 1.4;      // learning rate
  double lambda = 0.001; // weight of the perturbed-loss / consistency term
  double omega = 0.1;    // perturbation scale
  double sigma = 1.0;    // noise std multiplying omega (z itself is N(0, I))
  std::size_t steps = 100000;
  Method method = Method::kSgd;
  std::uint64_t seed = 0;
  std::size_t record_every = 500;
  // Input entries are N(0, input_std^2); defaults to 1/sqrt(lx) so that
  // E||x||^2 = 1.
  std::optional<double> input_std;
  // Teacher entries are N(0, teacher_std^2); defaults to 0.4/sqrt(lx),
  // which keeps every singular value of W* below the eta = 1.4 stability
  // bound for the factored student (eta ||x||^2 (s1^2 + s2^2) < 2 with
  // s1 s2 = s(W*) forces s(W*) < 1/eta at the solution).
  std::optional<double> teacher_std;
  // Student layers are N(0, init_std^2); defaults to 0.5/sqrt(lh), small
  // against the teacher and stable under eta for any lh.
  std::optional<double> init_std;

  double resolved_input_std() const {
    return input_std ? *input_std : 1.0 / std::sqrt(static_cast<double>(lx));
  }
  double resolved_teacher_std() const {
    return teacher_std ? *teacher_std : 0.4 / std::sqrt(static_cast<double>(lx));
  }
  double resolved_init_std() const {
    return init_std ? *init_std : 0.5 / std::sqrt(static_cast<double>(lh));
  }

  void validate() const {
    require(lx >= 1 && lh >= 1 && ly >= 1, "DynConfig: dims must be >= 1");
    require(eta > 0.0, "DynConfig: eta must be > 0");
    require(lambda >= 0.0, "DynConfig: lambda must be >= 0");
    require(omega >= 0.0, "DynConfig: omega must be >= 0");
    require(sigma >= 0.0, "DynConfig: sigma must be >= 0");
    require(record_every >= 1, "DynConfig: record_every must be >= 1");
    require(!input_std || *input_std > 0.0, "DynConfig: input_std must be > 0");
    require(!teacher_std || *teacher_std > 0.0, "DynConfig: teacher_std must be > 0");
    require(!init_std || *init_std >= 0.0, "DynConfig: init_std must be >= 0");
  }
};

struct DynState {
  Matrix w_star;  // ly x lx
  Matrix w1;      // lh x lx
  Matrix w2;      // ly x lh
  std::size_t step = 0;
};

struct TrajectoryRecord {
  std::size_t step = 0;
  double epsilon = 0.0;
  double gamma = 0.0;
};

struct Trajectory {
  DynConfig config;
  std::vector<TrajectoryRecord> records;
  // First step at which a non-finite weight/residual was observed; the
  // records stop at the last finite measurement.
  std::optional<std::size_t> diverged_at;
};

/// Teacher and student layers drawn i.i.d. normal at the configured scales;
/// the initial student product is small against the teacher. Draw order:
/// W*, W1, W2.
inline DynState init_state(const DynConfig& config, Rng& rng) {
  config.validate();
  DynState s;
  s.w_star = sample_gaussian_matrix(rng, config.ly, config.lx, 0.0,
                                    config.resolved_teacher_std());
  s.w1 = sample_gaussian_matrix(rng, config.lh, config.lx, 0.0, config.resolved_init_std());
  s.w2 = sample_gaussian_matrix(rng, config.ly, config.lh, 0.0, config.resolved_init_std());
  s.step = 0;
  return s;
}

inline Vector teacher_label(const DynState& state, const Vector& x) {
  return matvec(state.w_star, x);
}

struct DynDiagnostics {
  double epsilon = 0.0;
  double gamma = 0.0;
  double product_norm = 0.0;
};

/// Computes the student product once and derives both diagnostics.
inline DynDiagnostics diagnostics(const DynState& state) {
  const Matrix product = matmul(state.w2, state.w1);
  DynDiagnostics d;
  double err_sq = 0.0;
  double inner = 0.0;
  for (std::size_t i = 0; i < product.size(); ++i) {
    const double p = product.data()[i];
    const double t = state.w_star.data()[i];
    const double e = p - t;
    err_sq += e * e;
    inner += p * t;
  }
  d.epsilon = err_sq / static_cast<double>(product.size());
  d.product_norm = frobenius_norm(product);
  const double teacher_norm = frobenius_norm(state.w_star);
  // Guard the cosine against 1-ulp excursions past +/-1.
  d.gamma = std::clamp(inner / (d.product_norm * teacher_norm), -1.0, 1.0);
  return d;
}

/// Mean squared entry of W2 W1 - W*.
inline double epsilon(const DynState& state) { return diagnostics(state).epsilon; }

/// Frobenius cosine between W2 W1 and W*; requires both nonzero.
inline double gamma(const DynState& state) {
  const Matrix product = matmul(state.w2, state.w1);
  const double pn = frobenius_norm(product);
  const double tn = frobenius_norm(state.w_star);
  if (pn == 0.0 || tn == 0.0)
    throw std::domain_error("gamma: zero-norm operand");
  return std::clamp(frobenius_inner(product, state.w_star) / (pn * tn), -1.0, 1.0);
}

namespace detail {

// u = W1 x and up = W1 xp in one pass over W1.
inline void dual_matvec(const Matrix& w1, const Vector& x, const Vector& xp,
                        Vector& u, Vector& up) {
  const std::size_t lh = w1.rows(), lx = w1.cols();
  u.assign(lh, 0.0);
  up.assign(lh, 0.0);
  for (std::size_t h = 0; h < lh; ++h) {
    const double* row = w1.row(h);
    double s = 0.0, sp = 0.0;
    for (std::size_t j = 0; j < lx; ++j) {
      s += row[j] * x[j];
      sp += row[j] * xp[j];
    }
    u[h] = s;
    up[h] = sp;
  }
}

// a = W2^T r and ap = W2^T rp in one pass over W2.
inline void dual_tmatvec(const Matrix& w2, const Vector& r, const Vector& rp,
                         Vector& a, Vector& ap) {
  const std::size_t ly = w2.rows(), lh = w2.cols();
  a.assign(lh, 0.0);
  ap.assign(lh, 0.0);
  for (std::size_t i = 0; i < ly; ++i) {
    const double* row = w2.row(i);
    const double ri = r[i], rpi = rp[i];
    for (std::size_t h = 0; h < lh; ++h) {
      a[h] += row[h] * ri;
      ap[h] += row[h] * rpi;
    }
  }
}

}  // namespace detail

/// In-place SGD update; returns ||r||^2 of the step for divergence checks.
inline double sgd_step_inplace(DynState& s, const Vector& x, const Vector& y, double eta) {
  require(x.size() == s.w1.cols(), "sgd_step: x dimension mismatch");
  require(y.size() == s.w2.rows(), "sgd_step: y dimension mismatch");
  const Vector u = matvec(s.w1, x);
  Vector r = matvec(s.w2, u);
  double r_sq = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] -= y[i];
    r_sq += r[i] * r[i];
  }
  const Vector a = tmatvec(s.w2, r);

  // Expression shapes mirror the regularized kernels so that their
  // zero-extra-term cases reduce to this update exactly.
  const std::size_t lh = s.w1.rows(), lx = s.w1.cols(), ly = s.w2.rows();
  for (std::size_t h = 0; h < lh; ++h) {
    double* row = s.w1.row(h);
    const double ah = a[h];
    for (std::size_t j = 0; j < lx; ++j) row[j] -= eta * (ah * x[j]);
  }
  for (std::size_t i = 0; i < ly; ++i) {
    double* row = s.w2.row(i);
    const double ri = r[i];
    for (std::size_t h = 0; h < lh; ++h) row[h] -= eta * (ri * u[h]);
  }
  ++s.step;
  return r_sq;
}

/// In-place LSPR update: SGD plus the lambda-weighted gradient of the same
/// loss at the perturbed input x' = omega*sigma*z + x, against the true y.
inline double lspr_step_inplace(DynState& s, const Vector& x, const Vector& y,
                                const Vector& z, double eta, double lambda,
                                double omega, double sigma) {
  require(x.size() == s.w1.cols(), "lspr_step: x dimension mismatch");
  require(z.size() == x.size(), "lspr_step: z dimension mismatch");
  require(y.size() == s.w2.rows(), "lspr_step: y dimension mismatch");
  if (lambda == 0.0) return sgd_step_inplace(s, x, y, eta);

  const std::size_t lh = s.w1.rows(), lx = s.w1.cols(), ly = s.w2.rows();
  Vector xp(lx);
  for (std::size_t j = 0; j < lx; ++j) xp[j] = x[j] + omega * sigma * z[j];

  Vector u, up;
  detail::dual_matvec(s.w1, x, xp, u, up);
  Vector r = matvec(s.w2, u);
  Vector rp = matvec(s.w2, up);
  double r_sq = 0.0;
  for (std::size_t i = 0; i < ly; ++i) {
    r[i] -= y[i];
    rp[i] -= y[i];
    r_sq += r[i] * r[i] + rp[i] * rp[i];
  }
  Vector a, ap;
  detail::dual_tmatvec(s.w2, r, rp, a, ap);

  for (std::size_t h = 0; h < lh; ++h) {
    double* row = s.w1.row(h);
    const double ah = a[h], aph = lambda * ap[h];
    for (std::size_t j = 0; j < lx; ++j) row[j] -= eta * (ah * x[j] + aph * xp[j]);
  }
  for (std::size_t i = 0; i < ly; ++i) {
    double* row = s.w2.row(i);
    const double ri = r[i], rpi = lambda * rp[i];
    for (std::size_t h = 0; h < lh; ++h) row[h] -= eta * (ri * u[h] + rpi * up[h]);
  }
  ++s.step;
  return r_sq;
}

/// In-place SCR update: SGD plus the lambda-weighted gradient of the
/// consistency term 1/2 ||W2 W1 x' - c||^2 with the clean output
/// c = W2 W1 x treated as a constant target.
inline double scr_step_inplace(DynState& s, const Vector& x, const Vector& y,
                               const Vector& z, double eta, double lambda,
                               double omega, double sigma) {
  require(x.size() == s.w1.cols(), "scr_step: x dimension mismatch");
  require(z.size() == x.size(), "scr_step: z dimension mismatch");
  require(y.size() == s.w2.rows(), "scr_step: y dimension mismatch");
  if (lambda == 0.0) return sgd_step_inplace(s, x, y, eta);

  const std::size_t lh = s.w1.rows(), lx = s.w1.cols(), ly = s.w2.rows();
  Vector xp(lx);
  for (std::size_t j = 0; j < lx; ++j) xp[j] = x[j] + omega * sigma * z[j];

  Vector u, up;
  detail::dual_matvec(s.w1, x, xp, u, up);
  const Vector clean = matvec(s.w2, u);
  Vector r(ly), rs(ly);
  const Vector pert = matvec(s.w2, up);
  double r_sq = 0.0;
  for (std::size_t i = 0; i < ly; ++i) {
    r[i] = clean[i] - y[i];
    rs[i] = pert[i] - clean[i];
    r_sq += r[i] * r[i] + rs[i] * rs[i];
  }
  Vector a, as;
  detail::dual_tmatvec(s.w2, r, rs, a, as);

  for (std::size_t h = 0; h < lh; ++h) {
    double* row = s.w1.row(h);
    const double ah = a[h], ash = lambda * as[h];
    for (std::size_t j = 0; j < lx; ++j) row[j] -= eta * (ah * x[j] + ash * xp[j]);
  }
  for (std::size_t i = 0; i < ly; ++i) {
    double* row = s.w2.row(i);
    const double ri = r[i], rsi = lambda * rs[i];
    for (std::size_t h = 0; h < lh; ++h) row[h] -= eta * (ri * u[h] + rsi * up[h]);
  }
  ++s.step;
  return r_sq;
}

inline DynState sgd_step(const DynState& state, const Vector& x, const Vector& y, double eta) {
  DynState next = state;
  sgd_step_inplace(next, x, y, eta);
  return next;
}

inline DynState lspr_step(const DynState& state, const Vector& x, const Vector& y,
                          const Vector& z, double eta, double lambda, double omega,
                          double sigma) {
  DynState next = state;
  lspr_step_inplace(next, x, y, z, eta, lambda, omega, sigma);
  return next;
}

inline DynState scr_step(const DynState& state, const Vector& x, const Vector& y,
                         const Vector& z, double eta, double lambda, double omega,
                         double sigma) {
  DynState next = state;
  scr_step_inplace(next, x, y, z, eta, lambda, omega, sigma);
  return next;
}

/// Runs one configuration: fresh x (and z where the method uses it) every
/// step, labels from the teacher, diagnostics recorded at step 0, every
/// record_every steps, and at the final step. Fully determined by the
/// config (including its seed). On divergence the trajectory is truncated
/// and diverged_at carries the offending step.
inline Trajectory run_trajectory(const DynConfig& config) {
  config.validate();
  Trajectory traj;
  traj.config = config;

  Rng rng(config.seed);
  DynState state = init_state(config, rng);
  const double input_std = config.resolved_input_std();

  {
    const DynDiagnostics d = diagnostics(state);
    traj.records.push_back({0, d.epsilon, d.gamma});
  }

  for (std::size_t t = 1; t <= config.steps; ++t) {
    const Vector x = sample_gaussian(rng, config.lx, 0.0, input_std);
    const Vector y = teacher_label(state, x);
    double r_sq = 0.0;
    switch (config.method) {
      case Method::kSgd:
        r_sq = sgd_step_inplace(state, x, y, config.eta);
        break;
      case Method::kLspr: {
        const Vector z = sample_gaussian(rng, config.lx, 0.0, 1.0);
        r_sq = lspr_step_inplace(state, x, y, z, config.eta, config.lambda,
                                 config.omega, config.sigma);
        break;
      }
      case Method::kScr: {
        const Vector z = sample_gaussian(rng, config.lx, 0.0, 1.0);
        r_sq = scr_step_inplace(state, x, y, z, config.eta, config.lambda,
                                config.omega, config.sigma);
        break;
      }
    }
    if (!std::isfinite(r_sq)) {
      traj.diverged_at = t;
      break;
    }
    if (t % config.record_every == 0 || t == config.steps) {
      const DynDiagnostics d = diagnostics(state);
      if (!std::isfinite(d.epsilon) || !std::isfinite(d.gamma)) {
        traj.diverged_at = t;
        break;
      }
      traj.records.push_back({t, d.epsilon, d.gamma});
    }
  }
  return traj;
}

}  // namespace plab::lindyn
