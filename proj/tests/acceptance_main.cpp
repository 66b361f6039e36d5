// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one [PASS]/[FAIL] line per criterion. Exit code 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "perturblab/ctr.hpp"
#include "perturblab/experiment.hpp"
#include "perturblab/lindyn.hpp"
#include "perturblab/losses.hpp"

namespace fs = std::filesystem;
using namespace plab;
using experiment::ExperimentSpec;
using experiment::Mode;
using experiment::RunOptions;
using experiment::RunReport;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "perturblab_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

struct MethodStats {
  double mean_eps = 0.0;
  double mean_gamma = 0.0;
};

MethodStats cell_stats(const nlohmann::json& summary, const std::string& method) {
  for (const auto& jc : summary.at("cells"))
    if (jc.at("method").get<std::string>() == method)
      return {jc.at("mean_final_epsilon").get<double>(),
              jc.at("mean_final_gamma").get<double>()};
  throw std::runtime_error("missing cell for " + method);
}

// --------------------------------------------------------------- criterion 1
// Trajectory grid {SGD, SCR, LSPR} x omega 0.1 x lambda 0.001 x eta 1.4 at
// desk scale over 5 seeds: LSPR must end at least as aligned and at most
// as erroneous as SCR.
nlohmann::json g_small_summary;

Outcome criterion1() {
  ExperimentSpec spec = experiment::parse_spec(R"({
    "mode": "lindyn", "base_seed": 20240601, "replicas": 5,
    "grid": {"method": ["SGD", "SCR", "LSPR"], "omega": [0.1], "lambda": [0.001],
             "eta": [1.4], "sigma": [1.0]},
    "lindyn": {"lx": 100, "lh": 1000, "ly": 10, "steps": 20000, "record_every": 2000}
  })");
  const fs::path dir = work_dir() / "c1";
  const RunReport report = experiment::run_experiment(spec, {dir.string(), 0});
  g_small_summary = experiment::summarize(report);

  const MethodStats lspr = cell_stats(g_small_summary, "LSPR");
  const MethodStats scr = cell_stats(g_small_summary, "SCR");
  Outcome out;
  out.check(lspr.mean_gamma >= scr.mean_gamma, "mean final gamma: LSPR < SCR");
  out.check(lspr.mean_eps <= scr.mean_eps, "mean final epsilon: LSPR > SCR");
  char buf[160];
  std::snprintf(buf, sizeof buf, "gamma LSPR %.9f vs SCR %.9f, epsilon LSPR %.3e vs SCR %.3e",
                lspr.mean_gamma, scr.mean_gamma, lspr.mean_eps, scr.mean_eps);
  out.detail += (out.detail.empty() ? "" : "; ") + std::string(buf);
  return out;
}

// --------------------------------------------------------------- criterion 2
// omega 0.9, lambda 1 must end worse (higher epsilon, lower gamma) than the
// omega 0.1, lambda 0.001 counterparts for both SCR and LSPR.
Outcome criterion2() {
  ExperimentSpec spec = experiment::parse_spec(R"({
    "mode": "lindyn", "base_seed": 20240601, "replicas": 5,
    "grid": {"method": ["SCR", "LSPR"], "omega": [0.9], "lambda": [1.0],
             "eta": [1.4], "sigma": [1.0]},
    "lindyn": {"lx": 100, "lh": 1000, "ly": 10, "steps": 20000, "record_every": 2000}
  })");
  const fs::path dir = work_dir() / "c2";
  const RunReport report = experiment::run_experiment(spec, {dir.string(), 0});
  const auto big = experiment::summarize(report);

  Outcome out;
  for (const std::string method : {"SCR", "LSPR"}) {
    const MethodStats small = cell_stats(g_small_summary, method);
    const MethodStats large = cell_stats(big, method);
    out.check(large.mean_eps > small.mean_eps, method + ": large-noise epsilon not worse");
    out.check(large.mean_gamma < small.mean_gamma, method + ": large-noise gamma not worse");
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s eps %.3e->%.3e gamma %.4f->%.4f", method.c_str(),
                  small.mean_eps, large.mean_eps, small.mean_gamma, large.mean_gamma);
    out.detail += (out.detail.empty() ? "" : "; ") + std::string(buf);
  }
  return out;
}

// --------------------------------------------------------------- criterion 3
// Finite-difference gradient oracles, h = 1e-5: the three dynamics update
// rules within 1e-5 relative, the full CTR model within 1e-4.

std::vector<double> flatten_student(const lindyn::DynState& s) {
  std::vector<double> p(s.w1.data());
  p.insert(p.end(), s.w2.data().begin(), s.w2.data().end());
  return p;
}

lindyn::DynState with_student(lindyn::DynState s, const std::vector<double>& p) {
  for (std::size_t i = 0; i < s.w1.size(); ++i) s.w1.data()[i] = p[i];
  for (std::size_t i = 0; i < s.w2.size(); ++i) s.w2.data()[i] = p[s.w1.size() + i];
  return s;
}

Vector student_out(const lindyn::DynState& s, const Vector& x) {
  return matvec(s.w2, matvec(s.w1, x));
}

double half_sq(const Vector& a, const Vector& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return 0.5 * acc;
}

Outcome criterion3() {
  Outcome out;
  lindyn::DynConfig cfg;
  cfg.lx = 2;
  cfg.lh = 3;
  cfg.ly = 2;
  Rng rng(301);
  const lindyn::DynState s = lindyn::init_state(cfg, rng);
  const Vector x = sample_gaussian(rng, 2, 0.0, 1.0);
  const Vector y = sample_gaussian(rng, 2, 0.0, 1.0);
  const Vector z = sample_gaussian(rng, 2, 0.0, 1.0);
  const double eta = 0.5, lambda = 0.7, omega = 0.3, sigma = 1.2;
  Vector xp(2);
  for (int j = 0; j < 2; ++j) xp[j] = x[j] + omega * sigma * z[j];

  const auto implied = [&](const lindyn::DynState& next) {
    const auto pb = flatten_student(s);
    const auto pa = flatten_student(next);
    std::vector<double> g(pb.size());
    for (std::size_t i = 0; i < pb.size(); ++i) g[i] = (pb[i] - pa[i]) / eta;
    return g;
  };

  {
    const auto grad = implied(lindyn::sgd_step(s, x, y, eta));
    const auto fd = oracle::finite_diff_gradient(
        [&](const std::vector<double>& p) { return half_sq(y, student_out(with_student(s, p), x)); },
        flatten_student(s), 1e-5);
    out.check(oracle::max_rel_gap(grad, fd) <= 1e-5, "SGD rule exceeds 1e-5");
  }
  {
    const auto grad = implied(lindyn::lspr_step(s, x, y, z, eta, lambda, omega, sigma));
    const auto fd = oracle::finite_diff_gradient(
        [&](const std::vector<double>& p) {
          const auto st = with_student(s, p);
          return half_sq(y, student_out(st, x)) + lambda * half_sq(y, student_out(st, xp));
        },
        flatten_student(s), 1e-5);
    out.check(oracle::max_rel_gap(grad, fd) <= 1e-5, "LSPR rule exceeds 1e-5");
  }
  {
    const Vector frozen = student_out(s, x);
    const auto grad = implied(lindyn::scr_step(s, x, y, z, eta, lambda, omega, sigma));
    const auto fd = oracle::finite_diff_gradient(
        [&](const std::vector<double>& p) {
          const auto st = with_student(s, p);
          return half_sq(y, student_out(st, x)) + lambda * half_sq(student_out(st, xp), frozen);
        },
        flatten_student(s), 1e-5);
    out.check(oracle::max_rel_gap(grad, fd) <= 1e-5, "SCR rule exceeds 1e-5");
  }

  // Full CTR model, 43 weights.
  ctr::DatasetConfig dcfg;
  dcfg.n_examples = 16;
  dcfg.dense_dim = 2;
  dcfg.n_embeddings = 1;
  dcfg.embed_dim = 2;
  dcfg.n_sparse_slots = 2;
  dcfg.sparse_vocab = 3;
  dcfg.seed = 11;
  Rng mrng(303);
  ctr::CtrModel model = ctr::make_model(dcfg, 3, 2, 0.8, mrng);
  const Example ex = ctr::generate_dataset(dcfg)[3];

  const ctr::ForwardResult fwd = ctr::forward(model, ex);
  ctr::Gradients grads(model);
  ctr::backward(model, ex, fwd, fwd.prediction - ex.label, {}, grads);
  std::vector<double> analytic;
  for (const Matrix& t : grads.tables)
    analytic.insert(analytic.end(), t.data().begin(), t.data().end());
  analytic.insert(analytic.end(), grads.w_in.data().begin(), grads.w_in.data().end());
  analytic.insert(analytic.end(), grads.b_in.begin(), grads.b_in.end());
  analytic.insert(analytic.end(), grads.w_out.begin(), grads.w_out.end());
  analytic.push_back(grads.b_out);

  const auto base = ctr::flatten_parameters(model);
  out.check(base.size() <= 100, "ctr test model exceeds 100 weights");
  const auto fd = oracle::finite_diff_gradient(
      [&](const std::vector<double>& p) {
        ctr::CtrModel m = model;
        ctr::load_parameters(m, p);
        const double pred = std::clamp(ctr::forward(m, ex).prediction, 1e-7, 1.0 - 1e-7);
        return -(ex.label * std::log(pred) + (1 - ex.label) * std::log(1.0 - pred));
      },
      base, 1e-5);
  out.check(oracle::max_rel_gap(analytic, fd) <= 1e-4, "ctr model exceeds 1e-4");
  return out;
}

// --------------------------------------------------------------- criterion 4
Outcome criterion4() {
  Outcome out;
  lindyn::DynConfig cfg;
  cfg.lx = 2;
  cfg.lh = 3;
  cfg.ly = 2;
  Rng rng(401);
  const lindyn::DynState s = lindyn::init_state(cfg, rng);
  const Vector x = sample_gaussian(rng, 2, 0.0, 1.0);
  const Vector y = sample_gaussian(rng, 2, 0.0, 1.0);
  const Vector z = sample_gaussian(rng, 2, 0.0, 1.0);
  const double eta = 0.9, lambda = 0.7;

  const auto equal_states = [](const lindyn::DynState& a, const lindyn::DynState& b) {
    return a.w1.data() == b.w1.data() && a.w2.data() == b.w2.data();
  };
  const lindyn::DynState sgd = lindyn::sgd_step(s, x, y, eta);
  out.check(equal_states(lindyn::lspr_step(s, x, y, z, eta, 0.0, 0.3, 1.0), sgd),
            "lspr_step(lambda=0) != sgd_step");
  out.check(equal_states(lindyn::scr_step(s, x, y, z, eta, 0.0, 0.3, 1.0), sgd),
            "scr_step(lambda=0) != sgd_step");
  out.check(equal_states(lindyn::scr_step(s, x, y, z, eta, lambda, 0.0, 1.0), sgd),
            "scr_step(omega=0) != sgd_step");

  const lindyn::DynState lspr0 = lindyn::lspr_step(s, x, y, z, eta, lambda, 0.0, 1.0);
  const auto p0 = flatten_student(s);
  const auto pl = flatten_student(lspr0);
  const auto ps = flatten_student(sgd);
  for (std::size_t i = 0; i < p0.size(); ++i) {
    const double dl = pl[i] - p0[i];
    const double ds = ps[i] - p0[i];
    if (std::abs(dl - (1.0 + lambda) * ds) > 1e-12 * std::max(1.0, std::abs(ds))) {
      out.check(false, "lspr_step(omega=0) != (1+lambda)*sgd update at 1e-12");
      break;
    }
  }

  // Trainer collapse, bit-exact under shared seeding.
  ctr::DatasetConfig dcfg;
  dcfg.n_examples = 400;
  dcfg.dense_dim = 4;
  dcfg.n_embeddings = 1;
  dcfg.embed_dim = 4;
  dcfg.n_sparse_slots = 2;
  dcfg.sparse_vocab = 4;
  dcfg.label_noise = 0.1;
  dcfg.seed = 403;
  const auto all = ctr::generate_dataset(dcfg);
  const std::vector<Example> train(all.begin(), all.begin() + 200);
  const std::vector<Example> eval(all.begin() + 200, all.end());

  ctr::TrainConfig tc;
  tc.method = ctr::TrainMethod::kBaseline;
  tc.epochs = 3;
  tc.batch_size = 32;
  tc.learning_rate = 0.05;
  tc.seed = 405;
  Rng m1(407), m2(407), m3(407);
  ctr::CtrModel base_model = ctr::make_model(dcfg, 8, 2, 0.5, m1);
  ctr::train_baseline(base_model, train, eval, tc);

  ctr::TrainConfig scr_cfg = tc;
  scr_cfg.method = ctr::TrainMethod::kScr;
  scr_cfg.lambda = 0.0;
  scr_cfg.perturbation = PerturbationSpec{0.3, 1.0, 0.0, 0.2};
  ctr::CtrModel scr_model = ctr::make_model(dcfg, 8, 2, 0.5, m2);
  ctr::train_scr(scr_model, train, eval, scr_cfg);
  out.check(ctr::flatten_parameters(scr_model) == ctr::flatten_parameters(base_model),
            "train_scr(lambda=0) trajectory differs from baseline");

  ctr::TrainConfig lspr_cfg = scr_cfg;
  lspr_cfg.method = ctr::TrainMethod::kLspr;
  ctr::CtrModel lspr_model = ctr::make_model(dcfg, 8, 2, 0.5, m3);
  ctr::train_lspr(lspr_model, train, eval, lspr_cfg);
  out.check(ctr::flatten_parameters(lspr_model) == ctr::flatten_parameters(base_model),
            "train_lspr(lambda=0) trajectory differs from baseline");
  return out;
}

// --------------------------------------------------------------- criterion 5
Outcome criterion5() {
  Outcome out;
  Rng rng(501);
  lindyn::DynConfig cfg;
  cfg.lx = 3;
  cfg.lh = 4;
  cfg.ly = 2;
  lindyn::DynState s = lindyn::init_state(cfg, rng);
  s.w_star = matmul(s.w2, s.w1);
  out.check(lindyn::epsilon(s) == 0.0, "epsilon(W2W1 == W*) != 0");

  const double c = 0.375;
  lindyn::DynState sc = s;
  for (double& v : sc.w_star.data()) v -= c;
  out.check(std::abs(lindyn::epsilon(sc) - c * c) <= 1e-12, "epsilon(constant error) != c^2");

  lindyn::DynState g;
  g.w_star = sample_gaussian_matrix(rng, 2, 3, 0.0, 1.0);
  g.w1 = Matrix::identity(3);
  g.w2 = Matrix(2, 3);
  for (std::size_t i = 0; i < g.w2.size(); ++i) g.w2.data()[i] = 2.0 * g.w_star.data()[i];
  out.check(std::abs(lindyn::gamma(g) - 1.0) <= 1e-12, "gamma(2 W*) != 1");
  for (std::size_t i = 0; i < g.w2.size(); ++i) g.w2.data()[i] = -g.w_star.data()[i];
  out.check(std::abs(lindyn::gamma(g) + 1.0) <= 1e-12, "gamma(-W*) != -1");

  const PredictionBatch base_rate{{1, 0, 0, 1, 0}, {0.4, 0.4, 0.4, 0.4, 0.4}};
  out.check(std::abs(normalized_entropy(base_rate) - 1.0) <= 1e-12,
            "NE(base-rate predictor) != 1");

  const PredictionBatch clean{{1, 0, 1, 0}, {0.8, 0.3, 0.6, 0.1}};
  for (double lambda : {0.0, 0.001, 1.0, 2.5})
    out.check(std::abs(lspr_loss(clean, clean, lambda) - (1.0 + lambda) * bce(clean)) <= 1e-12,
              "lspr_loss(clean, clean) != (1+lambda) bce");
  return out;
}

// --------------------------------------------------------------- criterion 6
Outcome criterion6() {
  Outcome out;
  out.check(std::abs(bce(PredictionBatch{{1.0}, {0.5}}) - std::log(2.0)) <= 1e-12,
            "bce(1, 0.5) != ln 2");
  const double two_point = bce(PredictionBatch{{1.0, 0.0}, {0.9, 0.1}});
  out.check(std::abs(two_point - 0.105361) <= 1e-6, "bce([1,0],[0.9,0.1]) != 0.105361 at 1e-6");
  out.check(std::abs(two_point - (-std::log(0.9))) <= 1e-15, "bce two-point oracle mismatch");
  return out;
}

// --------------------------------------------------------------- criterion 7
Outcome criterion7() {
  ExperimentSpec spec = experiment::parse_spec(R"({
    "mode": "ctr", "base_seed": 20240707, "replicas": 12,
    "grid": {"method": ["baseline", "LSPR"], "lambda": [1.0],
             "perturbation": [{"noise_scale": 0.3, "noise_std": 1.0, "noise_mean": 0.0,
                               "dropout_rate": 0.2}]},
    "ctr": {"dataset": {"label_noise": 0.1}}
  })");
  const fs::path dir = work_dir() / "c7";
  const RunReport report = experiment::run_experiment(spec, {dir.string(), 0});
  const auto summary = experiment::summarize(report);

  double base_mean = -1.0, lspr_mean = -1.0;
  std::string base_gain;
  for (const auto& jc : summary.at("cells")) {
    if (jc.at("method") == "baseline") {
      base_mean = jc.at("mean_final_eval_ne").get<double>();
      base_gain = jc.at("relative_gain_display").get<std::string>();
    }
    if (jc.at("method") == "LSPR") lspr_mean = jc.at("mean_final_eval_ne").get<double>();
  }
  Outcome out;
  out.check(base_mean > 0 && lspr_mean > 0, "missing cells in summary");
  out.check(lspr_mean <= base_mean, "mean held-out NE: LSPR > baseline");
  out.check(base_gain == "0 %", "baseline gain row is not \"0 %\"");
  char buf[160];
  std::snprintf(buf, sizeof buf, "mean NE baseline %.5f vs LSPR %.5f over 12 seeds",
                base_mean, lspr_mean);
  out.detail += (out.detail.empty() ? "" : "; ") + std::string(buf);
  return out;
}

// --------------------------------------------------------------- criterion 8
Outcome criterion8() {
  Outcome out;
  const std::string lindyn_spec = R"({
    "mode": "lindyn", "base_seed": 808, "replicas": 2,
    "grid": {"method": ["LSPR"], "omega": [0.1, 0.9], "lambda": [0.001]},
    "lindyn": {"lx": 12, "lh": 24, "ly": 3, "steps": 200, "record_every": 50}
  })";
  const std::string ctr_spec = R"({
    "mode": "ctr", "base_seed": 809, "replicas": 2,
    "grid": {"method": ["baseline", "LSPR"], "lambda": [0.5]},
    "ctr": {"dataset": {"n_examples": 300, "dense_dim": 4, "n_embeddings": 1,
                        "embed_dim": 4, "n_sparse_slots": 2, "sparse_vocab": 4,
                        "label_noise": 0.1},
            "hidden_dim": 4, "sparse_dim": 2, "epochs": 2, "batch_size": 32}
  })";
  int pair_index = 0;
  for (const std::string& text : {lindyn_spec, ctr_spec}) {
    const ExperimentSpec spec = experiment::parse_spec(text);
    const fs::path dir_a = work_dir() / ("c8_a" + std::to_string(pair_index));
    const fs::path dir_b = work_dir() / ("c8_b" + std::to_string(pair_index));
    experiment::run_experiment(spec, {dir_a.string(), 2});
    experiment::run_experiment(spec, {dir_b.string(), 1});
    for (const auto& e : fs::directory_iterator(dir_a)) {
      const auto name = e.path().filename();
      if (slurp(e.path()) != slurp(dir_b / name)) {
        out.check(false, "rerun differs at " + name.string());
        break;
      }
    }
    ++pair_index;
  }
  return out;
}

// --------------------------------------------------------------- criterion 9
// Spec defaults must be exactly the reference configuration; the --full
// flag must pass them through unchanged; a measured per-step time must
// extrapolate the full 12-cell sweep to at most 60 minutes.
Outcome criterion9() {
  Outcome out;
  const ExperimentSpec spec = experiment::parse_spec(R"({"mode": "lindyn"})");
  out.check(spec.lindyn_grid.omegas == std::vector<double>({0.1, 0.9}), "omega defaults");
  out.check(spec.lindyn_grid.lambdas == std::vector<double>({0.001, 1.0}), "lambda defaults");
  out.check(spec.lindyn_grid.etas == std::vector<double>({1.4}), "eta default");
  out.check(spec.lindyn.lx == 100 && spec.lindyn.lh == 10000 && spec.lindyn.ly == 10,
            "dimension defaults");
  out.check(spec.lindyn.steps == 100000, "steps default");

#ifdef PLAB_CLI_PATH
  {
    const fs::path spec_file = work_dir() / "c9_spec.json";
    std::ofstream(spec_file) << R"({"mode": "lindyn"})";
    const fs::path resolved = work_dir() / "c9_resolved.json";
    const std::string cmd = std::string(PLAB_CLI_PATH) + " lindyn --spec " +
                            spec_file.string() + " --full --dry-run > " + resolved.string();
    out.check(std::system(cmd.c_str()) == 0, "CLI --full --dry-run failed");
    const auto dry = nlohmann::json::parse(slurp(resolved));
    out.check(dry.at("lindyn").at("lh") == 10000 && dry.at("lindyn").at("steps") == 100000,
              "--full does not pass the reference scale through");
    const std::string desk_cmd = std::string(PLAB_CLI_PATH) + " lindyn --spec " +
                                 spec_file.string() + " --dry-run > " + resolved.string();
    out.check(std::system(desk_cmd.c_str()) == 0, "CLI --dry-run failed");
    const auto desk = nlohmann::json::parse(slurp(resolved));
    out.check(desk.at("lindyn").at("lh") == 1000 && desk.at("lindyn").at("steps") == 20000,
              "desk-scale default is not lh=1000/steps=20000");
  }
#endif

  // Extrapolated full-sweep runtime, conservatively treating every cell as
  // an LSPR cell.
  lindyn::DynConfig cfg;
  cfg.lx = 100;
  cfg.lh = 10000;
  cfg.ly = 10;
  cfg.eta = 1.4;
  cfg.omega = 0.1;
  cfg.lambda = 0.001;
  cfg.steps = 150;
  cfg.record_every = 1000000;
  cfg.method = lindyn::Method::kLspr;
  cfg.seed = 909;
  const auto t0 = std::chrono::steady_clock::now();
  lindyn::run_trajectory(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double per_step = secs / static_cast<double>(cfg.steps);
  const std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  const double total_min =
      per_step * 100000.0 * 12.0 / static_cast<double>(jobs) / 60.0;
  out.check(total_min <= 60.0, "extrapolated full sweep exceeds 60 minutes");
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "full sweep extrapolates to %.1f min at %zu job(s), %.2f ms/step", total_min,
                jobs, 1000.0 * per_step);
  out.detail += (out.detail.empty() ? "" : "; ") + std::string(buf);
  return out;
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*fn)();
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "trajectory ordering: LSPR at least as aligned, at most as erroneous as SCR", criterion1},
      {2, "large-noise degradation (omega 0.9, lambda 1 worse than small)", criterion2},
      {3, "gradient oracle suite (finite differences, 1e-5 / 1e-4)", criterion3},
      {4, "exact reduction laws (steps and trainer collapse)", criterion4},
      {5, "metric identities (epsilon, gamma, NE, lspr_loss)", criterion5},
      {6, "loss spot values (ln 2 and 0.105361)", criterion6},
      {7, "statistical NE direction (LSPR <= baseline over 12 seeds)", criterion7},
      {8, "determinism (byte-identical rerun CSVs)", criterion8},
      {9, "reference-default config behind --full within 60 minutes", criterion9},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %d: %s (%.1fs)%s%s\n", out.pass ? "PASS" : "FAIL", c.id,
                c.name, secs, out.detail.empty() ? "" : " - ", out.detail.c_str());
    std::fflush(stdout);
    failures += !out.pass;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
