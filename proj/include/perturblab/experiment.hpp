#pragma once

// Experiment front-end: JSON spec files, grid sweeps, per-cell CSV output,
// a JSON summary, and plot emission. Every output byte is a function of
// (spec, base_seed); no timestamps enter data files.

#include <atomic>
#include <bit>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "perturblab/ctr.hpp"
#include "perturblab/lindyn.hpp"
#include "perturblab/losses.hpp"
#include "perturblab/numerics.hpp"

namespace plab::experiment {

using nlohmann::json;

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Spec

enum class Mode { kLindyn, kCtr };

struct LindynGrid {
  std::vector<lindyn::Method> methods{lindyn::Method::kSgd, lindyn::Method::kLspr,
                                      lindyn::Method::kScr};
  std::vector<double> omegas{0.1, 0.9};
  std::vector<double> lambdas{0.001, 1.0};
  std::vector<double> etas{1.4};
  std::vector<double> sigmas{1.0};

  friend bool operator==(const LindynGrid&, const LindynGrid&) = default;
};

struct LindynSettings {
  std::size_t lx = 100;
  std::size_t lh = 10000;
  std::size_t ly = 10;
  std::size_t steps = 100000;
  std::size_t record_every = 500;
  std::optional<double> input_std;
  std::optional<double> teacher_std;
  std::optional<double> init_std;

  friend bool operator==(const LindynSettings&, const LindynSettings&) = default;
};

struct CtrGrid {
  std::vector<ctr::TrainMethod> methods{ctr::TrainMethod::kBaseline,
                                        ctr::TrainMethod::kLspr, ctr::TrainMethod::kScr};
  std::vector<double> lambdas{0.001, 1.0};
  std::vector<PerturbationSpec> perturbations{PerturbationSpec{0.3, 1.0, 0.0, 0.2}};

  friend bool operator==(const CtrGrid&, const CtrGrid&) = default;
};

struct CtrSettings {
  ctr::DatasetConfig dataset;  // label_noise defaulted to 0.1 below
  double train_fraction = 0.5;
  std::size_t hidden_dim = 32;
  std::size_t sparse_dim = 4;
  double init_scale = 0.5;
  ctr::ScrTarget scr_target = ctr::ScrTarget::kBoth;
  double scr_perturb_fraction = 0.25;
  std::size_t batch_size = 64;
  std::size_t epochs = 8;
  double learning_rate = 0.03;

  friend bool operator==(const CtrSettings&, const CtrSettings&) = default;
};

struct ExperimentSpec {
  Mode mode = Mode::kLindyn;
  std::uint64_t base_seed = 42;
  std::size_t replicas = 1;
  std::string output_dir;  // may be empty; resolution happens at run time
  LindynGrid lindyn_grid;
  LindynSettings lindyn;
  CtrGrid ctr_grid;
  CtrSettings ctr;

  void validate() const {
    require(replicas >= 1, "spec: replicas must be >= 1");
    if (mode == Mode::kLindyn) {
      require(!lindyn_grid.methods.empty() && !lindyn_grid.omegas.empty() &&
                  !lindyn_grid.lambdas.empty() && !lindyn_grid.etas.empty() &&
                  !lindyn_grid.sigmas.empty(),
              "spec: empty grid axis");
      require(lindyn.record_every >= 1, "spec: record_every must be >= 1");
    } else {
      require(!ctr_grid.methods.empty() && !ctr_grid.lambdas.empty() &&
                  !ctr_grid.perturbations.empty(),
              "spec: empty grid axis");
      ctr.dataset.validate();
      require(ctr.train_fraction > 0.0 && ctr.train_fraction < 1.0,
              "spec: train_fraction must be in (0,1)");
    }
  }

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

namespace detail {

inline void check_known_keys(const json& obj, const std::vector<std::string>& known,
                             const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const auto& k : known) ok = ok || k == key;
    if (!ok) throw std::invalid_argument("spec: unknown field \"" + key + "\" in " + where);
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument("spec: field \"" + std::string(key) + "\" in " + where +
                                " has the wrong type");
  }
}

inline void read_optional(const json& obj, const char* key, std::optional<double>& out,
                          const std::string& where) {
  if (!obj.contains(key)) return;
  if (obj.at(key).is_null()) {
    out.reset();
    return;
  }
  double v = 0;
  read_field(obj, key, v, where);
  out = v;
}

inline PerturbationSpec perturbation_from_json(const json& j) {
  check_known_keys(j, {"noise_scale", "noise_std", "noise_mean", "dropout_rate"},
                   "perturbation");
  PerturbationSpec p;
  read_field(j, "noise_scale", p.noise_scale, "perturbation");
  read_field(j, "noise_std", p.noise_std, "perturbation");
  read_field(j, "noise_mean", p.noise_mean, "perturbation");
  read_field(j, "dropout_rate", p.dropout_rate, "perturbation");
  p.validate();
  return p;
}

inline json perturbation_to_json(const PerturbationSpec& p) {
  return json{{"noise_scale", p.noise_scale},
              {"noise_std", p.noise_std},
              {"noise_mean", p.noise_mean},
              {"dropout_rate", p.dropout_rate}};
}

}  // namespace detail

/// Parses and validates a spec file. Omitted lindyn fields default to the
/// reference configuration (omega {0.1, 0.9}, lambda {0.001, 1}, eta 1.4,
/// lx 100, lh 10^4, ly 10, 10^5 steps). Unknown fields are errors.
inline ExperimentSpec parse_spec(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("spec: not valid JSON: ") + e.what());
  }
  detail::check_known_keys(
      root, {"mode", "base_seed", "replicas", "output_dir", "grid", "lindyn", "ctr"}, "spec");

  ExperimentSpec spec;
  spec.ctr.dataset.label_noise = 0.1;

  std::string mode = "lindyn";
  detail::read_field(root, "mode", mode, "spec");
  if (mode == "lindyn")
    spec.mode = Mode::kLindyn;
  else if (mode == "ctr")
    spec.mode = Mode::kCtr;
  else
    throw std::invalid_argument("spec: field \"mode\" must be \"lindyn\" or \"ctr\"");

  detail::read_field(root, "base_seed", spec.base_seed, "spec");
  detail::read_field(root, "replicas", spec.replicas, "spec");
  detail::read_field(root, "output_dir", spec.output_dir, "spec");

  if (root.contains("grid")) {
    const json& g = root.at("grid");
    if (spec.mode == Mode::kLindyn) {
      detail::check_known_keys(g, {"method", "omega", "lambda", "eta", "sigma"}, "grid");
      if (g.contains("method")) {
        spec.lindyn_grid.methods.clear();
        for (const auto& m : g.at("method"))
          spec.lindyn_grid.methods.push_back(lindyn::parse_method(m.get<std::string>()));
      }
      detail::read_field(g, "omega", spec.lindyn_grid.omegas, "grid");
      detail::read_field(g, "lambda", spec.lindyn_grid.lambdas, "grid");
      detail::read_field(g, "eta", spec.lindyn_grid.etas, "grid");
      detail::read_field(g, "sigma", spec.lindyn_grid.sigmas, "grid");
    } else {
      detail::check_known_keys(g, {"method", "lambda", "perturbation"}, "grid");
      if (g.contains("method")) {
        spec.ctr_grid.methods.clear();
        for (const auto& m : g.at("method"))
          spec.ctr_grid.methods.push_back(ctr::parse_train_method(m.get<std::string>()));
      }
      detail::read_field(g, "lambda", spec.ctr_grid.lambdas, "grid");
      if (g.contains("perturbation")) {
        spec.ctr_grid.perturbations.clear();
        for (const auto& p : g.at("perturbation"))
          spec.ctr_grid.perturbations.push_back(detail::perturbation_from_json(p));
      }
    }
  }

  if (root.contains("lindyn")) {
    require(spec.mode == Mode::kLindyn, "spec: \"lindyn\" section in ctr mode");
    const json& s = root.at("lindyn");
    detail::check_known_keys(s,
                             {"lx", "lh", "ly", "steps", "record_every", "input_std",
                              "teacher_std", "init_std"},
                             "lindyn");
    detail::read_field(s, "lx", spec.lindyn.lx, "lindyn");
    detail::read_field(s, "lh", spec.lindyn.lh, "lindyn");
    detail::read_field(s, "ly", spec.lindyn.ly, "lindyn");
    detail::read_field(s, "steps", spec.lindyn.steps, "lindyn");
    detail::read_field(s, "record_every", spec.lindyn.record_every, "lindyn");
    detail::read_optional(s, "input_std", spec.lindyn.input_std, "lindyn");
    detail::read_optional(s, "teacher_std", spec.lindyn.teacher_std, "lindyn");
    detail::read_optional(s, "init_std", spec.lindyn.init_std, "lindyn");
  }

  if (root.contains("ctr")) {
    require(spec.mode == Mode::kCtr, "spec: \"ctr\" section in lindyn mode");
    const json& s = root.at("ctr");
    detail::check_known_keys(
        s, {"dataset", "train_fraction", "hidden_dim", "sparse_dim", "init_scale",
            "scr_target", "scr_perturb_fraction", "batch_size", "epochs", "learning_rate"},
        "ctr");
    if (s.contains("dataset")) {
      const json& d = s.at("dataset");
      detail::check_known_keys(d,
                               {"n_examples", "dense_dim", "n_embeddings", "embed_dim",
                                "n_sparse_slots", "sparse_vocab", "label_noise",
                                "logit_scale"},
                               "dataset");
      detail::read_field(d, "n_examples", spec.ctr.dataset.n_examples, "dataset");
      detail::read_field(d, "dense_dim", spec.ctr.dataset.dense_dim, "dataset");
      detail::read_field(d, "n_embeddings", spec.ctr.dataset.n_embeddings, "dataset");
      detail::read_field(d, "embed_dim", spec.ctr.dataset.embed_dim, "dataset");
      detail::read_field(d, "n_sparse_slots", spec.ctr.dataset.n_sparse_slots, "dataset");
      detail::read_field(d, "sparse_vocab", spec.ctr.dataset.sparse_vocab, "dataset");
      detail::read_field(d, "label_noise", spec.ctr.dataset.label_noise, "dataset");
      detail::read_field(d, "logit_scale", spec.ctr.dataset.logit_scale, "dataset");
    }
    detail::read_field(s, "train_fraction", spec.ctr.train_fraction, "ctr");
    detail::read_field(s, "hidden_dim", spec.ctr.hidden_dim, "ctr");
    detail::read_field(s, "sparse_dim", spec.ctr.sparse_dim, "ctr");
    detail::read_field(s, "init_scale", spec.ctr.init_scale, "ctr");
    if (s.contains("scr_target"))
      spec.ctr.scr_target = ctr::parse_scr_target(s.at("scr_target").get<std::string>());
    detail::read_field(s, "scr_perturb_fraction", spec.ctr.scr_perturb_fraction, "ctr");
    detail::read_field(s, "batch_size", spec.ctr.batch_size, "ctr");
    detail::read_field(s, "epochs", spec.ctr.epochs, "ctr");
    detail::read_field(s, "learning_rate", spec.ctr.learning_rate, "ctr");
  }

  spec.validate();
  return spec;
}

/// Serializes with every field explicit; parse(serialize(s)) == s.
inline std::string serialize_spec(const ExperimentSpec& spec) {
  json root;
  root["mode"] = spec.mode == Mode::kLindyn ? "lindyn" : "ctr";
  root["base_seed"] = spec.base_seed;
  root["replicas"] = spec.replicas;
  root["output_dir"] = spec.output_dir;
  json grid;
  if (spec.mode == Mode::kLindyn) {
    grid["method"] = json::array();
    for (auto m : spec.lindyn_grid.methods) grid["method"].push_back(lindyn::method_name(m));
    grid["omega"] = spec.lindyn_grid.omegas;
    grid["lambda"] = spec.lindyn_grid.lambdas;
    grid["eta"] = spec.lindyn_grid.etas;
    grid["sigma"] = spec.lindyn_grid.sigmas;
    root["grid"] = grid;
    json s;
    s["lx"] = spec.lindyn.lx;
    s["lh"] = spec.lindyn.lh;
    s["ly"] = spec.lindyn.ly;
    s["steps"] = spec.lindyn.steps;
    s["record_every"] = spec.lindyn.record_every;
    if (spec.lindyn.input_std) s["input_std"] = *spec.lindyn.input_std;
    if (spec.lindyn.teacher_std) s["teacher_std"] = *spec.lindyn.teacher_std;
    if (spec.lindyn.init_std) s["init_std"] = *spec.lindyn.init_std;
    root["lindyn"] = s;
  } else {
    grid["method"] = json::array();
    for (auto m : spec.ctr_grid.methods) grid["method"].push_back(ctr::train_method_name(m));
    grid["lambda"] = spec.ctr_grid.lambdas;
    grid["perturbation"] = json::array();
    for (const auto& p : spec.ctr_grid.perturbations)
      grid["perturbation"].push_back(detail::perturbation_to_json(p));
    root["grid"] = grid;
    json s;
    s["dataset"] = json{{"n_examples", spec.ctr.dataset.n_examples},
                        {"dense_dim", spec.ctr.dataset.dense_dim},
                        {"n_embeddings", spec.ctr.dataset.n_embeddings},
                        {"embed_dim", spec.ctr.dataset.embed_dim},
                        {"n_sparse_slots", spec.ctr.dataset.n_sparse_slots},
                        {"sparse_vocab", spec.ctr.dataset.sparse_vocab},
                        {"label_noise", spec.ctr.dataset.label_noise},
                        {"logit_scale", spec.ctr.dataset.logit_scale}};
    s["train_fraction"] = spec.ctr.train_fraction;
    s["hidden_dim"] = spec.ctr.hidden_dim;
    s["sparse_dim"] = spec.ctr.sparse_dim;
    s["init_scale"] = spec.ctr.init_scale;
    s["scr_target"] = ctr::scr_target_name(spec.ctr.scr_target);
    s["scr_perturb_fraction"] = spec.ctr.scr_perturb_fraction;
    s["batch_size"] = spec.ctr.batch_size;
    s["epochs"] = spec.ctr.epochs;
    s["learning_rate"] = spec.ctr.learning_rate;
    root["ctr"] = s;
  }
  return root.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Cells and seeds

struct LindynCell {
  lindyn::Method method;
  double omega, lambda, eta, sigma;
};

struct CtrCell {
  ctr::TrainMethod method;
  double lambda;
  PerturbationSpec perturbation;
  std::size_t perturbation_index;
};

inline std::vector<LindynCell> enumerate_cells(const LindynGrid& g) {
  std::vector<LindynCell> cells;
  for (auto m : g.methods)
    for (double w : g.omegas)
      for (double l : g.lambdas)
        for (double e : g.etas)
          for (double s : g.sigmas) cells.push_back({m, w, l, e, s});
  return cells;
}

inline std::vector<CtrCell> enumerate_cells(const CtrGrid& g) {
  std::vector<CtrCell> cells;
  for (auto m : g.methods)
    for (double l : g.lambdas)
      for (std::size_t p = 0; p < g.perturbations.size(); ++p)
        cells.push_back({m, l, g.perturbations[p], p});
  return cells;
}

inline std::uint64_t double_bits(double v) { return std::bit_cast<std::uint64_t>(v); }

/// Cell seeds hash the cell's parameter values (never its grid position,
/// so edits to the grid leave other cells' streams untouched) and exclude
/// the method, so methods at equal parameters run on paired streams.
inline std::uint64_t cell_seed(std::uint64_t base, const LindynCell& c, std::size_t replica) {
  std::uint64_t h = splitmix64(base);
  h = mix_seed(h, double_bits(c.omega));
  h = mix_seed(h, double_bits(c.lambda));
  h = mix_seed(h, double_bits(c.eta));
  h = mix_seed(h, double_bits(c.sigma));
  return mix_seed(h, replica);
}

inline std::uint64_t cell_seed(std::uint64_t base, const CtrCell& c, std::size_t replica) {
  std::uint64_t h = splitmix64(base);
  h = mix_seed(h, double_bits(c.lambda));
  h = mix_seed(h, double_bits(c.perturbation.noise_scale));
  h = mix_seed(h, double_bits(c.perturbation.noise_std));
  h = mix_seed(h, double_bits(c.perturbation.noise_mean));
  h = mix_seed(h, double_bits(c.perturbation.dropout_rate));
  return mix_seed(h, replica);
}

/// Dataset streams depend on the replica only: all cells of one replica
/// train and evaluate on the same drawn dataset.
inline std::uint64_t dataset_seed(std::uint64_t base, std::size_t replica) {
  return mix_seed(mix_seed(splitmix64(base), 0xDA7A), replica);
}

// ---------------------------------------------------------------------------
// Run report

struct CellOutcome {
  std::size_t cell_index = 0;
  std::size_t replica = 0;
  std::string label;
  std::string csv_file;
  std::uint64_t seed = 0;
  std::optional<std::size_t> diverged_at;
  // lindyn payload
  lindyn::Trajectory trajectory;
  // ctr payload
  std::vector<ctr::EpochRecord> epochs;
  std::optional<double> final_eval_ne;
};

struct RunReport {
  ExperimentSpec spec;
  std::vector<CellOutcome> outcomes;  // cell-major, replica-minor
  int exit_code = 0;
};

struct RunOptions {
  std::string output_dir;  // resolved by the caller; must be nonempty
  std::size_t jobs = 0;    // 0 = hardware concurrency
};

namespace detail {

inline std::string lindyn_label(const LindynCell& c) {
  return std::string(lindyn::method_name(c.method)) + " \xcf\x89=" + fmt_short(c.omega) +
         " \xce\xbb=" + fmt_short(c.lambda);
}

inline std::string ctr_label(const CtrCell& c) {
  return std::string(ctr::train_method_name(c.method)) + " \xce\xbb=" + fmt_short(c.lambda);
}

inline std::string lindyn_csv_name(std::size_t index, const LindynCell& c, std::size_t rep) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "cell_%03zu_%s_w%s_l%s_rep%zu.csv", index,
                lindyn::method_name(c.method), fmt_short(c.omega).c_str(),
                fmt_short(c.lambda).c_str(), rep);
  return buf;
}

inline std::string ctr_csv_name(std::size_t index, const CtrCell& c, std::size_t rep) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "cell_%03zu_%s_l%s_p%zu_rep%zu.csv", index,
                ctr::train_method_name(c.method), fmt_short(c.lambda).c_str(),
                c.perturbation_index, rep);
  return buf;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << content;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

inline std::string trajectory_csv(const lindyn::Trajectory& traj) {
  std::string out = "step,epsilon,gamma\n";
  for (const auto& r : traj.records) {
    out += std::to_string(r.step);
    out += ',';
    out += fmt17(r.epsilon);
    out += ',';
    out += fmt17(r.gamma);
    out += '\n';
  }
  return out;
}

inline std::string epochs_csv(const std::vector<ctr::EpochRecord>& epochs) {
  std::string out = "epoch,train_ne,eval_ne\n";
  for (const auto& r : epochs) {
    out += std::to_string(r.epoch);
    out += ',';
    out += fmt17(r.train_ne);
    out += ',';
    out += fmt17(r.eval_ne);
    out += '\n';
  }
  return out;
}

// Minimal fixed-size worker pool over an index range.
inline void parallel_for(std::size_t n_tasks, std::size_t jobs,
                         const std::function<void(std::size_t)>& body) {
  if (jobs == 0) jobs = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  jobs = std::min(jobs, std::max<std::size_t>(1, n_tasks));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n_tasks);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n_tasks) return;
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

inline lindyn::DynConfig make_dyn_config(const ExperimentSpec& spec, const LindynCell& cell,
                                         std::uint64_t seed) {
  lindyn::DynConfig cfg;
  cfg.lx = spec.lindyn.lx;
  cfg.lh = spec.lindyn.lh;
  cfg.ly = spec.lindyn.ly;
  cfg.steps = spec.lindyn.steps;
  cfg.record_every = spec.lindyn.record_every;
  cfg.input_std = spec.lindyn.input_std;
  cfg.teacher_std = spec.lindyn.teacher_std;
  cfg.init_std = spec.lindyn.init_std;
  cfg.method = cell.method;
  cfg.omega = cell.omega;
  cfg.lambda = cell.lambda;
  cfg.eta = cell.eta;
  cfg.sigma = cell.sigma;
  cfg.seed = seed;
  return cfg;
}

inline json summarize(const RunReport& report);

/// Runs every (cell, replica) of the spec's grid, writes one CSV per pair
/// plus summary.json under options.output_dir, and returns the in-memory
/// report. Divergence is a reported outcome; contract violations throw.
inline RunReport run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
  spec.validate();
  require(!options.output_dir.empty(), "run_experiment: output_dir not resolved");
  const std::filesystem::path out_dir(options.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir))
    throw std::runtime_error("run_experiment: cannot create output dir " + out_dir.string());

  RunReport report;
  report.spec = spec;

  if (spec.mode == Mode::kLindyn) {
    const auto cells = enumerate_cells(spec.lindyn_grid);
    report.outcomes.resize(cells.size() * spec.replicas);
    detail::parallel_for(report.outcomes.size(), options.jobs, [&](std::size_t task) {
      const std::size_t ci = task / spec.replicas;
      const std::size_t rep = task % spec.replicas;
      const LindynCell& cell = cells[ci];
      CellOutcome& out = report.outcomes[task];
      out.cell_index = ci;
      out.replica = rep;
      out.label = detail::lindyn_label(cell);
      out.seed = cell_seed(spec.base_seed, cell, rep);
      out.csv_file = detail::lindyn_csv_name(ci, cell, rep);
      out.trajectory = lindyn::run_trajectory(make_dyn_config(spec, cell, out.seed));
      out.diverged_at = out.trajectory.diverged_at;
      detail::write_file(out_dir / out.csv_file, detail::trajectory_csv(out.trajectory));
    });
  } else {
    const auto cells = enumerate_cells(spec.ctr_grid);
    // Datasets are per replica and shared across cells; generate them once.
    std::vector<std::vector<Example>> train_sets(spec.replicas), eval_sets(spec.replicas);
    for (std::size_t rep = 0; rep < spec.replicas; ++rep) {
      ctr::DatasetConfig dcfg = spec.ctr.dataset;
      dcfg.seed = dataset_seed(spec.base_seed, rep);
      const auto all = ctr::generate_dataset(dcfg);
      const auto n_train = static_cast<std::size_t>(
          spec.ctr.train_fraction * static_cast<double>(all.size()));
      require(n_train >= 1 && n_train < all.size(), "spec: degenerate train/eval split");
      train_sets[rep].assign(all.begin(), all.begin() + n_train);
      eval_sets[rep].assign(all.begin() + n_train, all.end());
    }
    report.outcomes.resize(cells.size() * spec.replicas);
    detail::parallel_for(report.outcomes.size(), options.jobs, [&](std::size_t task) {
      const std::size_t ci = task / spec.replicas;
      const std::size_t rep = task % spec.replicas;
      const CtrCell& cell = cells[ci];
      CellOutcome& out = report.outcomes[task];
      out.cell_index = ci;
      out.replica = rep;
      out.label = detail::ctr_label(cell);
      out.seed = cell_seed(spec.base_seed, cell, rep);
      out.csv_file = detail::ctr_csv_name(ci, cell, rep);

      ctr::TrainConfig tcfg;
      tcfg.method = cell.method;
      tcfg.lambda = cell.lambda;
      tcfg.perturbation = cell.perturbation;
      tcfg.scr_target = spec.ctr.scr_target;
      tcfg.scr_perturb_fraction = spec.ctr.scr_perturb_fraction;
      tcfg.batch_size = spec.ctr.batch_size;
      tcfg.epochs = spec.ctr.epochs;
      tcfg.learning_rate = spec.ctr.learning_rate;
      tcfg.seed = out.seed;

      Rng model_rng(mix_seed(out.seed, 0x370DE1));
      ctr::CtrModel model = ctr::make_model(spec.ctr.dataset, spec.ctr.hidden_dim,
                                            spec.ctr.sparse_dim, spec.ctr.init_scale,
                                            model_rng);
      try {
        const ctr::TrainResult r =
            ctr::detail::train_impl(model, train_sets[rep], eval_sets[rep], tcfg);
        out.epochs = r.epochs;
        if (!r.epochs.empty()) out.final_eval_ne = r.epochs.back().eval_ne;
      } catch (const ctr::DivergenceError& e) {
        out.diverged_at = e.epoch;
      }
      detail::write_file(out_dir / out.csv_file, detail::epochs_csv(out.epochs));
    });
  }

  detail::write_file(out_dir / "summary.json", summarize(report).dump(2) + "\n");
  return report;
}

/// Per-cell aggregation: replica list, means of the final records, and for
/// ctr mode the relative NE gains against the first baseline cell.
inline json summarize(const RunReport& report) {
  const ExperimentSpec& spec = report.spec;
  json root;
  root["mode"] = spec.mode == Mode::kLindyn ? "lindyn" : "ctr";
  root["base_seed"] = spec.base_seed;
  root["replicas"] = spec.replicas;
  json cells = json::array();

  if (spec.mode == Mode::kLindyn) {
    const auto cell_list = enumerate_cells(spec.lindyn_grid);
    for (std::size_t ci = 0; ci < cell_list.size(); ++ci) {
      const LindynCell& cell = cell_list[ci];
      json jc;
      jc["index"] = ci;
      jc["method"] = lindyn::method_name(cell.method);
      jc["omega"] = cell.omega;
      jc["lambda"] = cell.lambda;
      jc["eta"] = cell.eta;
      jc["sigma"] = cell.sigma;
      jc["label"] = detail::lindyn_label(cell);
      json reps = json::array();
      double sum_eps = 0.0, sum_gamma = 0.0;
      std::size_t diverged = 0;
      for (std::size_t rep = 0; rep < spec.replicas; ++rep) {
        const CellOutcome& out = report.outcomes[ci * spec.replicas + rep];
        const auto& last = out.trajectory.records.back();
        json jr;
        jr["replica"] = rep;
        jr["seed"] = out.seed;
        jr["csv"] = out.csv_file;
        jr["final_epsilon"] = last.epsilon;
        jr["final_gamma"] = last.gamma;
        jr["diverged_at"] =
            out.diverged_at ? json(*out.diverged_at) : json(nullptr);
        diverged += out.diverged_at.has_value();
        sum_eps += last.epsilon;
        sum_gamma += last.gamma;
        reps.push_back(jr);
      }
      jc["runs"] = reps;
      jc["mean_final_epsilon"] = sum_eps / static_cast<double>(spec.replicas);
      jc["mean_final_gamma"] = sum_gamma / static_cast<double>(spec.replicas);
      jc["diverged_runs"] = diverged;
      cells.push_back(jc);
    }
  } else {
    const auto cell_list = enumerate_cells(spec.ctr_grid);
    std::vector<std::optional<double>> means(cell_list.size());
    for (std::size_t ci = 0; ci < cell_list.size(); ++ci) {
      double sum = 0.0;
      bool complete = true;
      for (std::size_t rep = 0; rep < spec.replicas; ++rep) {
        const CellOutcome& out = report.outcomes[ci * spec.replicas + rep];
        if (out.final_eval_ne)
          sum += *out.final_eval_ne;
        else
          complete = false;
      }
      if (complete) means[ci] = sum / static_cast<double>(spec.replicas);
    }
    std::optional<std::size_t> baseline_index;
    for (std::size_t ci = 0; ci < cell_list.size(); ++ci)
      if (cell_list[ci].method == ctr::TrainMethod::kBaseline && means[ci]) {
        baseline_index = ci;
        break;
      }

    json table = json::array();
    for (std::size_t ci = 0; ci < cell_list.size(); ++ci) {
      const CtrCell& cell = cell_list[ci];
      json jc;
      jc["index"] = ci;
      jc["method"] = ctr::train_method_name(cell.method);
      jc["lambda"] = cell.lambda;
      jc["perturbation"] = detail::perturbation_to_json(cell.perturbation);
      jc["label"] = detail::ctr_label(cell);
      json reps = json::array();
      std::size_t diverged = 0;
      for (std::size_t rep = 0; rep < spec.replicas; ++rep) {
        const CellOutcome& out = report.outcomes[ci * spec.replicas + rep];
        json jr;
        jr["replica"] = rep;
        jr["seed"] = out.seed;
        jr["csv"] = out.csv_file;
        jr["final_eval_ne"] = out.final_eval_ne ? json(*out.final_eval_ne) : json(nullptr);
        jr["diverged_at"] = out.diverged_at ? json(*out.diverged_at) : json(nullptr);
        diverged += out.diverged_at.has_value();
        reps.push_back(jr);
      }
      jc["runs"] = reps;
      jc["seed_count"] = spec.replicas;
      jc["mean_final_eval_ne"] = means[ci] ? json(*means[ci]) : json(nullptr);
      jc["diverged_runs"] = diverged;
      if (baseline_index && means[ci]) {
        const double gain = relative_ne_gain(*means[*baseline_index], *means[ci]);
        jc["relative_gain_vs_baseline"] = gain;
        char buf[48];
        if (ci == *baseline_index)
          std::snprintf(buf, sizeof buf, "0 %%");
        else
          std::snprintf(buf, sizeof buf, "%.3g %%", 100.0 * gain);
        jc["relative_gain_display"] = buf;
        table.push_back(json{{"model", ctr::train_method_name(cell.method)},
                             {"label", detail::ctr_label(cell)},
                             {"gain", std::string(buf)}});
      } else {
        jc["relative_gain_vs_baseline"] = nullptr;
        jc["relative_gain_display"] = nullptr;
      }
      cells.push_back(jc);
    }
    if (baseline_index) root["baseline_cell"] = *baseline_index;
    root["gains_table"] = table;
  }
  root["cells"] = cells;
  return root;
}

// ---------------------------------------------------------------------------
// Plot emission

struct PlotFiles {
  std::string data_csv;
  std::string svg;
};

namespace detail {

struct Series {
  std::string label;
  std::vector<std::pair<std::size_t, double>> points;
};

inline std::string svg_plot(const std::vector<Series>& series, const std::string& title,
                            bool log_y) {
  const double width = 960, height = 600;
  const double ml = 80, mr = 260, mt = 50, mb = 60;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (const auto& [step, raw] : s.points) {
      const double v = log_y ? std::log10(std::max(raw, 1e-300)) : raw;
      xmin = std::min(xmin, static_cast<double>(step));
      xmax = std::max(xmax, static_cast<double>(step));
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  const auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
  const auto sy = [&](double y) {
    return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
  };
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
                                  "#aec7e8", "#ffbb78"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << ml << "\" y=\"30\" font-family=\"sans-serif\" font-size=\"18\">"
     << title << (log_y ? " (log10 scale)" : "") << "</text>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
     << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
     << height - mb << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double fx = xmin + (xmax - xmin) * tick / 4.0;
    const double fy = ymin + (ymax - ymin) * tick / 4.0;
    os << "<text x=\"" << sx(fx) << "\" y=\"" << height - mb + 24
       << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
       << fmt_short(fx) << "</text>\n";
    os << "<text x=\"" << ml - 8 << "\" y=\"" << sy(fy) + 4
       << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">"
       << fmt_short(fy) << "</text>\n";
  }
  os << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 16
     << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">step</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = palette[i % (sizeof palette / sizeof *palette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [step, raw] : series[i].points) {
      const double v = log_y ? std::log10(std::max(raw, 1e-300)) : raw;
      os << sx(static_cast<double>(step)) << ',' << sy(v) << ' ';
    }
    os << "\"/>\n";
    const double ly = mt + 18.0 * static_cast<double>(i);
    os << "<line x1=\"" << width - mr + 16 << "\" y1=\"" << ly << "\" x2=\""
       << width - mr + 44 << "\" y2=\"" << ly << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << width - mr + 50 << "\" y=\"" << ly + 4
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[i].label
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace detail

/// One line per grid cell (replica mean at each recorded step); the data
/// CSV is the authoritative artifact, the SVG a convenience rendering.
inline PlotFiles emit_plot(const RunReport& report, const std::string& panel,
                           const std::string& output_dir) {
  require(report.spec.mode == Mode::kLindyn, "emit_plot: report has no trajectories");
  require(panel == "gamma" || panel == "epsilon", "emit_plot: panel must be gamma|epsilon");
  require(!report.outcomes.empty(), "emit_plot: empty report");
  const bool gamma_panel = panel == "gamma";

  // Outcomes arrive cell-major; group consecutive runs of one cell.
  std::vector<detail::Series> series;
  std::string csv = "cell,label,step," + panel + "\n";
  for (std::size_t at = 0; at < report.outcomes.size();) {
    const std::size_t ci = report.outcomes[at].cell_index;
    std::size_t end = at;
    while (end < report.outcomes.size() && report.outcomes[end].cell_index == ci) ++end;

    detail::Series s;
    s.label = report.outcomes[at].label;
    // Mean across replicas at each recorded step; divergence-truncated
    // replicas contribute only the steps they reached.
    const auto& lead = report.outcomes[at].trajectory.records;
    for (std::size_t rec = 0; rec < lead.size(); ++rec) {
      const std::size_t step = lead[rec].step;
      double sum = 0.0;
      std::size_t n = 0;
      for (std::size_t k = at; k < end; ++k) {
        const auto& records = report.outcomes[k].trajectory.records;
        if (rec < records.size() && records[rec].step == step) {
          sum += gamma_panel ? records[rec].gamma : records[rec].epsilon;
          ++n;
        }
      }
      if (n == 0) continue;
      const double value = sum / static_cast<double>(n);
      s.points.emplace_back(step, value);
      csv += std::to_string(ci) + "," + s.label + "," + std::to_string(step) + "," +
             fmt17(value) + "\n";
    }
    series.push_back(std::move(s));
    at = end;
  }

  const std::filesystem::path dir(output_dir);
  std::filesystem::create_directories(dir);
  PlotFiles files;
  files.data_csv = (dir / ("plot_" + panel + ".csv")).string();
  files.svg = (dir / ("plot_" + panel + ".svg")).string();
  detail::write_file(files.data_csv, csv);
  const std::string title =
      gamma_panel ? "Alignment with the optimal weight" : "Error in the weight space";
  detail::write_file(files.svg, detail::svg_plot(series, title, !gamma_panel));
  return files;
}

// ---------------------------------------------------------------------------
// Report loading (for the plot subcommand)

inline std::vector<lindyn::TrajectoryRecord> parse_trajectory_csv(std::istream& is) {
  std::vector<lindyn::TrajectoryRecord> records;
  std::string line;
  std::getline(is, line);
  require(line == "step,epsilon,gamma", "trajectory csv: bad header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    lindyn::TrajectoryRecord r;
    char* end = nullptr;
    r.step = std::strtoull(line.c_str(), &end, 10);
    require(end && *end == ',', "trajectory csv: bad row");
    r.epsilon = std::strtod(end + 1, &end);
    require(end && *end == ',', "trajectory csv: bad row");
    r.gamma = std::strtod(end + 1, &end);
    records.push_back(r);
  }
  return records;
}

/// Rebuilds enough of a lindyn RunReport from an output directory to
/// re-emit plots: grid geometry from summary.json, records from the CSVs.
inline RunReport load_lindyn_report(const std::string& dir) {
  const std::filesystem::path root(dir);
  std::ifstream sf(root / "summary.json");
  require(sf.good(), "load_report: missing summary.json in " + dir);
  json summary = json::parse(sf);
  require(summary.at("mode") == "lindyn", "load_report: not a lindyn report");

  RunReport report;
  report.spec.mode = Mode::kLindyn;
  report.spec.base_seed = summary.at("base_seed").get<std::uint64_t>();
  report.spec.replicas = summary.at("replicas").get<std::size_t>();
  // A loaded report carries no grid; consumers must group by outcomes.
  report.spec.lindyn_grid = LindynGrid{{}, {}, {}, {}, {}};

  // The summary's cell list is the authoritative enumeration; outcomes are
  // rebuilt in cell-major order with records read back from the CSVs.
  for (const auto& jc : summary.at("cells")) {
    for (const auto& jr : jc.at("runs")) {
      CellOutcome out;
      out.cell_index = jc.at("index").get<std::size_t>();
      out.replica = jr.at("replica").get<std::size_t>();
      out.seed = jr.at("seed").get<std::uint64_t>();
      out.label = jc.at("label").get<std::string>();
      out.csv_file = jr.at("csv").get<std::string>();
      if (!jr.at("diverged_at").is_null())
        out.diverged_at = jr.at("diverged_at").get<std::size_t>();
      std::ifstream cf(root / out.csv_file);
      require(cf.good(), "load_report: missing " + out.csv_file);
      out.trajectory.records = parse_trajectory_csv(cf);
      out.trajectory.diverged_at = out.diverged_at;
      report.outcomes.push_back(std::move(out));
    }
  }
  return report;
}

/// Output-dir precedence: CLI flag, then the environment override, then
/// the spec file, then a local default.
inline std::string resolve_output_dir(const ExperimentSpec& spec, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("PERTURBLAB_OUT"); env && *env) return env;
  if (!spec.output_dir.empty()) return spec.output_dir;
  return "perturblab_out";
}

}  // namespace plab::experiment
