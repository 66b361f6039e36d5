#pragma once

// Toy end-to-end CTR pipeline: synthetic dataset from a logistic teacher
// over dense, embedding, and sparse slot features; a small model (slot
// embedding tables -> concatenation -> one ReLU hidden layer -> logit);
// and three Adagrad trainers (baseline, SCR, LSPR) evaluated with
// normalized entropy on held-out data.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "perturblab/augment.hpp"
#include "perturblab/losses.hpp"
#include "perturblab/numerics.hpp"

namespace plab::ctr {

/// Thrown when training produces non-finite weights; carries the epoch.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t epoch_index, const std::string& what_arg)
      : std::runtime_error(what_arg), epoch(epoch_index) {}
  std::size_t epoch;
};

// ---------------------------------------------------------------------------
// Synthetic dataset

struct DatasetConfig {
  std::size_t n_examples = 6000;
  std::size_t dense_dim = 16;
  std::size_t n_embeddings = 2;
  std::size_t embed_dim = 8;
  std::size_t n_sparse_slots = 4;
  std::size_t sparse_vocab = 8;  // per-slot vocabulary size
  double label_noise = 0.0;      // flip probability, in [0, 0.5)
  double logit_scale = 1.0;      // scales the teacher logit before the sigmoid
  std::uint64_t seed = 0;

  void validate() const {
    require(n_examples >= 1, "DatasetConfig: n_examples must be >= 1");
    require(dense_dim >= 1 && n_embeddings >= 1 && embed_dim >= 1,
            "DatasetConfig: feature dims must be >= 1");
    require(n_sparse_slots >= 1 && sparse_vocab >= 1,
            "DatasetConfig: sparse dims must be >= 1");
    require(label_noise >= 0.0 && label_noise < 0.5,
            "DatasetConfig: label_noise must be in [0, 0.5)");
    require(logit_scale > 0.0, "DatasetConfig: logit_scale must be > 0");
  }

  friend bool operator==(const DatasetConfig&, const DatasetConfig&) = default;
};

/// Probability that a sparse slot carries a value at generation time.
inline constexpr double kSlotPresence = 0.9;

/// Ground-truth logistic scorer over all three feature groups. Weight
/// scales split the logit variance roughly evenly across groups, and the
/// negative bias puts the base positive rate in [0.05, 0.5].
struct CtrTeacher {
  Vector w_dense;
  std::vector<Vector> w_embed;
  std::vector<Vector> slot_scores;  // one score per (slot, value)
  double bias = -1.2;
  double logit_scale = 1.0;

  double logit(const Example& ex) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < w_dense.size(); ++j) acc += w_dense[j] * ex.dense[j];
    for (std::size_t i = 0; i < w_embed.size(); ++i)
      for (std::size_t j = 0; j < w_embed[i].size(); ++j)
        acc += w_embed[i][j] * ex.embeddings[i][j];
    for (std::size_t s = 0; s < slot_scores.size(); ++s)
      if (ex.sparse[s]) acc += slot_scores[s][static_cast<std::size_t>(*ex.sparse[s])];
    return logit_scale * (acc + bias);
  }
};

inline CtrTeacher make_teacher(const DatasetConfig& cfg, Rng& rng) {
  cfg.validate();
  CtrTeacher t;
  t.logit_scale = cfg.logit_scale;
  const double dense_std = 1.0 / std::sqrt(3.0 * static_cast<double>(cfg.dense_dim));
  const double embed_std =
      1.0 / std::sqrt(3.0 * static_cast<double>(cfg.n_embeddings * cfg.embed_dim));
  const double slot_std = 1.0 / std::sqrt(3.0 * static_cast<double>(cfg.n_sparse_slots));
  t.w_dense = sample_gaussian(rng, cfg.dense_dim, 0.0, dense_std);
  for (std::size_t i = 0; i < cfg.n_embeddings; ++i)
    t.w_embed.push_back(sample_gaussian(rng, cfg.embed_dim, 0.0, embed_std));
  for (std::size_t s = 0; s < cfg.n_sparse_slots; ++s)
    t.slot_scores.push_back(sample_gaussian(rng, cfg.sparse_vocab, 0.0, slot_std));
  return t;
}

/// Deterministic from cfg.seed. Per example, draw order is: dense block,
/// embeddings, slots (presence then value), label uniform, flip uniform.
inline std::vector<Example> generate_dataset(const DatasetConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const CtrTeacher teacher = make_teacher(cfg, rng);
  std::vector<Example> out;
  out.reserve(cfg.n_examples);
  for (std::size_t n = 0; n < cfg.n_examples; ++n) {
    Example ex;
    ex.dense = sample_gaussian(rng, cfg.dense_dim, 0.0, 1.0);
    for (std::size_t i = 0; i < cfg.n_embeddings; ++i)
      ex.embeddings.push_back(sample_gaussian(rng, cfg.embed_dim, 0.0, 1.0));
    for (std::size_t s = 0; s < cfg.n_sparse_slots; ++s) {
      const bool present = rng.next_uniform() < kSlotPresence;
      const auto value = static_cast<std::int64_t>(rng.next_u64() % cfg.sparse_vocab);
      ex.sparse.push_back(present ? SparseSlot{value} : SparseSlot{});
    }
    const double p = 1.0 / (1.0 + std::exp(-teacher.logit(ex)));
    ex.label = rng.next_uniform() < p ? 1 : 0;
    if (rng.next_uniform() < cfg.label_noise) ex.label = 1 - ex.label;
    out.push_back(std::move(ex));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model

struct CtrModel {
  std::size_t dense_dim = 0;
  std::size_t n_embeddings = 0;
  std::size_t embed_dim = 0;
  std::size_t n_slots = 0;
  std::size_t vocab = 0;
  std::size_t sparse_dim = 0;
  std::size_t hidden_dim = 0;

  std::vector<Matrix> tables;  // per slot: vocab x sparse_dim
  Matrix w_in;                 // hidden_dim x in_dim
  Vector b_in;
  Vector w_out;  // hidden_dim
  double b_out = 0.0;

  // Adagrad accumulators, one per weight.
  std::vector<Matrix> tables_acc;
  Matrix w_in_acc;
  Vector b_in_acc;
  Vector w_out_acc;
  double b_out_acc = 0.0;

  std::size_t in_dim() const {
    return dense_dim + n_embeddings * embed_dim + n_slots * sparse_dim;
  }
};

inline CtrModel make_model(const DatasetConfig& data_cfg, std::size_t hidden_dim,
                           std::size_t sparse_dim, double init_scale, Rng& rng) {
  require(hidden_dim >= 1 && sparse_dim >= 1, "make_model: dims must be >= 1");
  require(init_scale >= 0.0, "make_model: init_scale must be >= 0");
  CtrModel m;
  m.dense_dim = data_cfg.dense_dim;
  m.n_embeddings = data_cfg.n_embeddings;
  m.embed_dim = data_cfg.embed_dim;
  m.n_slots = data_cfg.n_sparse_slots;
  m.vocab = data_cfg.sparse_vocab;
  m.sparse_dim = sparse_dim;
  m.hidden_dim = hidden_dim;

  for (std::size_t s = 0; s < m.n_slots; ++s)
    m.tables.push_back(sample_gaussian_matrix(rng, m.vocab, sparse_dim, 0.0, init_scale));
  const std::size_t in = m.in_dim();
  m.w_in = sample_gaussian_matrix(rng, hidden_dim, in, 0.0,
                                  init_scale / std::sqrt(static_cast<double>(in)));
  m.b_in = Vector(hidden_dim, 0.0);
  m.w_out = sample_gaussian(rng, hidden_dim, 0.0,
                            init_scale / std::sqrt(static_cast<double>(hidden_dim)));
  m.b_out = 0.0;

  for (std::size_t s = 0; s < m.n_slots; ++s) m.tables_acc.emplace_back(m.vocab, sparse_dim);
  m.w_in_acc = Matrix(hidden_dim, in);
  m.b_in_acc = Vector(hidden_dim, 0.0);
  m.w_out_acc = Vector(hidden_dim, 0.0);
  m.b_out_acc = 0.0;
  return m;
}

inline std::vector<double> flatten_parameters(const CtrModel& m) {
  std::vector<double> p;
  for (const Matrix& t : m.tables) p.insert(p.end(), t.data().begin(), t.data().end());
  p.insert(p.end(), m.w_in.data().begin(), m.w_in.data().end());
  p.insert(p.end(), m.b_in.begin(), m.b_in.end());
  p.insert(p.end(), m.w_out.begin(), m.w_out.end());
  p.push_back(m.b_out);
  return p;
}

inline void load_parameters(CtrModel& m, const std::vector<double>& p) {
  std::size_t at = 0;
  for (Matrix& t : m.tables)
    for (double& v : t.data()) v = p[at++];
  for (double& v : m.w_in.data()) v = p[at++];
  for (double& v : m.b_in) v = p[at++];
  for (double& v : m.w_out) v = p[at++];
  m.b_out = p[at++];
  require(at == p.size(), "load_parameters: size mismatch");
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct ForwardResult {
  double prediction = 0.5;
  Vector hidden;  // post-ReLU representation exposed for SCR
  double logit = 0.0;
  // Caches for the backward pass.
  Vector features;
  Vector preact;
};

/// Concatenates [dense | embeddings... | looked-up slot vectors...]; a
/// dropped slot reads as a zero vector.
inline Vector build_features(const CtrModel& m, const Example& ex) {
  require(ex.dense.size() == m.dense_dim, "forward: dense dim mismatch");
  require(ex.embeddings.size() == m.n_embeddings, "forward: embedding count mismatch");
  require(ex.sparse.size() == m.n_slots, "forward: slot count mismatch");
  Vector f;
  f.reserve(m.in_dim());
  f.insert(f.end(), ex.dense.begin(), ex.dense.end());
  for (const Vector& e : ex.embeddings) {
    require(e.size() == m.embed_dim, "forward: embedding dim mismatch");
    f.insert(f.end(), e.begin(), e.end());
  }
  for (std::size_t s = 0; s < m.n_slots; ++s) {
    if (ex.sparse[s]) {
      const auto v = static_cast<std::size_t>(*ex.sparse[s]);
      require(v < m.vocab, "forward: slot value out of vocabulary");
      const double* row = m.tables[s].row(v);
      f.insert(f.end(), row, row + m.sparse_dim);
    } else {
      f.insert(f.end(), m.sparse_dim, 0.0);
    }
  }
  return f;
}

inline ForwardResult forward(const CtrModel& m, const Example& ex) {
  ForwardResult r;
  r.features = build_features(m, ex);
  r.preact = matvec(m.w_in, r.features);
  for (std::size_t k = 0; k < m.hidden_dim; ++k) r.preact[k] += m.b_in[k];
  r.hidden.resize(m.hidden_dim);
  for (std::size_t k = 0; k < m.hidden_dim; ++k)
    r.hidden[k] = r.preact[k] > 0.0 ? r.preact[k] : 0.0;
  r.logit = m.b_out;
  for (std::size_t k = 0; k < m.hidden_dim; ++k) r.logit += m.w_out[k] * r.hidden[k];
  r.prediction = sigmoid(r.logit);
  return r;
}

struct Gradients {
  std::vector<Matrix> tables;
  Matrix w_in;
  Vector b_in;
  Vector w_out;
  double b_out = 0.0;

  explicit Gradients(const CtrModel& m)
      : w_in(m.hidden_dim, m.in_dim()),
        b_in(m.hidden_dim, 0.0),
        w_out(m.hidden_dim, 0.0) {
    for (std::size_t s = 0; s < m.n_slots; ++s) tables.emplace_back(m.vocab, m.sparse_dim);
  }
};

/// Accumulates the gradient of dlogit * logit + <dhidden, hidden> for one
/// example into grads. dhidden may be empty (treated as zero); it carries
/// the direct hidden-representation gradient used by the SCR target.
inline void backward(const CtrModel& m, const Example& ex, const ForwardResult& fwd,
                     double dlogit, const Vector& dhidden, Gradients& grads) {
  grads.b_out += dlogit;
  Vector dpre(m.hidden_dim);
  for (std::size_t k = 0; k < m.hidden_dim; ++k) {
    grads.w_out[k] += dlogit * fwd.hidden[k];
    const double dh = dlogit * m.w_out[k] + (dhidden.empty() ? 0.0 : dhidden[k]);
    dpre[k] = fwd.preact[k] > 0.0 ? dh : 0.0;
  }
  for (std::size_t k = 0; k < m.hidden_dim; ++k) {
    double* grow = grads.w_in.row(k);
    const double d = dpre[k];
    for (std::size_t j = 0; j < fwd.features.size(); ++j) grow[j] += d * fwd.features[j];
    grads.b_in[k] += d;
  }
  // Feature gradient, needed only for the looked-up slot rows.
  const std::size_t slot_base = m.dense_dim + m.n_embeddings * m.embed_dim;
  for (std::size_t s = 0; s < m.n_slots; ++s) {
    if (!ex.sparse[s]) continue;
    const auto v = static_cast<std::size_t>(*ex.sparse[s]);
    double* trow = grads.tables[s].row(v);
    for (std::size_t d = 0; d < m.sparse_dim; ++d) {
      const std::size_t j = slot_base + s * m.sparse_dim + d;
      double df = 0.0;
      for (std::size_t k = 0; k < m.hidden_dim; ++k) df += m.w_in(k, j) * dpre[k];
      trow[d] += df;
    }
  }
}

/// One Adagrad update: accumulator += grad^2, then
/// weight -= learning_rate * grad / sqrt(accumulator + 1e-10).
inline void adagrad_update(double& weight, double grad, double& accumulator,
                           double learning_rate) {
  accumulator += grad * grad;
  weight -= learning_rate * grad / std::sqrt(accumulator + 1e-10);
}

inline void apply_adagrad(CtrModel& m, const Gradients& grads, double learning_rate) {
  for (std::size_t s = 0; s < m.n_slots; ++s)
    for (std::size_t i = 0; i < m.tables[s].size(); ++i)
      adagrad_update(m.tables[s].data()[i], grads.tables[s].data()[i],
                     m.tables_acc[s].data()[i], learning_rate);
  for (std::size_t i = 0; i < m.w_in.size(); ++i)
    adagrad_update(m.w_in.data()[i], grads.w_in.data()[i], m.w_in_acc.data()[i],
                   learning_rate);
  for (std::size_t k = 0; k < m.hidden_dim; ++k) {
    adagrad_update(m.b_in[k], grads.b_in[k], m.b_in_acc[k], learning_rate);
    adagrad_update(m.w_out[k], grads.w_out[k], m.w_out_acc[k], learning_rate);
  }
  adagrad_update(m.b_out, grads.b_out, m.b_out_acc, learning_rate);
}

// ---------------------------------------------------------------------------
// Training

enum class TrainMethod { kBaseline, kScr, kLspr };

inline const char* train_method_name(TrainMethod m) {
  switch (m) {
    case TrainMethod::kBaseline: return "baseline";
    case TrainMethod::kScr: return "SCR";
    case TrainMethod::kLspr: return "LSPR";
  }
  return "?";
}

inline TrainMethod parse_train_method(const std::string& name) {
  if (name == "baseline") return TrainMethod::kBaseline;
  if (name == "SCR") return TrainMethod::kScr;
  if (name == "LSPR") return TrainMethod::kLspr;
  throw std::invalid_argument("unknown ctr method: " + name);
}

enum class ScrTarget { kLogit, kHidden, kBoth };

inline const char* scr_target_name(ScrTarget t) {
  switch (t) {
    case ScrTarget::kLogit: return "logit";
    case ScrTarget::kHidden: return "hidden";
    case ScrTarget::kBoth: return "both";
  }
  return "?";
}

inline ScrTarget parse_scr_target(const std::string& name) {
  if (name == "logit") return ScrTarget::kLogit;
  if (name == "hidden") return ScrTarget::kHidden;
  if (name == "both") return ScrTarget::kBoth;
  throw std::invalid_argument("unknown scr_target: " + name);
}

struct TrainConfig {
  TrainMethod method = TrainMethod::kBaseline;
  double lambda = 0.5;
  PerturbationSpec perturbation;
  ScrTarget scr_target = ScrTarget::kBoth;
  double scr_perturb_fraction = 0.25;
  std::size_t batch_size = 64;
  std::size_t epochs = 8;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;

  void validate() const {
    require(lambda >= 0.0, "TrainConfig: lambda must be >= 0");
    require(scr_perturb_fraction > 0.0 && scr_perturb_fraction <= 1.0,
            "TrainConfig: scr_perturb_fraction must be in (0,1]");
    require(batch_size >= 1, "TrainConfig: batch_size must be >= 1");
    require(learning_rate >= 0.0, "TrainConfig: learning_rate must be >= 0");
    perturbation.validate();
  }
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_ne = 0.0;
  double eval_ne = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainResult {
  std::vector<EpochRecord> epochs;
  // Objective value of every batch, evaluated before its update.
  std::vector<double> batch_losses;
  // Number of forward passes that fed gradients (evaluation excluded).
  std::size_t train_forward_passes = 0;
};

struct EvalResult {
  double ne = 0.0;
  double bce = 0.0;
};

/// Held-out metrics; never mutates the model. Requires both classes.
inline EvalResult evaluate(const CtrModel& model, const std::vector<Example>& data) {
  require(!data.empty(), "evaluate: empty data");
  PredictionBatch batch;
  batch.labels.reserve(data.size());
  batch.predictions.reserve(data.size());
  for (const Example& ex : data) {
    batch.labels.push_back(static_cast<double>(ex.label));
    batch.predictions.push_back(forward(model, ex).prediction);
  }
  EvalResult r;
  r.ne = normalized_entropy(batch);
  r.bce = bce(batch);
  return r;
}

namespace detail {

// Sub-stream tags hung off TrainConfig.seed. Shuffling runs on its own
// stream so that methods which draw perturbation noise still walk the
// batches in the same order as the baseline.
inline constexpr std::uint64_t kShuffleStream = 1;
inline constexpr std::uint64_t kNoiseStream = 2;
inline constexpr std::uint64_t kPickStream = 3;

inline void fisher_yates(std::vector<std::size_t>& order, Rng& rng) {
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.next_u64() % i]);
}

inline void ensure_finite_predictions(const PredictionBatch& batch, std::size_t epoch) {
  for (double p : batch.predictions)
    if (!std::isfinite(p))
      throw DivergenceError(epoch, "train: non-finite prediction in epoch " +
                                       std::to_string(epoch));
}

// First `count` indices of a partial shuffle of [0, n), returned sorted so
// that downstream draw order is the batch order.
inline std::vector<std::size_t> pick_subset(std::size_t n, std::size_t count, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < count; ++i)
    std::swap(idx[i], idx[i + rng.next_u64() % (n - i)]);
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

inline TrainResult train_impl(CtrModel& model, const std::vector<Example>& train_data,
                              const std::vector<Example>& eval_data, const TrainConfig& cfg) {
  cfg.validate();
  require(!train_data.empty(), "train: empty training data");

  Rng shuffle_rng(mix_seed(cfg.seed, kShuffleStream));
  Rng noise_rng(mix_seed(cfg.seed, kNoiseStream));
  Rng pick_rng(mix_seed(cfg.seed, kPickStream));

  TrainResult result;
  std::vector<std::size_t> order(train_data.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    detail::fisher_yates(order, shuffle_rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t b = std::min(cfg.batch_size, order.size() - start);
      const double inv_b = 1.0 / static_cast<double>(b);

      Gradients grads(model);
      std::vector<ForwardResult> clean(b);
      PredictionBatch clean_batch;
      for (std::size_t i = 0; i < b; ++i) {
        const Example& ex = train_data[order[start + i]];
        clean[i] = forward(model, ex);
        ++result.train_forward_passes;
        clean_batch.labels.push_back(static_cast<double>(ex.label));
        clean_batch.predictions.push_back(clean[i].prediction);
        const double dlogit = (clean[i].prediction - static_cast<double>(ex.label)) * inv_b;
        backward(model, ex, clean[i], dlogit, {}, grads);
      }
      detail::ensure_finite_predictions(clean_batch, epoch);
      double batch_loss = bce(clean_batch);

      if (cfg.method == TrainMethod::kLspr) {
        // Every example gets a perturbed twin, doubling the batch; twins
        // keep the original label and enter the loss scaled by lambda.
        PredictionBatch pert_batch;
        for (std::size_t i = 0; i < b; ++i) {
          const Example& ex = train_data[order[start + i]];
          const Example twin = perturb_example(ex, cfg.perturbation, noise_rng);
          require(twin.label == ex.label, "train_lspr: perturbation must preserve labels");
          const ForwardResult fwd = forward(model, twin);
          ++result.train_forward_passes;
          pert_batch.labels.push_back(static_cast<double>(twin.label));
          pert_batch.predictions.push_back(fwd.prediction);
          const double dlogit =
              cfg.lambda * (fwd.prediction - static_cast<double>(twin.label)) * inv_b;
          backward(model, twin, fwd, dlogit, {}, grads);
        }
        detail::ensure_finite_predictions(pert_batch, epoch);
        batch_loss = lspr_loss(clean_batch, pert_batch, cfg.lambda);
      } else if (cfg.method == TrainMethod::kScr) {
        // A fraction of the batch gets perturbed twins; the consistency
        // term pulls the twin's representation toward the clean one, with
        // the clean branch frozen.
        const std::size_t n_pick = std::min<std::size_t>(
            b, std::max<std::size_t>(
                   1, static_cast<std::size_t>(std::llround(cfg.scr_perturb_fraction *
                                                            static_cast<double>(b)))));
        const auto picked = detail::pick_subset(b, n_pick, pick_rng);
        const double inv_pick = 1.0 / static_cast<double>(n_pick);
        const double inv_hidden = 1.0 / static_cast<double>(model.hidden_dim);
        const bool want_logit =
            cfg.scr_target == ScrTarget::kLogit || cfg.scr_target == ScrTarget::kBoth;
        const bool want_hidden =
            cfg.scr_target == ScrTarget::kHidden || cfg.scr_target == ScrTarget::kBoth;

        double logit_mse = 0.0, hidden_mse = 0.0;
        for (const std::size_t i : picked) {
          const Example& ex = train_data[order[start + i]];
          const Example twin = perturb_example(ex, cfg.perturbation, noise_rng);
          const ForwardResult fwd = forward(model, twin);
          ++result.train_forward_passes;

          double dlogit = 0.0;
          Vector dhidden;
          if (want_logit) {
            const double diff = fwd.logit - clean[i].logit;
            logit_mse += diff * diff * inv_pick;
            dlogit = cfg.lambda * 2.0 * diff * inv_pick;
          }
          if (want_hidden) {
            dhidden.assign(model.hidden_dim, 0.0);
            for (std::size_t k = 0; k < model.hidden_dim; ++k) {
              const double diff = fwd.hidden[k] - clean[i].hidden[k];
              hidden_mse += diff * diff * inv_pick * inv_hidden;
              dhidden[k] = cfg.lambda * 2.0 * diff * inv_pick * inv_hidden;
            }
          }
          backward(model, twin, fwd, dlogit, dhidden, grads);
        }
        batch_loss += cfg.lambda * (logit_mse + hidden_mse);
      }

      result.batch_losses.push_back(batch_loss);
      apply_adagrad(model, grads, cfg.learning_rate);
    }

    for (const double w : flatten_parameters(model))
      if (!std::isfinite(w))
        throw DivergenceError(epoch, "train: non-finite weight after epoch " +
                                         std::to_string(epoch));
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_ne = evaluate(model, train_data).ne;
    rec.eval_ne = evaluate(model, eval_data).ne;
    result.epochs.push_back(rec);
  }
  return result;
}

}  // namespace detail

inline TrainResult train_baseline(CtrModel& model, const std::vector<Example>& train_data,
                                  const std::vector<Example>& eval_data,
                                  const TrainConfig& cfg) {
  require(cfg.method == TrainMethod::kBaseline, "train_baseline: wrong method in config");
  return detail::train_impl(model, train_data, eval_data, cfg);
}

inline TrainResult train_scr(CtrModel& model, const std::vector<Example>& train_data,
                             const std::vector<Example>& eval_data, const TrainConfig& cfg) {
  require(cfg.method == TrainMethod::kScr, "train_scr: wrong method in config");
  return detail::train_impl(model, train_data, eval_data, cfg);
}

inline TrainResult train_lspr(CtrModel& model, const std::vector<Example>& train_data,
                              const std::vector<Example>& eval_data, const TrainConfig& cfg) {
  require(cfg.method == TrainMethod::kLspr, "train_lspr: wrong method in config");
  return detail::train_impl(model, train_data, eval_data, cfg);
}

}  // namespace plab::ctr
