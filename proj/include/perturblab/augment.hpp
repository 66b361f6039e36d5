#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "perturblab/numerics.hpp"

namespace plab {

/// Sparse feature slot: a categorical id, or empty when the slot is dropped.
/// A dropped slot reads as a zero vector downstream.
using SparseSlot = std::optional<std::int64_t>;

/// One training point: preprocessed dense block, embedding vectors, sparse
/// categorical slots, and a binary label.
struct Example {
  Vector dense;
  std::vector<Vector> embeddings;
  std::vector<SparseSlot> sparse;
  int label = 0;

  friend bool operator==(const Example&, const Example&) = default;
};

/// Perturbation knobs, matched to feature class: continuous Gaussian noise
/// for dense-valued features, categorical keep/drop for sparse slots.
struct PerturbationSpec {
  double noise_scale = 0.1;   // scale applied to the sampled noise vector
  double noise_std = 1.0;     // noise distribution std
  double noise_mean = 0.0;    // noise distribution mean
  double dropout_rate = 0.1;  // per-slot drop probability

  bool is_zero() const {
    return noise_scale == 0.0 && noise_std == 0.0 && noise_mean == 0.0 &&
           dropout_rate == 0.0;
  }

  void validate() const {
    require(noise_scale >= 0.0, "PerturbationSpec: noise_scale must be >= 0");
    require(noise_std >= 0.0, "PerturbationSpec: noise_std must be >= 0");
    require(dropout_rate >= 0.0 && dropout_rate <= 1.0,
            "PerturbationSpec: dropout_rate must be in [0,1]");
  }

  friend bool operator==(const PerturbationSpec&, const PerturbationSpec&) = default;
};

/// result[i] = v[i] + scale * psi[i] with psi ~ N(mean, std) i.i.d.
inline Vector inject_gaussian_noise(const Vector& v, const PerturbationSpec& spec, Rng& rng) {
  spec.validate();
  const Vector psi = sample_gaussian(rng, v.size(), spec.noise_mean, spec.noise_std);
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] + spec.noise_scale * psi[i];
  return out;
}

/// Independently drops each slot with probability dropout_rate. Slot count
/// is preserved; a dropped slot becomes empty.
inline std::vector<SparseSlot> dropout_sparse(const std::vector<SparseSlot>& slots,
                                              double dropout_rate, Rng& rng) {
  require(dropout_rate >= 0.0 && dropout_rate <= 1.0,
          "dropout_sparse: rate must be in [0,1]");
  std::vector<SparseSlot> out(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    // next_uniform() is strictly inside (0,1), so rate 0 never drops and
    // rate 1 always drops.
    out[i] = (rng.next_uniform() < dropout_rate) ? SparseSlot{} : slots[i];
  }
  return out;
}

/// Perturbs one example: noise on the dense block, then noise on each
/// embedding in order, then slot dropout. The label is always preserved.
/// Draw order is fixed so the result is reproducible from the rng seed.
inline Example perturb_example(const Example& ex, const PerturbationSpec& spec, Rng& rng) {
  Example out;
  out.dense = inject_gaussian_noise(ex.dense, spec, rng);
  out.embeddings.reserve(ex.embeddings.size());
  for (const Vector& e : ex.embeddings)
    out.embeddings.push_back(inject_gaussian_noise(e, spec, rng));
  out.sparse = dropout_sparse(ex.sparse, spec.dropout_rate, rng);
  out.label = ex.label;
  return out;
}

}  // namespace plab
