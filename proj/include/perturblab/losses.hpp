#pragma once

#include <algorithm>
#include <cmath>

#include "perturblab/numerics.hpp"

namespace plab {

/// Predictions are clipped into [kPredictionClip, 1 - kPredictionClip]
/// before any log, which bounds the loss of a saturated prediction.
inline constexpr double kPredictionClip = 1e-7;

inline double clip_probability(double p) {
  return std::clamp(p, kPredictionClip, 1.0 - kPredictionClip);
}

/// Aligned binary labels and prediction probabilities.
struct PredictionBatch {
  Vector labels;
  Vector predictions;

  void validate() const {
    require(!labels.empty(), "PredictionBatch: empty batch");
    require(labels.size() == predictions.size(),
            "PredictionBatch: labels/predictions length mismatch");
    for (double y : labels)
      require(y == 0.0 || y == 1.0, "PredictionBatch: labels must be 0 or 1");
    for (double p : predictions)
      require(p >= 0.0 && p <= 1.0, "PredictionBatch: predictions must be probabilities");
  }
};

/// Clean and perturbed copies of one hidden representation.
struct HiddenPair {
  Vector clean;
  Vector perturbed;
};

/// Mean binary cross entropy over the batch.
inline double bce(const PredictionBatch& batch) {
  batch.validate();
  double acc = 0.0;
  for (std::size_t n = 0; n < batch.labels.size(); ++n) {
    const double p = clip_probability(batch.predictions[n]);
    acc += batch.labels[n] * std::log(p) + (1.0 - batch.labels[n]) * std::log(1.0 - p);
  }
  return -acc / static_cast<double>(batch.labels.size());
}

/// Mean squared componentwise difference between the pair.
inline double mse(const HiddenPair& pair) {
  require(pair.clean.size() == pair.perturbed.size(), "mse: dimension mismatch");
  require(!pair.clean.empty(), "mse: empty pair");
  double acc = 0.0;
  for (std::size_t i = 0; i < pair.clean.size(); ++i) {
    const double d = pair.clean[i] - pair.perturbed[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pair.clean.size());
}

/// Supervised loss plus lambda-weighted consistency penalty.
inline double scr_loss(const PredictionBatch& batch, const HiddenPair& pair, double lambda) {
  require(lambda >= 0.0, "scr_loss: lambda must be >= 0");
  return bce(batch) + lambda * mse(pair);
}

/// Supervised loss on the clean batch plus a lambda-down-weighted
/// supervised loss on the perturbed batch. Both batches must carry the
/// same labels: perturbed copies keep their original label.
inline double lspr_loss(const PredictionBatch& clean, const PredictionBatch& perturbed,
                        double lambda) {
  require(lambda >= 0.0, "lspr_loss: lambda must be >= 0");
  require(clean.labels == perturbed.labels, "lspr_loss: label mismatch between batches");
  return bce(clean) + lambda * bce(perturbed);
}

/// Log loss normalized by the entropy of the constant base-rate predictor.
/// 1.0 means no better than always predicting the positive rate.
inline double normalized_entropy(const PredictionBatch& batch) {
  batch.validate();
  double positives = 0.0;
  for (double y : batch.labels) positives += y;
  if (positives == 0.0 || positives == static_cast<double>(batch.labels.size()))
    throw std::domain_error("normalized_entropy: batch needs both classes");
  const double rate = positives / static_cast<double>(batch.labels.size());
  const double base_entropy = -(rate * std::log(rate) + (1.0 - rate) * std::log(1.0 - rate));
  return bce(batch) / base_entropy;
}

/// (baseline - treatment) / baseline; positive means the treatment improved
/// (NE is lower-is-better).
inline double relative_ne_gain(double ne_baseline, double ne_treatment) {
  require(ne_baseline > 0.0, "relative_ne_gain: baseline must be positive");
  return (ne_baseline - ne_treatment) / ne_baseline;
}

}  // namespace plab
