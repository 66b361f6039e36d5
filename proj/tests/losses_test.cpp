#include "perturblab/losses.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"

using plab::HiddenPair;
using plab::PredictionBatch;
using plab::Rng;
using plab::Vector;

namespace {

// Straight transcription of the mean log-loss formula, element by element.
double bce_oracle(const Vector& labels, const Vector& preds) {
  double total = 0.0;
  for (std::size_t n = 0; n < labels.size(); ++n) {
    const double p = std::clamp(preds[n], 1e-7, 1.0 - 1e-7);
    total += -(labels[n] * std::log(p) + (1.0 - labels[n]) * std::log(1.0 - p));
  }
  return total / static_cast<double>(labels.size());
}

PredictionBatch random_batch(Rng& rng, std::size_t n) {
  PredictionBatch b;
  for (std::size_t i = 0; i < n; ++i) {
    b.labels.push_back(rng.next_uniform() < 0.5 ? 0.0 : 1.0);
    b.predictions.push_back(rng.next_uniform());
  }
  return b;
}

TEST(Bce, MidpointPredictionIsLogTwo) {
  const PredictionBatch b{{1.0}, {0.5}};
  EXPECT_NEAR(plab::bce(b), std::log(2.0), 1e-12);
}

TEST(Bce, TwoPointSpotValue) {
  const PredictionBatch b{{1.0, 0.0}, {0.9, 0.1}};
  const double got = plab::bce(b);
  EXPECT_NEAR(got, bce_oracle(b.labels, b.predictions), 1e-15);
  EXPECT_NEAR(got, 0.105361, 1e-6);
}

TEST(Bce, PerfectPredictionsAreClipBounded) {
  const PredictionBatch b{{1.0, 0.0}, {1.0, 0.0}};
  const double got = plab::bce(b);
  EXPECT_GT(got, 0.0);
  EXPECT_LE(got, 1.6e-7);
}

TEST(Bce, EmptyBatchThrows) {
  EXPECT_THROW(plab::bce(PredictionBatch{}), std::invalid_argument);
}

TEST(Bce, LengthMismatchThrows) {
  EXPECT_THROW(plab::bce(PredictionBatch{{1.0}, {0.5, 0.5}}), std::invalid_argument);
}

TEST(Bce, NonBinaryLabelThrows) {
  EXPECT_THROW(plab::bce(PredictionBatch{{0.5}, {0.5}}), std::invalid_argument);
}

TEST(Bce, NonnegativeAndMinimizedAtLabels) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    PredictionBatch b = random_batch(rng, 8);
    const double loss = plab::bce(b);
    EXPECT_GE(loss, 0.0);
    PredictionBatch ideal = b;
    ideal.predictions = ideal.labels;
    EXPECT_LE(plab::bce(ideal), loss);
  }
}

TEST(Bce, PermutationInvariant) {
  Rng rng(5);
  PredictionBatch b = random_batch(rng, 16);
  PredictionBatch shuffled = b;
  std::reverse(shuffled.labels.begin(), shuffled.labels.end());
  std::reverse(shuffled.predictions.begin(), shuffled.predictions.end());
  EXPECT_NEAR(plab::bce(b), plab::bce(shuffled), 1e-14);
}

TEST(Mse, IdenticalPairIsZero) {
  const HiddenPair pair{{1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}};
  EXPECT_DOUBLE_EQ(plab::mse(pair), 0.0);
}

TEST(Mse, UnitDifference) {
  const HiddenPair pair{{1.0, 1.0}, {0.0, 0.0}};
  EXPECT_DOUBLE_EQ(plab::mse(pair), 1.0);
}

TEST(Mse, MatchesLoopOracle) {
  Rng rng(7);
  const Vector a = plab::sample_gaussian(rng, 40, 0.0, 2.0);
  const Vector b = plab::sample_gaussian(rng, 40, 0.0, 2.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  EXPECT_NEAR(plab::mse(HiddenPair{a, b}), acc / 40.0, 1e-12);
}

TEST(Mse, DimensionMismatchThrows) {
  EXPECT_THROW(plab::mse(HiddenPair{{1.0}, {1.0, 2.0}}), std::invalid_argument);
}

TEST(ScrLoss, LambdaZeroEqualsBce) {
  Rng rng(11);
  const PredictionBatch b = random_batch(rng, 6);
  const HiddenPair pair{{1.0, 2.0}, {0.0, 0.0}};
  EXPECT_DOUBLE_EQ(plab::scr_loss(b, pair, 0.0), plab::bce(b));
}

TEST(ScrLoss, IdenticalPairEqualsBceForAnyLambda) {
  Rng rng(13);
  const PredictionBatch b = random_batch(rng, 6);
  const HiddenPair pair{{1.0, 2.0}, {1.0, 2.0}};
  for (double lambda : {0.0, 0.5, 10.0})
    EXPECT_DOUBLE_EQ(plab::scr_loss(b, pair, lambda), plab::bce(b));
}

TEST(ScrLoss, IsAdditiveInItsTwoTerms) {
  Rng rng(17);
  const PredictionBatch b = random_batch(rng, 6);
  const HiddenPair pair{{2.0, 1.0, 0.0}, {0.5, 0.5, 0.5}};
  for (double lambda : {0.001, 1.0, 3.0})
    EXPECT_NEAR(plab::scr_loss(b, pair, lambda), plab::bce(b) + lambda * plab::mse(pair), 1e-14);
}

TEST(ScrLoss, MonotoneInLambdaWhenRegularizerPositive) {
  Rng rng(19);
  const PredictionBatch b = random_batch(rng, 6);
  const HiddenPair pair{{1.0, 0.0}, {0.0, 1.0}};
  double prev = plab::scr_loss(b, pair, 0.0);
  for (double lambda : {0.1, 0.5, 2.0}) {
    const double cur = plab::scr_loss(b, pair, lambda);
    EXPECT_GT(cur, prev);
    prev = cur;
  }
}

TEST(LsprLoss, LambdaZeroEqualsCleanBce) {
  Rng rng(23);
  PredictionBatch clean = random_batch(rng, 6);
  PredictionBatch perturbed = clean;
  perturbed.predictions = plab::sample_gaussian(rng, 6, 0.5, 0.1);
  EXPECT_DOUBLE_EQ(plab::lspr_loss(clean, perturbed, 0.0), plab::bce(clean));
}

TEST(LsprLoss, SelfPairScalesByOnePlusLambda) {
  Rng rng(29);
  const PredictionBatch clean = random_batch(rng, 8);
  for (double lambda : {0.0, 0.001, 1.0, 2.5})
    EXPECT_NEAR(plab::lspr_loss(clean, clean, lambda), (1.0 + lambda) * plab::bce(clean), 1e-12);
}

TEST(LsprLoss, IsAdditiveInItsTwoTerms) {
  Rng rng(31);
  PredictionBatch clean = random_batch(rng, 6);
  PredictionBatch perturbed = clean;
  for (double& p : perturbed.predictions) p = 0.5 * p + 0.25;
  const double lambda = 0.5;
  EXPECT_NEAR(plab::lspr_loss(clean, perturbed, lambda),
              plab::bce(clean) + lambda * plab::bce(perturbed), 1e-14);
}

TEST(LsprLoss, LabelMismatchThrows) {
  const PredictionBatch clean{{1.0, 0.0}, {0.6, 0.4}};
  const PredictionBatch other{{0.0, 0.0}, {0.6, 0.4}};
  EXPECT_THROW(plab::lspr_loss(clean, other, 1.0), std::invalid_argument);
}

TEST(NormalizedEntropy, BaseRatePredictorScoresExactlyOne) {
  const PredictionBatch b{{1.0, 0.0, 0.0, 1.0, 0.0}, {0.4, 0.4, 0.4, 0.4, 0.4}};
  EXPECT_NEAR(plab::normalized_entropy(b), 1.0, 1e-12);
}

TEST(NormalizedEntropy, PerfectPredictionsNearZero) {
  const PredictionBatch b{{1.0, 0.0}, {1.0, 0.0}};
  EXPECT_LE(plab::normalized_entropy(b), 1e-6);
}

TEST(NormalizedEntropy, FourPointSpotValue) {
  const PredictionBatch b{{1.0, 0.0, 0.0, 0.0}, {0.4, 0.2, 0.2, 0.2}};
  const double rate = 0.25;
  const double base = -(rate * std::log(rate) + (1.0 - rate) * std::log(1.0 - rate));
  EXPECT_NEAR(plab::normalized_entropy(b), bce_oracle(b.labels, b.predictions) / base, 1e-12);
}

TEST(NormalizedEntropy, SingleClassBatchThrows) {
  EXPECT_THROW(plab::normalized_entropy(PredictionBatch{{1.0, 1.0}, {0.9, 0.9}}),
               std::domain_error);
  EXPECT_THROW(plab::normalized_entropy(PredictionBatch{{0.0, 0.0}, {0.1, 0.1}}),
               std::domain_error);
}

TEST(RelativeNeGain, BaselineAgainstItselfIsZero) {
  EXPECT_DOUBLE_EQ(plab::relative_ne_gain(0.93, 0.93), 0.0);
}

TEST(RelativeNeGain, TenBasisPointsImprovement) {
  EXPECT_NEAR(plab::relative_ne_gain(1.000, 0.999), 0.001, 1e-15);
}

TEST(RelativeNeGain, RegressionIsNegative) {
  EXPECT_LT(plab::relative_ne_gain(0.9, 0.95), 0.0);
}

TEST(RelativeNeGain, NonpositiveBaselineThrows) {
  EXPECT_THROW(plab::relative_ne_gain(0.0, 0.5), std::invalid_argument);
  EXPECT_THROW(plab::relative_ne_gain(-1.0, 0.5), std::invalid_argument);
}

}  // namespace
