// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

// Sensor feature engineering and a multinomial softmax-regression waste
// classifier trained by full-batch gradient descent on mean cross-entropy.

#ifndef GREENLOOP_CLASSIFIER_HPP_
#define GREENLOOP_CLASSIFIER_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace greenloop {

inline constexpr size_t kFeatureCount = 6;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "weight", "metal_response", "moisture", "opacity", "rigidity", "volume"};

using SensorRecord = std::map<std::string, double>;

// Per-feature z-score statistics, in kFeatureNames order.
struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;

  // mean 0, stddev 1 for `dim` features.
  static NormStats identity(size_t dim = kFeatureCount);
  bool operator==(const NormStats&) const = default;
};

// Population statistics over `records`; throws kMissingFeature, kEmptyDataset
// or kZeroVariance.
NormStats compute_norm_stats(std::span<const SensorRecord> records);

struct FeatureVector {
  std::vector<double> values;
  bool operator==(const FeatureVector&) const = default;
};

FeatureVector featurize(const SensorRecord& raw, const NormStats& stats);
SensorRecord unfeaturize(const FeatureVector& x, const NormStats& stats);

struct LabeledSample {
  FeatureVector x;
  std::string label;
};

struct SoftmaxModel {
  std::vector<std::vector<double>> weights;  // classes x features
  std::vector<double> biases;
  std::vector<std::string> class_labels;     // ascending
  NormStats norm_stats;

  size_t classes() const { return class_labels.size(); }
  size_t features() const { return weights.empty() ? 0 : weights.front().size(); }
  bool operator==(const SoftmaxModel&) const = default;
};

struct TrainConfig {
  double learning_rate = 0.1;
  int64_t epochs = 500;
  double l2_penalty = 0.0;
  uint64_t rng_seed = 0;
  // Initial weights are drawn uniformly from [-init_scale, init_scale].
  double init_scale = 0.01;

  bool operator==(const TrainConfig&) const = default;
};

struct TrainLog {
  std::vector<double> epoch_loss;
  std::vector<std::string> diagnostics;
};

// Throws kSingleClassData when fewer than two labels occur, kNonFiniteLoss on
// divergence, kDimensionMismatch on ragged inputs. Loss increases between
// epochs are reported in `log->diagnostics`. The model's norm_stats default to
// identity; callers that normalized the inputs store their stats afterwards.
SoftmaxModel train_classifier(std::span<const LabeledSample> data, const TrainConfig& cfg,
                              TrainLog* log = nullptr);

struct LossGradient {
  double loss = 0.0;
  std::vector<std::vector<double>> d_weights;
  std::vector<double> d_biases;
};

// Mean cross-entropy plus l2 * ||W||^2 and its analytic gradient.
LossGradient loss_and_gradient(const SoftmaxModel& m, std::span<const LabeledSample> data,
                               double l2);

struct Prediction {
  size_t class_index = 0;
  std::string label;
  std::vector<double> probabilities;
};

Prediction predict(const SoftmaxModel& m, const FeatureVector& x);

double evaluate_accuracy(const SoftmaxModel& m, std::span<const LabeledSample> data);

// Baseline: nearest class mean on a single feature, i.e. thresholds at the
// midpoints between adjacent class means.
struct ThresholdClassifier {
  size_t feature = 0;
  std::vector<std::string> labels;  // ordered by ascending class mean
  std::vector<double> class_means;
  std::vector<double> thresholds;   // labels.size() - 1 cut points

  std::string classify(const FeatureVector& x) const;
  bool operator==(const ThresholdClassifier&) const = default;
};

ThresholdClassifier fit_threshold_classifier(std::span<const LabeledSample> data, size_t feature);

double evaluate_accuracy(const ThresholdClassifier& c, std::span<const LabeledSample> data);

}  // namespace greenloop

#endif  // GREENLOOP_CLASSIFIER_HPP_
