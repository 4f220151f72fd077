// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "greenloop/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "greenloop/error.hpp"
#include "greenloop/rng.hpp"

namespace greenloop {

NormStats NormStats::identity(size_t dim) {
  return NormStats{std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
}

namespace {

double feature_of(const SensorRecord& raw, std::string_view name) {
  auto it = raw.find(std::string(name));
  if (it == raw.end()) {
    throw Error(ErrorCode::kMissingFeature, fmt::format("sensor record lacks '{}'", name));
  }
  return it->second;
}

}  // namespace

NormStats compute_norm_stats(std::span<const SensorRecord> records) {
  if (records.empty()) throw Error(ErrorCode::kEmptyDataset, "no records to normalize");
  NormStats stats{std::vector<double>(kFeatureCount, 0.0),
                  std::vector<double>(kFeatureCount, 0.0)};
  const double n = static_cast<double>(records.size());
  for (size_t f = 0; f < kFeatureCount; ++f) {
    double sum = 0.0;
    for (const auto& r : records) sum += feature_of(r, kFeatureNames[f]);
    const double mean = sum / n;
    double sq = 0.0;
    for (const auto& r : records) {
      const double d = feature_of(r, kFeatureNames[f]) - mean;
      sq += d * d;
    }
    const double sd = std::sqrt(sq / n);
    if (!(sd > 0.0)) {
      throw Error(ErrorCode::kZeroVariance,
                  fmt::format("feature '{}' has zero variance", kFeatureNames[f]));
    }
    stats.mean[f] = mean;
    stats.stddev[f] = sd;
  }
  return stats;
}

FeatureVector featurize(const SensorRecord& raw, const NormStats& stats) {
  if (stats.mean.size() != kFeatureCount || stats.stddev.size() != kFeatureCount) {
    throw Error(ErrorCode::kDimensionMismatch, "normalization stats must cover 6 features");
  }
  FeatureVector x;
  x.values.resize(kFeatureCount);
  for (size_t f = 0; f < kFeatureCount; ++f) {
    if (!(stats.stddev[f] > 0.0)) {
      throw Error(ErrorCode::kZeroVariance,
                  fmt::format("feature '{}' has zero variance", kFeatureNames[f]));
    }
    x.values[f] = (feature_of(raw, kFeatureNames[f]) - stats.mean[f]) / stats.stddev[f];
  }
  return x;
}

SensorRecord unfeaturize(const FeatureVector& x, const NormStats& stats) {
  if (x.values.size() != kFeatureCount) {
    throw Error(ErrorCode::kDimensionMismatch, "feature vector must have 6 entries");
  }
  SensorRecord raw;
  for (size_t f = 0; f < kFeatureCount; ++f) {
    raw[std::string(kFeatureNames[f])] = x.values[f] * stats.stddev[f] + stats.mean[f];
  }
  return raw;
}

namespace {

size_t label_index(const std::vector<std::string>& labels, const std::string& label) {
  auto it = std::lower_bound(labels.begin(), labels.end(), label);
  if (it == labels.end() || *it != label) {
    throw Error(ErrorCode::kDimensionMismatch, fmt::format("unknown class label '{}'", label));
  }
  return static_cast<size_t>(it - labels.begin());
}

// Fills `logp` with log-softmax of W x + b.
void log_softmax(const SoftmaxModel& m, const std::vector<double>& x, std::vector<double>& logp) {
  const size_t k = m.classes();
  logp.resize(k);
  for (size_t c = 0; c < k; ++c) {
    double z = m.biases[c];
    const auto& w = m.weights[c];
    for (size_t f = 0; f < x.size(); ++f) z += w[f] * x[f];
    logp[c] = z;
  }
  const double top = *std::max_element(logp.begin(), logp.end());
  double sum = 0.0;
  for (double z : logp) sum += std::exp(z - top);
  const double log_norm = top + std::log(sum);
  for (double& z : logp) z -= log_norm;
}

void require_dims(const SoftmaxModel& m, size_t dim) {
  if (dim != m.features()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("input has {} features, model expects {}", dim, m.features()));
  }
}

}  // namespace

LossGradient loss_and_gradient(const SoftmaxModel& m, std::span<const LabeledSample> data,
                               double l2) {
  const size_t k = m.classes();
  const size_t d = m.features();
  LossGradient out;
  out.d_weights.assign(k, std::vector<double>(d, 0.0));
  out.d_biases.assign(k, 0.0);
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "no samples");

  std::vector<double> logp;
  double nll = 0.0;
  for (const auto& s : data) {
    require_dims(m, s.x.values.size());
    const size_t y = label_index(m.class_labels, s.label);
    log_softmax(m, s.x.values, logp);
    nll -= logp[y];
    for (size_t c = 0; c < k; ++c) {
      const double g = std::exp(logp[c]) - (c == y ? 1.0 : 0.0);
      out.d_biases[c] += g;
      auto& row = out.d_weights[c];
      for (size_t f = 0; f < d; ++f) row[f] += g * s.x.values[f];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(data.size());
  double penalty = 0.0;
  for (size_t c = 0; c < k; ++c) {
    out.d_biases[c] *= inv_n;
    for (size_t f = 0; f < d; ++f) {
      const double w = m.weights[c][f];
      out.d_weights[c][f] = out.d_weights[c][f] * inv_n + 2.0 * l2 * w;
      penalty += w * w;
    }
  }
  out.loss = nll * inv_n + l2 * penalty;
  return out;
}

SoftmaxModel train_classifier(std::span<const LabeledSample> data, const TrainConfig& cfg,
                              TrainLog* log) {
  if (!(cfg.learning_rate > 0.0) || cfg.epochs < 1 || !(cfg.l2_penalty >= 0.0)) {
    throw Error(ErrorCode::kValidation, "train config: learning_rate > 0, epochs >= 1, l2 >= 0");
  }
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "no training samples");
  std::set<std::string> labels;
  const size_t dim = data.front().x.values.size();
  for (const auto& s : data) {
    if (s.x.values.size() != dim) {
      throw Error(ErrorCode::kDimensionMismatch, "training samples have ragged feature vectors");
    }
    labels.insert(s.label);
  }
  if (labels.size() < 2) {
    throw Error(ErrorCode::kSingleClassData, "training data needs at least two distinct labels");
  }

  SoftmaxModel m;
  m.class_labels.assign(labels.begin(), labels.end());
  m.norm_stats = NormStats::identity(dim);
  Rng rng(cfg.rng_seed);
  m.weights.assign(m.class_labels.size(), std::vector<double>(dim, 0.0));
  for (auto& row : m.weights) {
    for (auto& w : row) w = rng.uniform(-cfg.init_scale, cfg.init_scale);
  }
  m.biases.assign(m.class_labels.size(), 0.0);

  double previous = 0.0;
  for (int64_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto grad = loss_and_gradient(m, data, cfg.l2_penalty);
    if (!std::isfinite(grad.loss)) {
      throw Error(ErrorCode::kNonFiniteLoss,
                  fmt::format("loss diverged at epoch {} (learning rate {})", epoch,
                              cfg.learning_rate));
    }
    if (log) {
      log->epoch_loss.push_back(grad.loss);
      if (epoch > 0 && grad.loss > previous + 1e-12 * std::max(1.0, std::abs(previous))) {
        log->diagnostics.push_back(fmt::format("epoch {}: loss rose from {:.12g} to {:.12g}",
                                               epoch, previous, grad.loss));
      }
    }
    previous = grad.loss;
    for (size_t c = 0; c < m.classes(); ++c) {
      m.biases[c] -= cfg.learning_rate * grad.d_biases[c];
      for (size_t f = 0; f < dim; ++f) m.weights[c][f] -= cfg.learning_rate * grad.d_weights[c][f];
    }
  }
  for (const auto& row : m.weights) {
    for (double w : row) {
      if (!std::isfinite(w)) throw Error(ErrorCode::kNonFiniteLoss, "weights diverged");
    }
  }
  return m;
}

Prediction predict(const SoftmaxModel& m, const FeatureVector& x) {
  require_dims(m, x.values.size());
  std::vector<double> logp;
  log_softmax(m, x.values, logp);
  Prediction p;
  p.probabilities.resize(logp.size());
  double sum = 0.0;
  for (size_t c = 0; c < logp.size(); ++c) {
    p.probabilities[c] = std::exp(logp[c]);
    sum += p.probabilities[c];
  }
  for (double& v : p.probabilities) v /= sum;
  for (size_t c = 1; c < logp.size(); ++c) {
    if (logp[c] > logp[p.class_index]) p.class_index = c;
  }
  p.label = m.class_labels[p.class_index];
  return p;
}

double evaluate_accuracy(const SoftmaxModel& m, std::span<const LabeledSample> data) {
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "cannot score an empty dataset");
  size_t correct = 0;
  for (const auto& s : data) correct += predict(m, s.x).label == s.label;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

std::string ThresholdClassifier::classify(const FeatureVector& x) const {
  if (feature >= x.values.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "threshold feature outside the input vector");
  }
  const double v = x.values[feature];
  size_t k = 0;
  while (k < thresholds.size() && v >= thresholds[k]) ++k;
  return labels[k];
}

ThresholdClassifier fit_threshold_classifier(std::span<const LabeledSample> data,
                                             size_t feature) {
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "no training samples");
  std::map<std::string, std::pair<double, size_t>> sums;
  for (const auto& s : data) {
    if (feature >= s.x.values.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "threshold feature outside the input vector");
    }
    auto& [sum, count] = sums[s.label];
    sum += s.x.values[feature];
    ++count;
  }
  std::vector<std::pair<double, std::string>> means;
  for (const auto& [label, sc] : sums) {
    means.emplace_back(sc.first / static_cast<double>(sc.second), label);
  }
  std::sort(means.begin(), means.end());
  ThresholdClassifier c;
  c.feature = feature;
  for (const auto& [mean, label] : means) {
    c.labels.push_back(label);
    c.class_means.push_back(mean);
  }
  for (size_t i = 1; i < means.size(); ++i) {
    c.thresholds.push_back(0.5 * (means[i - 1].first + means[i].first));
  }
  return c;
}

double evaluate_accuracy(const ThresholdClassifier& c, std::span<const LabeledSample> data) {
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "cannot score an empty dataset");
  size_t correct = 0;
  for (const auto& s : data) correct += c.classify(s.x) == s.label;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace greenloop
