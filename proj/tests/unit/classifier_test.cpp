// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <map>
#include <numeric>

#include "doctest.h"
#include "gradient_oracle.hpp"
#include "greenloop/classifier.hpp"
#include "greenloop/error.hpp"
#include "greenloop/rng.hpp"

namespace gl = greenloop;

namespace {

gl::SensorRecord record(double w, double m, double mo, double o, double r, double v) {
  return {{"weight", w}, {"metal_response", m}, {"moisture", mo},
          {"opacity", o}, {"rigidity", r},      {"volume", v}};
}

// Two classes split by the sign of feature 0 with a 1.0 margin; the rest is noise.
std::vector<gl::LabeledSample> separable(gl::Rng& rng, size_t n) {
  std::vector<gl::LabeledSample> out;
  for (size_t i = 0; i < n; ++i) {
    const bool pos = i % 2 == 0;
    gl::LabeledSample s;
    s.x.values.push_back((pos ? 1.0 : -1.0) * (1.0 + rng.uniform()));
    for (size_t f = 1; f < gl::kFeatureCount; ++f) s.x.values.push_back(rng.normal());
    s.label = pos ? "metal" : "plastic";
    out.push_back(std::move(s));
  }
  return out;
}

gl::SoftmaxModel zero_model(size_t classes, size_t features) {
  gl::SoftmaxModel m;
  for (size_t c = 0; c < classes; ++c) m.class_labels.push_back("c" + std::to_string(c));
  m.weights.assign(classes, std::vector<double>(features, 0.0));
  m.biases.assign(classes, 0.0);
  m.norm_stats = gl::NormStats::identity(features);
  return m;
}

}  // namespace

TEST_CASE("featurize centres, scales and inverts") {
  std::vector<gl::SensorRecord> recs{record(1, 2, 3, 4, 5, 6), record(3, 6, 5, 8, 9, 10)};
  const auto stats = gl::compute_norm_stats(recs);
  const auto mean_rec = record(2, 4, 4, 6, 7, 8);
  for (double v : gl::featurize(mean_rec, stats).values) CHECK(v == 0.0);

  gl::NormStats s2{std::vector<double>(6, 0.0), std::vector<double>(6, 2.0)};
  CHECK(gl::featurize(record(4, 0, 0, 0, 0, 0), s2).values[0] == 2.0);

  gl::Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto raw = record(rng.normal(5, 3), rng.normal(), rng.normal(), rng.normal(),
                            rng.normal(), rng.normal(100, 40));
    const auto back = gl::unfeaturize(gl::featurize(raw, stats), stats);
    for (const auto& [k, v] : raw) CHECK(std::abs(back.at(k) - v) <= 1e-12 * std::max(1.0, std::abs(v)));
  }
}

TEST_CASE("featurize errors") {
  auto rec = record(1, 2, 3, 4, 5, 6);
  rec.erase("opacity");
  try {
    gl::featurize(rec, gl::NormStats::identity());
    FAIL("expected MissingFeature");
  } catch (const gl::Error& e) {
    CHECK(e.code() == gl::ErrorCode::kMissingFeature);
    CHECK(std::string(e.what()).find("opacity") != std::string::npos);
  }
  std::vector<gl::SensorRecord> flat{record(1, 2, 3, 4, 5, 6), record(1, 2, 3, 4, 5, 7)};
  try {
    gl::compute_norm_stats(flat);
    FAIL("expected ZeroVariance");
  } catch (const gl::Error& e) {
    CHECK(e.code() == gl::ErrorCode::kZeroVariance);
  }
}

TEST_CASE("predict closed forms") {
  SUBCASE("zero model is uniform and picks class 0") {
    const auto p = gl::predict(zero_model(4, 6), {std::vector<double>(6, 1.0)});
    CHECK(p.class_index == 0);
    for (double v : p.probabilities) CHECK(v == doctest::Approx(0.25));
  }
  SUBCASE("logits (ln 3, 0)") {
    auto m = zero_model(2, 1);
    m.biases[0] = std::log(3.0);
    const auto p = gl::predict(m, {{0.0}});
    CHECK(p.probabilities[0] == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(p.probabilities[1] == doctest::Approx(0.25).epsilon(1e-14));
  }
  SUBCASE("shift invariance, even for huge logits") {
    gl::Rng rng(6);
    auto m = gl::testing::random_model(rng, 3, 6);
    const gl::FeatureVector x{{0.3, -1.0, 2.0, 0.1, 0.0, 1.0}};
    const auto before = gl::predict(m, x);
    for (auto& b : m.biases) b += 1000.0;
    const auto after = gl::predict(m, x);
    for (size_t c = 0; c < 3; ++c) {
      CHECK(after.probabilities[c] == doctest::Approx(before.probabilities[c]).epsilon(1e-12));
    }
  }
  SUBCASE("dimension mismatch") {
    try {
      gl::predict(zero_model(2, 6), {{1.0, 2.0}});
      FAIL("expected DimensionMismatch");
    } catch (const gl::Error& e) {
      CHECK(e.code() == gl::ErrorCode::kDimensionMismatch);
    }
  }
}

TEST_CASE("analytic gradient matches central differences") {
  gl::Rng rng(2718);
  for (int trial = 0; trial < 25; ++trial) {
    const auto m = gl::testing::random_model(rng, 2 + rng.uniform_index(4), gl::kFeatureCount);
    const auto batch = gl::testing::random_batch(rng, m, 5 + rng.uniform_index(20));
    const double l2 = trial % 2 == 0 ? 0.0 : 0.05;
    const auto check = gl::testing::check_gradient(m, batch, l2);
    CHECK(check.worst_relative <= 1e-5);
  }
}

TEST_CASE("probabilities lie on the simplex") {
  gl::Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = gl::testing::random_model(rng, 2 + rng.uniform_index(5), 6);
    for (const auto& s : gl::testing::random_batch(rng, m, 5)) {
      const auto p = gl::predict(m, s.x);
      double sum = 0.0;
      for (double v : p.probabilities) {
        CHECK(v >= 0.0);
        sum += v;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("separable data is fit perfectly with defaults") {
  gl::Rng rng(12);
  const auto data = separable(rng, 80);
  gl::TrainLog log;
  const auto m = gl::train_classifier(data, gl::TrainConfig{}, &log);
  CHECK(gl::evaluate_accuracy(m, data) == 1.0);
  CHECK(log.epoch_loss.size() == 500);
  CHECK(log.diagnostics.empty());
  CHECK(log.epoch_loss.back() < log.epoch_loss.front());
}

TEST_CASE("training is deterministic and duplicate-invariant") {
  gl::Rng rng(13);
  const auto data = separable(rng, 40);
  gl::TrainConfig cfg;
  cfg.epochs = 100;
  cfg.rng_seed = 4;
  const auto a = gl::train_classifier(data, cfg);
  CHECK(a == gl::train_classifier(data, cfg));

  auto doubled = data;
  doubled.insert(doubled.end(), data.begin(), data.end());
  const auto b = gl::train_classifier(doubled, cfg);
  for (size_t c = 0; c < a.classes(); ++c) {
    CHECK(b.biases[c] == doctest::Approx(a.biases[c]).epsilon(1e-10));
    for (size_t f = 0; f < a.features(); ++f) {
      CHECK(b.weights[c][f] == doctest::Approx(a.weights[c][f]).epsilon(1e-10));
    }
  }
}

TEST_CASE("train_classifier errors and diagnostics") {
  gl::Rng rng(14);
  auto data = separable(rng, 10);
  for (auto& s : data) s.label = "glass";
  try {
    gl::train_classifier(data, {});
    FAIL("expected SingleClassData");
  } catch (const gl::Error& e) {
    CHECK(e.code() == gl::ErrorCode::kSingleClassData);
  }

  auto wild = separable(rng, 20);
  for (auto& s : wild) {
    for (auto& v : s.x.values) v *= 1e3;
  }
  gl::TrainConfig hot;
  hot.learning_rate = 1e306;
  try {
    gl::train_classifier(wild, hot);
    FAIL("expected NonFiniteLoss");
  } catch (const gl::Error& e) {
    CHECK(e.code() == gl::ErrorCode::kNonFiniteLoss);
  }

  // Too large to be monotone but not large enough to overflow.
  gl::TrainConfig jumpy;
  jumpy.learning_rate = 50.0;
  jumpy.epochs = 50;
  gl::TrainLog log;
  auto noisy = gl::testing::random_batch(rng, gl::testing::random_model(rng, 3, 6), 60);
  gl::train_classifier(noisy, jumpy, &log);
  CHECK_FALSE(log.diagnostics.empty());
}

TEST_CASE("label permutation permutes predictions") {
  gl::Rng rng(21);
  const auto source = gl::testing::random_model(rng, 3, 6);
  auto data = gl::testing::random_batch(rng, source, 60);
  for (auto& s : data) s.label = gl::predict(source, s.x).label;
  const std::map<std::string, std::string> rename{{"a", "b"}, {"b", "c"}, {"c", "a"}};
  auto renamed = data;
  for (auto& s : renamed) s.label = rename.at(s.label);

  gl::TrainConfig cfg;
  cfg.init_scale = 0.0;
  cfg.epochs = 200;
  const auto m1 = gl::train_classifier(data, cfg);
  const auto m2 = gl::train_classifier(renamed, cfg);
  for (const auto& s : data) {
    const auto p1 = gl::predict(m1, s.x);
    const auto p2 = gl::predict(m2, s.x);
    CHECK(p2.label == rename.at(p1.label));
    for (size_t c = 0; c < 3; ++c) {
      const auto& l = m1.class_labels[c];
      const size_t c2 = static_cast<size_t>(
          std::find(m2.class_labels.begin(), m2.class_labels.end(), rename.at(l)) -
          m2.class_labels.begin());
      CHECK(p2.probabilities[c2] == doctest::Approx(p1.probabilities[c]).epsilon(1e-9));
    }
  }
}

TEST_CASE("evaluate_accuracy arithmetic") {
  auto m = zero_model(2, 1);
  m.class_labels = {"only", "other"};
  std::vector<gl::LabeledSample> all_only{{{{1.0}}, "only"}, {{{2.0}}, "only"}};
  CHECK(gl::evaluate_accuracy(m, all_only) == 1.0);

  std::vector<gl::LabeledSample> four{
      {{{1.0}}, "only"}, {{{2.0}}, "only"}, {{{3.0}}, "only"}, {{{4.0}}, "other"}};
  CHECK(gl::evaluate_accuracy(m, four) == 0.75);
  CHECK_THROWS_AS(gl::evaluate_accuracy(m, std::vector<gl::LabeledSample>{}), gl::Error);
}

TEST_CASE("threshold classifier cuts at midpoints of class means") {
  std::vector<gl::LabeledSample> data{{{{0.0, 9.0}}, "light"}, {{{2.0, 9.0}}, "light"},
                                      {{{10.0, 9.0}}, "heavy"}, {{{12.0, 9.0}}, "heavy"},
                                      {{{5.0, 9.0}}, "mid"}};
  const auto t = gl::fit_threshold_classifier(data, 0);
  CHECK(t.labels == std::vector<std::string>{"light", "mid", "heavy"});
  CHECK(t.thresholds == std::vector<double>{3.0, 8.0});
  CHECK(t.classify({{2.9, 0.0}}) == "light");
  CHECK(t.classify({{3.0, 0.0}}) == "mid");
  CHECK(t.classify({{100.0, 0.0}}) == "heavy");
  CHECK(gl::evaluate_accuracy(t, data) == 1.0);
}
