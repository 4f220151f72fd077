// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "greenloop/error.hpp"
#include "greenloop/lca.hpp"
#include "greenloop/rng.hpp"

namespace gl = greenloop;
using Stage = gl::LifecycleStage;

namespace {

bool rel_eq(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

std::vector<gl::EmissionFactor> random_factors(gl::Rng& rng, size_t n) {
  std::vector<gl::EmissionFactor> out;
  for (size_t i = 0; i < n; ++i) {
    out.push_back({"f" + std::to_string(i), "p" + std::to_string(i), rng.uniform(0.0, 5.0),
                   static_cast<Stage>(rng.uniform_index(5))});
  }
  return out;
}

gl::ActivityLedger random_ledger(gl::Rng& rng, size_t n) {
  gl::ActivityLedger ledger;
  for (size_t i = 0; i < n; ++i) {
    if (rng.bernoulli(0.8)) ledger.entries["p" + std::to_string(i)] = rng.uniform(0.0, 1000.0);
  }
  return ledger;
}

}  // namespace

TEST_CASE("carbon_footprint examples") {
  const std::vector<gl::EmissionFactor> factors{{"e1", "P1", 2.0, Stage::kProcessing},
                                                {"e2", "P2", 3.0, Stage::kTransport}};
  CHECK(gl::carbon_footprint(factors, {}).total_kg == 0.0);

  gl::ActivityLedger ledger;
  ledger.add("P1", 4.0);
  ledger.add("P2", 5.0);
  const auto r = gl::carbon_footprint(factors, ledger);
  CHECK(r.total_kg == 23.0);
  CHECK(r.by_process.at("P1") == 8.0);
  CHECK(r.by_stage.at(Stage::kTransport) == 15.0);
}

TEST_CASE("carbon_footprint registry errors") {
  gl::ActivityLedger ledger;
  ledger.add("P9", 1.0);
  const std::vector<gl::EmissionFactor> one{{"e1", "P1", 2.0, Stage::kProcessing}};
  try {
    gl::carbon_footprint(one, ledger);
    FAIL("expected MissingFactor");
  } catch (const gl::Error& e) {
    CHECK(e.code() == gl::ErrorCode::kMissingFactor);
    CHECK(std::string(e.what()).find("P9") != std::string::npos);
  }

  const std::vector<gl::EmissionFactor> twice{{"e1", "P1", 2.0, Stage::kProcessing},
                                              {"e2", "P1", 1.0, Stage::kRecovery}};
  CHECK_THROWS_AS(gl::carbon_footprint(twice, {}), gl::Error);
  const std::vector<gl::EmissionFactor> same_id{{"e1", "P1", 2.0, Stage::kProcessing},
                                                {"e1", "P2", 1.0, Stage::kRecovery}};
  try {
    gl::carbon_footprint(same_id, {});
    FAIL("expected DuplicateFactor");
  } catch (const gl::Error& e) {
    CHECK(e.code() == gl::ErrorCode::kDuplicateFactor);
  }
}

TEST_CASE("aggregate_by_stage audits the report") {
  const std::vector<gl::EmissionFactor> factors{{"a", "P1", 1.5, Stage::kCollection},
                                                {"b", "P2", 2.5, Stage::kCollection},
                                                {"c", "P3", 4.0, Stage::kDisposal}};
  gl::ActivityLedger single;
  single.add("P3", 10.0);
  auto only = gl::aggregate_by_stage(gl::carbon_footprint(factors, single));
  REQUIRE(only.size() == 1);
  CHECK(only.at(Stage::kDisposal) == 40.0);

  gl::ActivityLedger both;
  both.add("P1", 2.0);
  both.add("P2", 2.0);
  auto report = gl::carbon_footprint(factors, both);
  CHECK(gl::aggregate_by_stage(report).at(Stage::kCollection) == 8.0);

  report.by_stage[Stage::kCollection] += 1.0;
  try {
    gl::aggregate_by_stage(report);
    FAIL("expected InconsistentReport");
  } catch (const gl::Error& e) {
    CHECK(e.code() == gl::ErrorCode::kInconsistentReport);
  }
}

TEST_CASE("lifecycle stage names round-trip") {
  for (auto s : {Stage::kCollection, Stage::kTransport, Stage::kProcessing, Stage::kRecovery,
                 Stage::kDisposal}) {
    CHECK(gl::parse_lifecycle_stage(gl::lifecycle_stage_name(s)) == s);
  }
  CHECK_FALSE(gl::parse_lifecycle_stage("landfill").has_value());
}

TEST_CASE("linearity, additivity and permutation invariance on random ledgers") {
  gl::Rng rng(4242);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t n = 1 + rng.uniform_index(12);
    auto factors = random_factors(rng, n);
    const auto f1 = random_ledger(rng, n);
    const auto f2 = random_ledger(rng, n);
    const double lambda = rng.uniform(0.0, 10.0);

    const auto base = gl::carbon_footprint(factors, f1);
    gl::ActivityLedger scaled;
    for (const auto& [p, v] : f1.entries) scaled.entries[p] = lambda * v;
    CHECK(rel_eq(gl::carbon_footprint(factors, scaled).total_kg, lambda * base.total_kg));

    gl::ActivityLedger sum = f1;
    for (const auto& [p, v] : f2.entries) sum.add(p, v);
    const auto r_sum = gl::carbon_footprint(factors, sum);
    const auto r2 = gl::carbon_footprint(factors, f2);
    CHECK(rel_eq(r_sum.total_kg, base.total_kg + r2.total_kg));
    for (const auto& [p, kg] : r_sum.by_process) {
      const double a = base.by_process.contains(p) ? base.by_process.at(p) : 0.0;
      const double b = r2.by_process.contains(p) ? r2.by_process.at(p) : 0.0;
      CHECK(rel_eq(kg, a + b));
    }

    std::reverse(factors.begin(), factors.end());
    CHECK(gl::carbon_footprint(factors, f1).by_process == base.by_process);
    CHECK(gl::aggregate_by_stage(base) == base.by_stage);
  }
}
