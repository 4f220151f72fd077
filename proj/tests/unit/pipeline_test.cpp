// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <set>
#include <string>

#include "doctest.h"
#include "greenloop/error.hpp"
#include "greenloop/pipeline.hpp"
#include "greenloop/scenario.hpp"
#include "scenario_gen.hpp"

namespace gl = greenloop;
using gl::testing::fixture_path;

namespace {

gl::ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const gl::Error& e) {
    return e.code();
  }
  FAIL("expected a greenloop::Error");
  return gl::ErrorCode::kIo;
}

// Waste fixture with a shorter training budget; the tests here care about
// plumbing, not convergence.
gl::ScenarioSpec quick_waste(const char* name) {
  auto s = gl::load_scenario(fixture_path(name));
  s.routing.episodes = 2000;
  s.classifier.epochs = 300;
  s.feedback.extra_episodes = 200;
  return s;
}

gl::RunResult battery_result(gl::RunMode mode, std::map<std::string, double> recovery, double kwh, double co2) {
  gl::RunResult r;
  r.mode = mode;
  r.family = gl::ScenarioFamily::kBattery;
  r.recovery = std::move(recovery);
  r.process_energy_kwh = kwh;
  r.co2_kg = co2;
  return r;
}

}  // namespace

TEST_CASE("run mode names round trip") {
  for (auto m : {gl::RunMode::kBaseline, gl::RunMode::kFramework}) {
    CHECK(gl::parse_run_mode(gl::run_mode_name(m)) == m);
  }
  CHECK_FALSE(gl::parse_run_mode("hybrid"));
}

TEST_CASE("empty scenario runs to zeros") {
  const auto s = gl::parse_scenario(R"({"rng_seed": 4})");
  for (auto mode : {gl::RunMode::kBaseline, gl::RunMode::kFramework}) {
    const auto r = gl::run(s, mode);
    CHECK(r.recovery.empty());
    CHECK(r.co2_kg == 0.0);
    CHECK(r.process_energy_kwh == 0.0);
    CHECK_FALSE(r.classification_accuracy);
    CHECK_FALSE(r.transport_emissions_kg);
  }
}

TEST_CASE("family without its model is unsupported") {
  auto battery = gl::parse_scenario(R"({"rng_seed": 4, "family": "battery"})");
  CHECK(code_of([&] { gl::run(battery, gl::RunMode::kFramework); }) == gl::ErrorCode::kModeUnsupported);
  auto waste = quick_waste("waste_baseline.json");
  waste.sensors.reset();
  CHECK(code_of([&] { gl::run(waste, gl::RunMode::kBaseline); }) == gl::ErrorCode::kModeUnsupported);
}

TEST_CASE("stage failures name the stage") {
  auto s = quick_waste("waste_framework.json");
  s.classifier.learning_rate = 1e300;  // diverges
  try {
    gl::run(s, gl::RunMode::kFramework);
    FAIL("expected an error");
  } catch (const gl::Error& e) {
    CHECK(std::string(e.what()).find("stage 'preprocess'") != std::string::npos);
  }
}

TEST_CASE("same scenario and seed give identical results") {
  const auto s = quick_waste("waste_framework.json");
  auto a = gl::run_pipeline(s, gl::RunMode::kFramework);
  auto b = gl::run_pipeline(s, gl::RunMode::kFramework);
  a.result.timings.clear();
  b.result.timings.clear();
  CHECK(a.result == b.result);
  CHECK(a.artifacts.routes == b.artifacts.routes);
  CHECK(a.artifacts.qtables == b.artifacts.qtables);
  CHECK(a.artifacts.classifier == b.artifacts.classifier);

  auto c = gl::run_pipeline(s, gl::RunMode::kFramework, s.rng_seed + 1);
  CHECK(c.result.seed == s.rng_seed + 1);
  CHECK(c.artifacts.train_events != a.artifacts.train_events);
}

TEST_CASE("battery runs are deterministic too") {
  const auto s = gl::load_scenario(fixture_path("battery_framework.json"));
  auto a = gl::run(s, gl::RunMode::kFramework);
  auto b = gl::run(s, gl::RunMode::kFramework);
  a.timings.clear();
  b.timings.clear();
  CHECK(a == b);
}

TEST_CASE("partition of the 50-bin graph") {
  const auto s = gl::load_scenario(fixture_path("waste_baseline.json"));
  const auto& g = *s.collection_graph;
  const auto districts = gl::partition_districts(g, 10);
  REQUIRE(districts.size() == 5);
  std::set<gl::NodeId> seen;
  for (const auto& d : districts) {
    CHECK(d.depot() == g.depot());
    CHECK(d.service_bins().size() <= 10);
    for (const auto& n : d.nodes) {
      if (n.is_depot) continue;
      CHECK(seen.insert(n.id).second);
    }
    CHECK(gl::validate_graph(d).empty());
    for (const auto& [key, attrs] : d.edges) CHECK(g.edge(key.first, key.second) == attrs);
  }
  CHECK(seen.size() == g.nodes.size() - 1);
}

TEST_CASE("partition edge cases") {
  const auto s = gl::load_scenario(fixture_path("waste_baseline.json"));
  const auto& g = *s.collection_graph;
  const auto whole = gl::partition_districts(g, 100);
  REQUIRE(whole.size() == 1);
  CHECK(whole[0] == g);

  gl::CollectionGraph lonely;
  lonely.nodes = {{0, 0.0, true}};
  CHECK(gl::partition_districts(lonely, 10).empty());
}

TEST_CASE("greedy allocation respects the limits") {
  gl::Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = gl::testing::random_scenario(rng);
    const auto a = gl::greedy_allocation(s);
    const auto lp = gl::compile_to_lp(s);
    REQUIRE(a.values.size() == lp.num_variables());
    gl::MilpSolution sol;
    sol.status = gl::SolveStatus::kOptimal;
    sol.values = a.values;
    sol.objective_value = a.objective;
    CHECK(gl::check_solution(lp, sol).empty());
    // The MILP never does worse.
    const auto opt = gl::solve_milp(lp);
    if (opt.status == gl::SolveStatus::kOptimal) CHECK(opt.objective_value <= a.objective + 1e-6);
  }
}

TEST_CASE("compare reproduces the headline arithmetic") {
  auto b = battery_result(gl::RunMode::kBaseline, {{"cobalt", 0.68}, {"nickel", 0.70}, {"lithium", 0.72}}, 20000, 30000);
  auto f = battery_result(gl::RunMode::kFramework, {{"cobalt", 0.85}, {"nickel", 0.90}, {"lithium", 0.88}}, 15000, 22000);
  f.expectations["co2_kg"] = {gl::Expectation::Form::kRelative, -28.0};
  f.expectations["recovery.cobalt"] = {gl::Expectation::Form::kPoints, 17.0};
  f.expectations["process_energy_kwh"] = {gl::Expectation::Form::kRelative, -25.0};
  const auto rep = gl::compare_runs(b, f);

  CHECK(*rep.find("recovery.cobalt")->delta_pp == doctest::Approx(17.0));
  CHECK(*rep.find("recovery.nickel")->delta_pp == doctest::Approx(20.0));
  CHECK(*rep.find("recovery.lithium")->delta_pp == doctest::Approx(16.0));
  CHECK(*rep.find("recovery.mean")->delta_pp == doctest::Approx(53.0 / 3.0));
  CHECK(*rep.find("process_energy_kwh")->delta_relative == doctest::Approx(-25.0));
  const auto* co2 = rep.find("co2_kg");
  CHECK(*co2->delta_relative == doctest::Approx(-80.0 / 3.0));
  CHECK(co2->direction == gl::Direction::kImproved);
  CHECK(rep.find("process_energy_kwh")->direction == gl::Direction::kImproved);

  REQUIRE(rep.annotations.size() == 1);
  CHECK(rep.annotations[0].find("CO2 Emissions (tons)") != std::string::npos);
  CHECK(rep.annotations[0].find("-26.67%") != std::string::npos);
  CHECK(rep.annotations[0].find("-28%") != std::string::npos);

  // Table order leads with the three elements.
  REQUIRE(rep.metrics.size() >= 3);
  CHECK(rep.metrics[0].key == "recovery.cobalt");
  CHECK(rep.metrics[1].key == "recovery.nickel");
  CHECK(rep.metrics[2].key == "recovery.lithium");
}

TEST_CASE("self comparison shows no change") {
  const auto s = gl::load_scenario(fixture_path("battery_baseline.json"));
  auto b = gl::run(s, gl::RunMode::kBaseline);
  auto f = b;
  f.mode = gl::RunMode::kFramework;
  const auto rep = gl::compare_runs(b, f);
  for (const auto& m : rep.metrics) {
    CAPTURE(m.key);
    CHECK(m.direction == gl::Direction::kUnchanged);
    if (m.delta_pp) CHECK(*m.delta_pp == 0.0);
    if (m.delta_relative) CHECK(*m.delta_relative == 0.0);
  }
}

TEST_CASE("zero baseline has no relative delta") {
  auto b = battery_result(gl::RunMode::kBaseline, {}, 0.0, 0.0);
  auto f = battery_result(gl::RunMode::kFramework, {}, 0.0, 5.0);
  f.expectations["co2_kg"] = {gl::Expectation::Form::kRelative, -10.0};
  const auto rep = gl::compare_runs(b, f);
  const auto* co2 = rep.find("co2_kg");
  CHECK_FALSE(co2->delta_relative);
  CHECK(co2->direction == gl::Direction::kWorsened);
  REQUIRE(rep.annotations.size() == 1);
  CHECK(rep.annotations[0].find("no computable counterpart") != std::string::npos);
}

TEST_CASE("compare rejects mismatched runs") {
  auto b = battery_result(gl::RunMode::kBaseline, {}, 1, 1);
  auto f = battery_result(gl::RunMode::kFramework, {}, 1, 1);
  CHECK(code_of([&] { gl::compare_runs(f, b); }) == gl::ErrorCode::kModeMismatch);
  CHECK(code_of([&] { gl::compare_runs(b, b); }) == gl::ErrorCode::kModeMismatch);
  f.family = gl::ScenarioFamily::kWaste;
  CHECK(code_of([&] { gl::compare_runs(b, f); }) == gl::ErrorCode::kModeMismatch);
}

TEST_CASE("framework beats baseline on the bundled fixtures") {
  SUBCASE("battery") {
    const auto b = gl::run(gl::load_scenario(fixture_path("battery_baseline.json")), gl::RunMode::kBaseline);
    const auto f = gl::run(gl::load_scenario(fixture_path("battery_framework.json")), gl::RunMode::kFramework);
    for (const auto& [el, rate] : b.recovery) CHECK(f.recovery.at(el) > rate);
    CHECK(f.process_energy_kwh < b.process_energy_kwh);
    CHECK(f.co2_kg < b.co2_kg);
    CHECK(f.waste_reduction_fraction > b.waste_reduction_fraction);
  }
  SUBCASE("waste") {
    const auto b = gl::run(gl::load_scenario(fixture_path("waste_baseline.json")), gl::RunMode::kBaseline);
    const auto f = gl::run(gl::load_scenario(fixture_path("waste_framework.json")), gl::RunMode::kFramework);
    CHECK(*f.classification_accuracy > *b.classification_accuracy);
    CHECK(*f.transport_emissions_kg < *b.transport_emissions_kg);
  }
}

TEST_CASE("feedback bumps the version and keeps the artifacts coherent") {
  const auto s = quick_waste("waste_framework.json");
  const auto out = gl::run_pipeline(s, gl::RunMode::kFramework);
  const auto fb = gl::feedback_update(s, out.artifacts);
  CHECK(fb.artifacts.version == out.artifacts.version + 1);
  CHECK(fb.artifacts.train_events.size() > out.artifacts.train_events.size());
  CHECK(fb.artifacts.heldout_events == out.artifacts.heldout_events);
  REQUIRE(fb.artifacts.routes.size() == fb.artifacts.districts.size());
  for (size_t d = 0; d < fb.artifacts.districts.size(); ++d) {
    const auto& route = fb.artifacts.routes[d];
    const auto& g = fb.artifacts.districts[d];
    CHECK(route.front() == g.depot());
    CHECK(route.back() == g.depot());
    CHECK(std::set<gl::NodeId>(route.begin() + 1, route.end() - 1).size() == g.service_bins().size());
  }
  CHECK(fb.accuracy_before == doctest::Approx(*out.result.classification_accuracy));

  const auto again = gl::feedback_update(s, out.artifacts);
  CHECK(again.artifacts.classifier == fb.artifacts.classifier);
  CHECK(again.artifacts.qtables == fb.artifacts.qtables);
}

TEST_CASE("feedback without new data is a no-op apart from the version") {
  auto s = quick_waste("waste_framework.json");
  s.feedback = {};
  const auto out = gl::run_pipeline(s, gl::RunMode::kFramework);
  const auto fb = gl::feedback_update(s, out.artifacts);
  CHECK(fb.artifacts.version == 2);
  CHECK(fb.artifacts.classifier == out.artifacts.classifier);
  CHECK(fb.artifacts.qtables == out.artifacts.qtables);
  CHECK(fb.artifacts.routes == out.artifacts.routes);
  CHECK(fb.accuracy_after == fb.accuracy_before);
  CHECK(fb.diagnostics.empty());
}

TEST_CASE("feedback needs something to update") {
  const auto s = quick_waste("waste_baseline.json");
  gl::RunArtifacts empty;
  CHECK(code_of([&] { gl::feedback_update(s, empty); }) == gl::ErrorCode::kMissingArtifacts);

  // A baseline run has only the rule classifier and no Q-tables.
  const auto out = gl::run_pipeline(s, gl::RunMode::kBaseline);
  CHECK(code_of([&] { gl::feedback_update(s, out.artifacts); }) == gl::ErrorCode::kMissingArtifacts);
}
