// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <string>

#include "doctest.h"
#include "greenloop/error.hpp"
#include "greenloop/json_util.hpp"
#include "greenloop/milp.hpp"
#include "greenloop/scenario.hpp"
#include "milp_oracle.hpp"
#include "scenario_gen.hpp"

namespace gl = greenloop;
namespace fs = std::filesystem;
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

std::string message_of(const auto& fn) {
  try {
    fn();
  } catch (const gl::Error& e) {
    return e.what();
  }
  return "";
}

gl::ScenarioSpec two_process_scenario() {
  gl::ScenarioSpec s;
  s.processes = {{"P1", 3.0, 0.0, "e1"}, {"P2", 4.0, 0.0, "e2"}};
  s.emission_factors = {{"e1", "P1", 0.5, gl::LifecycleStage::kProcessing},
                        {"e2", "P2", 1.5, gl::LifecycleStage::kRecovery}};
  s.limits = {{"R", 4.0, {{"P1", 2.0}, {"P2", 3.0}}}};
  return s;
}

}  // namespace

TEST_CASE("battery fixture holds 1000 battery cells") {
  const auto s = gl::load_scenario(fixture_path("battery_baseline.json"));
  CHECK(s.materials.size() == 1000);
  for (const auto& m : s.materials) CHECK(m.category == gl::MaterialCategory::kBatteryCell);
  CHECK(s.family == gl::ScenarioFamily::kBattery);
  CHECK(gl::validate_scenario(s).empty());
}

TEST_CASE("every bundled fixture validates") {
  for (const char* name : {"battery_baseline.json", "battery_framework.json", "waste_baseline.json",
                           "waste_framework.json", "alloc_small.json"}) {
    CAPTURE(name);
    CHECK(gl::validate_scenario(gl::load_scenario(fixture_path(name))).empty());
  }
}

TEST_CASE("degenerate scenario is allowed") {
  const auto s = gl::parse_scenario(R"({"rng_seed": 3})");
  CHECK(s.materials.empty());
  CHECK(s.limits.empty());
  CHECK(s.rng_seed == 3);
}

TEST_CASE("over-full composition is rejected naming the material") {
  const char* text = R"({"rng_seed": 1, "materials": [
      {"id": "cell-7", "category": "battery-cell", "mass_kg": 2,
       "composition": {"cobalt": 0.7, "nickel": 0.6}}]})";
  CHECK(code_of([&] { gl::parse_scenario(text); }) == gl::ErrorCode::kValidation);
  const auto msg = message_of([&] { gl::parse_scenario(text); });
  CHECK(msg.find("cell-7") != std::string::npos);
  CHECK(msg.find("fractions sum > 1") != std::string::npos);
}

TEST_CASE("validate_scenario diagnostics carry field paths") {
  SUBCASE("negative mass") {
    gl::ScenarioSpec s;
    s.materials.push_back({"m1", "m1", gl::MaterialCategory::kMetal, -1.0, {}, gl::MaterialStage::kCollected});
    const auto d = gl::validate_scenario(s);
    REQUIRE(d.size() == 1);
    CHECK(d[0].path == "materials[0].mass_kg");
    CHECK(d[0].message.find("m1") != std::string::npos);
  }
  SUBCASE("dangling emission factor") {
    gl::ScenarioSpec s;
    s.processes = {{"P1", 1.0, 0.0, "no-such-factor"}};
    const auto d = gl::validate_scenario(s);
    REQUIRE(d.size() == 1);
    CHECK(d[0].message.find("no-such-factor") != std::string::npos);
  }
  SUBCASE("valid hand-built scenario") { CHECK(gl::validate_scenario(two_process_scenario()).empty()); }
  SUBCASE("negative target and unknown integral process") {
    auto s = two_process_scenario();
    s.targets["co2_cap_kg"] = -1.0;
    s.integrality.insert("P9");
    CHECK(gl::validate_scenario(s).size() == 2);
  }
}

TEST_CASE("parse errors locate the problem") {
  SUBCASE("syntax") {
    const auto msg = message_of([] { gl::parse_scenario("{\n  \"rng_seed\": 1,\n}", "s.json"); });
    CHECK(code_of([] { gl::parse_scenario("{\n  \"rng_seed\": 1,\n}", "s.json"); }) == gl::ErrorCode::kParse);
    CHECK(msg.find("s.json:3") != std::string::npos);
  }
  SUBCASE("unknown key") {
    const auto msg = message_of([] { gl::parse_scenario(R"({"rng_seed": 1, "colour": "green"})", "s.json"); });
    CHECK(msg.find("colour") != std::string::npos);
  }
  SUBCASE("missing seed") {
    CHECK(code_of([] { gl::parse_scenario(R"({"materials": []})"); }) == gl::ErrorCode::kParse);
  }
  SUBCASE("wrong type names the field") {
    const auto msg = message_of([] {
      gl::parse_scenario(R"({"rng_seed": 1, "processes": [{"id": "p", "unit_cost": "cheap", "emission_factor_id": "e"}]})");
    });
    CHECK(msg.find("processes[0].unit_cost") != std::string::npos);
  }
}

TEST_CASE("missing scenario file names the path") {
  const std::string path = "/nonexistent/dir/scenario.json";
  CHECK(code_of([&] { gl::load_scenario(path); }) == gl::ErrorCode::kIo);
  CHECK(message_of([&] { gl::load_scenario(path); }).find(path) != std::string::npos);
}

TEST_CASE("lint_scenario lists every problem") {
  const char* text = R"({"rng_seed": 1,
    "materials": [{"id": "a", "category": "metal", "mass_kg": -1},
                  {"id": "b", "category": "metal", "mass_kg": -2}]})";
  CHECK(gl::lint_scenario(text, "x").size() == 2);
}

TEST_CASE("compile_to_lp maps fields directly") {
  const auto lp = gl::compile_to_lp(two_process_scenario());
  CHECK(lp.objective == std::vector<double>{3.0, 4.0});
  REQUIRE(lp.rows.size() == 1);
  CHECK(lp.rows[0].coefficients == std::vector<double>{2.0, 3.0});
  CHECK(lp.rows[0].rhs == 4.0);
  CHECK(lp.integer_mask == std::vector<bool>{false, false});
  CHECK(lp.lower_bounds == std::vector<double>{0.0, 0.0});

  gl::ScenarioSpec bare;
  bare.processes = {{"P", 1.0, 0.0, "e"}};
  bare.emission_factors = {{"e", "P", 1.0, gl::LifecycleStage::kProcessing}};
  CHECK(gl::compile_to_lp(bare).rows.empty());
}

TEST_CASE("compile_to_lp appends the CO2 cap row") {
  auto s = two_process_scenario();
  s.targets["co2_cap_kg"] = 10.0;
  const auto lp = gl::compile_to_lp(s);
  REQUIRE(lp.rows.size() == 2);
  CHECK(lp.rows[1].coefficients == std::vector<double>{0.5, 1.5});
  CHECK(lp.rows[1].rhs == 10.0);
}

TEST_CASE("compile_to_lp errors") {
  auto s = two_process_scenario();
  s.limits[0].consumption["ghost"] = 1.0;
  CHECK(code_of([&] { gl::compile_to_lp(s); }) == gl::ErrorCode::kCompile);

  auto unbounded = two_process_scenario();
  unbounded.limits.clear();
  unbounded.integrality.insert("P1");
  CHECK(code_of([&] { gl::compile_to_lp(unbounded); }) == gl::ErrorCode::kCompile);
}

TEST_CASE("integral processes get the implied bound") {
  auto s = two_process_scenario();
  s.integrality = {"P1", "P2"};
  const auto lp = gl::compile_to_lp(s);
  CHECK(lp.integer_mask == std::vector<bool>{true, true});
  CHECK(lp.upper_bounds[0] == 2.0);  // floor(4 / 2)
  CHECK(lp.upper_bounds[1] == 1.0);  // floor(4 / 3)
}

TEST_CASE("alloc_small MILP matches exhaustive enumeration") {
  const auto s = gl::load_scenario(fixture_path("alloc_small.json"));
  REQUIRE(s.processes.size() == 3);
  REQUIRE(s.limits.size() == 2);
  REQUIRE(s.integrality.size() == 3);
  const auto lp = gl::compile_to_lp(s);
  const auto oracle = gl::testing::enumerate_milp(lp);
  REQUIRE(oracle);
  const auto sol = gl::solve_milp(lp);
  REQUIRE(sol.status == gl::SolveStatus::kOptimal);
  CHECK(sol.objective_value == doctest::Approx(oracle->objective).epsilon(1e-9));
  CHECK(gl::check_solution(lp, sol).empty());
}

TEST_CASE("random scenarios: LP shape, determinism and round trip") {
  gl::Rng rng(20260101);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = gl::testing::random_scenario(rng);
    REQUIRE(gl::validate_scenario(s).empty());
    const auto lp = gl::compile_to_lp(s);
    CHECK(lp.num_variables() == s.processes.size());
    CHECK(lp.rows.size() == s.limits.size() + (s.targets.contains("co2_cap_kg") ? 1 : 0));
    CHECK(gl::compile_to_lp(s) == lp);

    const auto text = gl::scenario_to_json(s);
    const auto back = gl::parse_scenario(text);
    CHECK(back == s);
    CHECK(gl::scenario_to_json(back) == text);
  }
}

TEST_CASE("fixtures survive a save/load round trip") {
  const fs::path dir = fs::temp_directory_path() / "greenloop_scenario_test";
  fs::create_directories(dir);
  for (const char* name : {"battery_framework.json", "waste_framework.json", "alloc_small.json"}) {
    CAPTURE(name);
    const auto s = gl::load_scenario(fixture_path(name));
    gl::save_scenario(s, dir / name);
    CHECK(gl::load_scenario(dir / name) == s);
  }
  fs::remove_all(dir);
}
