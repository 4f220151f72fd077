// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

// greenloop: run scenarios, compare runs, draw charts, render the framework
// comparison table, lint and calibrate scenario files.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "greenloop/error.hpp"
#include "greenloop/json_util.hpp"
#include "greenloop/pipeline.hpp"
#include "greenloop/report.hpp"
#include "greenloop/scenario.hpp"
#include "greenloop/twin.hpp"

#ifndef GREENLOOP_FIXTURE_DIR
#define GREENLOOP_FIXTURE_DIR "fixtures"
#endif

namespace gl = greenloop;
namespace fs = std::filesystem;

namespace {

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  usage error\n"
    "  2  parse error (malformed JSON or schema)\n"
    "  3  scenario validation or LP compilation failed\n"
    "  4  file I/O error\n"
    "  5  model error (solver, routing, carbon accounting, classifier)\n"
    "  6  run mode / manifest error\n"
    "  7  chart or report metric missing\n"
    " 10  internal error\n";

int exit_code_for(gl::ErrorCode c) {
  using gl::ErrorCode;
  switch (c) {
    case ErrorCode::kParse: return 2;
    case ErrorCode::kValidation:
    case ErrorCode::kCompile: return 3;
    case ErrorCode::kIo: return 4;
    case ErrorCode::kModeUnsupported:
    case ErrorCode::kModeMismatch:
    case ErrorCode::kMissingArtifacts:
    case ErrorCode::kManifestUnreadable: return 6;
    case ErrorCode::kMissingMetric: return 7;
    default: return 5;
  }
}

struct Globals {
  std::optional<uint64_t> seed;
  std::string out = "out";
  std::string format = "md";
};

int cmd_run(const Globals& g, const std::string& scenario_path, const std::string& mode_text) {
  const auto mode = gl::parse_run_mode(mode_text);
  if (!mode) throw gl::Error(gl::ErrorCode::kModeUnsupported, fmt::format("unknown mode '{}'", mode_text));
  const auto s = gl::load_scenario(scenario_path);
  const auto outcome = gl::run_pipeline(s, *mode, g.seed);
  const auto manifest = gl::persist_run(s, outcome, g.out);
  const auto dir = fs::path(g.out) / manifest.run_id;
  fmt::print("run {} ({}, seed {}) -> {}\n", manifest.run_id, mode_text, manifest.seed,
             (dir / "manifest.json").string());
  return 0;
}

int cmd_compare(const Globals& g, const std::string& baseline, const std::string& framework) {
  const auto b = gl::load_run(baseline);
  const auto f = gl::load_run(framework);
  const auto rep = gl::compare_runs(b.result, f.result);
  const std::string md = gl::render_compare_markdown(rep);
  const std::string csv = gl::render_compare_csv(rep);
  const std::string stem = fmt::format("compare_{}", gl::scenario_family_name(rep.family));
  gl::write_text_file(fs::path(g.out) / (stem + ".md"), md);
  gl::write_text_file(fs::path(g.out) / (stem + ".csv"), csv);
  std::cout << (g.format == "csv" ? csv : md);
  return 0;
}

int cmd_chart(const std::string& baseline, const std::string& framework, const std::string& kind_text,
              const std::string& output) {
  const auto kind = gl::parse_chart_kind(kind_text);
  if (!kind) throw gl::Error(gl::ErrorCode::kMissingMetric, fmt::format("unknown chart kind '{}'", kind_text));
  const auto rep = gl::compare_runs(gl::load_run(baseline).result, gl::load_run(framework).result);
  gl::write_text_file(output, gl::render_chart_svg(rep, *kind));
  fmt::print("wrote {}\n", output);
  return 0;
}

int cmd_table3(const Globals& g, const std::string& fixture, const std::string& output) {
  const auto t = gl::load_table3(fixture);
  const auto measured = gl::measure_table3(g.out);
  const std::string text =
      g.format == "csv" ? gl::render_table3_csv(t, measured) : gl::render_table3_markdown(t, measured);
  if (output.empty()) {
    std::cout << text;
  } else {
    gl::write_text_file(output, text);
    fmt::print("wrote {}\n", output);
  }
  return 0;
}

int cmd_validate(const std::string& scenario_path) {
  if (!fs::exists(scenario_path)) {
    throw gl::Error(gl::ErrorCode::kIo, fmt::format("scenario file '{}' does not exist", scenario_path));
  }
  const auto problems = gl::lint_scenario(gl::read_text_file(scenario_path), scenario_path);
  for (const auto& d : problems) fmt::print("{}: {}: {}\n", scenario_path, d.path, d.message);
  if (!problems.empty()) {
    fmt::print(stderr, "greenloop: {} problem(s) in {}\n", problems.size(), scenario_path);
    return 3;
  }
  fmt::print("{}: ok\n", scenario_path);
  return 0;
}

int cmd_calibrate(const std::string& scenario_path, const std::string& output) {
  const auto s = gl::load_scenario(scenario_path);
  if (!s.calibration) {
    throw gl::Error(gl::ErrorCode::kValidation, fmt::format("{}: no calibration targets", scenario_path));
  }
  gl::CalibrationReport rep;
  const auto adjusted = gl::calibrate_scenario(s, *s.calibration, &rep);
  gl::save_scenario(adjusted, output.empty() ? scenario_path : output);
  for (const auto& [el, v] : rep.achieved_recovery) {
    auto it = rep.efficiency_scale.find(el);
    if (it == rep.efficiency_scale.end()) continue;  // not a calibration target
    fmt::print("recovery {}: {:.6f} (scale {:.6f})\n", el, v, it->second);
  }
  fmt::print("energy: {:.3f} kWh (scale {:.6f})\n", rep.achieved_energy_kwh, rep.energy_scale);
  fmt::print("co2: {:.3f} kg (scale {:.6f})\n", rep.achieved_co2_kg, rep.co2_scale);
  for (const auto& n : rep.notes) fmt::print("note: {}\n", n);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"greenloop: circular-economy resource flow scenarios"};
  app.footer(kExitCodes);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Override the scenario RNG seed");
  app.add_option("--out", g.out, "Output directory for runs and reports")->capture_default_str();
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"md", "csv"}))->capture_default_str();

  std::string scenario, mode = "framework", baseline, framework, kind, output, fixture;
  fixture = std::string(GREENLOOP_FIXTURE_DIR) + "/table3.json";

  auto* run = app.add_subcommand("run", "Run a scenario through the pipeline and persist the run");
  run->add_option("--scenario", scenario, "Scenario JSON file")->required();
  run->add_option("--mode", mode, "baseline or framework")->check(CLI::IsMember({"baseline", "framework"}));

  auto* compare = app.add_subcommand("compare", "Compare a baseline and a framework run");
  compare->add_option("--baseline", baseline, "Baseline manifest or run directory")->required();
  compare->add_option("--framework", framework, "Framework manifest or run directory")->required();

  auto* chart = app.add_subcommand("chart", "Draw a grouped-bar SVG chart of two runs");
  chart->add_option("--baseline", baseline, "Baseline manifest or run directory")->required();
  chart->add_option("--framework", framework, "Framework manifest or run directory")->required();
  chart->add_option("--kind", kind, "recovery | energy | emissions | accuracy | summary")->required();
  chart->add_option("--output", output, "SVG path")->required();

  auto* table3 = app.add_subcommand("table3", "Render the three-column framework comparison");
  table3->add_option("--fixture", fixture, "Comparison fixture")->capture_default_str();
  table3->add_option("--output", output, "Output file (stdout when omitted)");

  auto* validate = app.add_subcommand("validate", "Lint a scenario file");
  validate->add_option("--scenario", scenario, "Scenario JSON file")->required();

  auto* calibrate = app.add_subcommand("calibrate", "Fit facility parameters to the scenario's calibration targets");
  calibrate->add_option("--scenario", scenario, "Scenario JSON file")->required();
  calibrate->add_option("--output", output, "Where to write the calibrated scenario (default: in place)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  if (*seed_opt) g.seed = seed_value;

  try {
    if (*run) return cmd_run(g, scenario, mode);
    if (*compare) return cmd_compare(g, baseline, framework);
    if (*chart) return cmd_chart(baseline, framework, kind, output);
    if (*table3) return cmd_table3(g, fixture, output);
    if (*validate) return cmd_validate(scenario);
    if (*calibrate) return cmd_calibrate(scenario, output);
  } catch (const gl::Error& e) {
    fmt::print(stderr, "greenloop: {}: {}\n", gl::error_code_name(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    fmt::print(stderr, "greenloop: internal error: {}\n", e.what());
    return 10;
  }
  return 1;
}
