// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

// Run persistence (manifest + artifacts), comparison tables, SVG charts and
// the three-column framework comparison table.

#ifndef GREENLOOP_REPORT_HPP_
#define GREENLOOP_REPORT_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "greenloop/json_util.hpp"
#include "greenloop/pipeline.hpp"

namespace greenloop {

inline constexpr std::string_view kToolVersion = "0.1.0";

// FNV-1a over the scenario JSON, seed, mode and tool version; 16 hex digits.
std::string compute_run_id(const ScenarioSpec& s, RunMode mode, uint64_t seed);

struct RunManifest {
  std::string run_id;
  std::string scenario_name;
  ScenarioFamily family = ScenarioFamily::kGeneric;
  RunMode mode = RunMode::kBaseline;
  uint64_t seed = 0;
  std::string tool_version;
  std::string created_at;  // UTC, ISO 8601 with milliseconds
  std::map<std::string, std::string> artifacts;  // name -> path relative to the run dir
  std::map<std::string, double> timings;
  EnergyLedger pipeline_energy;
  Json metrics;  // snapshot of metrics.json
};

// Timings and measured energy are left out unless every stage used a
// synthetic cost, so the file is a pure function of (scenario, mode, seed).
Json metrics_to_json(const RunResult& r, bool include_pipeline_energy);
RunResult metrics_from_json(const Json& j, const std::string& source);

Json energy_ledger_to_json(const EnergyLedger& l);
Json classifier_to_json(const SoftmaxModel& m);
Json threshold_classifier_to_json(const ThresholdClassifier& c);
Json qtables_to_json(const std::vector<QTable>& tables);
Json allocation_to_json(const AllocationResult& a);

// Writes <out_dir>/<run_id>/{manifest,metrics,scenario,...}. `s` is the
// scenario as given (before any seed override).
RunManifest persist_run(const ScenarioSpec& s, const RunOutcome& outcome,
                        const std::filesystem::path& out_dir);

struct LoadedRun {
  RunManifest manifest;
  RunResult result;  // metrics plus the manifest's timings and energy ledger
  std::filesystem::path dir;
};

// Accepts a manifest file or the run directory holding one. Throws
// kManifestUnreadable.
LoadedRun load_run(const std::filesystem::path& path);

// Most recent manifest of `mode` under `out_dir` (optionally restricted to a
// family); ties on the timestamp go to the larger run id.
std::optional<LoadedRun> latest_run(const std::filesystem::path& out_dir, RunMode mode,
                                    std::optional<ScenarioFamily> family = std::nullopt);

// Display cells. Percentages are shown x100 with a '%', CO2 in tons, and
// other quantities with thousands separators; two decimals at most.
std::string display_value(const MetricComparison& m, double v);
std::string display_improvement(const MetricComparison& m);

std::string render_compare_markdown(const ImprovementReport& rep);
std::string render_compare_csv(const ImprovementReport& rep);

enum class ChartKind { kRecovery, kEnergy, kEmissions, kAccuracy, kSummary };

std::string_view chart_kind_name(ChartKind k);
std::optional<ChartKind> parse_chart_kind(std::string_view text);

// Grouped bars, baseline vs framework, one group per metric of the kind.
// Throws kMissingMetric when the report has none.
std::string render_chart_svg(const ImprovementReport& rep, ChartKind kind);

struct Table3Row {
  std::string label;
  std::string traditional;
  std::string ai_driven;
  std::string proposed;
  std::string measured_key;  // energy_intensity | recovery | co2_reduction
};

struct Table3Fixture {
  std::string title;
  std::vector<std::string> columns;  // metric column first, then the three frameworks
  std::vector<Table3Row> rows;
  std::vector<std::string> notes;
};

Table3Fixture load_table3(const std::filesystem::path& path);

struct Table3Measured {
  std::optional<double> energy_gj_per_tonne;
  std::optional<double> recovery_percent;
  std::optional<double> co2_reduction_percent;
};

// From the latest framework run in `out_dir` (and the latest baseline of the
// same family for the CO2 reduction).
Table3Measured measure_table3(const std::filesystem::path& out_dir);

std::string render_table3_markdown(const Table3Fixture& t, const Table3Measured& m);
std::string render_table3_csv(const Table3Fixture& t, const Table3Measured& m);

}  // namespace greenloop

#endif  // GREENLOOP_REPORT_HPP_
