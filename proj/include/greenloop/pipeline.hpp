// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end orchestration: preprocess -> simulate -> optimize -> route ->
// carbon -> metrics, in baseline or framework mode, plus the improvement
// arithmetic between two runs and the batch feedback update.

#ifndef GREENLOOP_PIPELINE_HPP_
#define GREENLOOP_PIPELINE_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "greenloop/classifier.hpp"
#include "greenloop/energy.hpp"
#include "greenloop/lca.hpp"
#include "greenloop/milp.hpp"
#include "greenloop/routing.hpp"
#include "greenloop/scenario.hpp"
#include "greenloop/twin.hpp"

namespace greenloop {

enum class RunMode { kBaseline, kFramework };

std::string_view run_mode_name(RunMode m);
std::optional<RunMode> parse_run_mode(std::string_view text);

inline constexpr std::array<std::string_view, 6> kPipelineStages = {
    "preprocess", "simulate", "optimize", "route", "carbon", "metrics"};

struct RunResult {
  RunMode mode = RunMode::kBaseline;
  std::string scenario_name;
  ScenarioFamily family = ScenarioFamily::kGeneric;
  uint64_t seed = 0;

  // Element -> fraction, without the remainder bucket.
  std::map<std::string, double> recovery;
  double input_kg = 0.0;
  double process_energy_kwh = 0.0;
  EnergyLedger pipeline_energy;
  double co2_kg = 0.0;
  std::map<LifecycleStage, double> co2_by_stage;
  std::optional<double> classification_accuracy;
  std::optional<double> transport_emissions_kg;
  double waste_reduction_fraction = 0.0;
  std::optional<double> allocation_objective;
  std::map<std::string, Expectation> expectations;
  // Wall-clock seconds per stage; never part of the metrics file.
  std::map<std::string, double> timings;

  bool operator==(const RunResult&) const = default;
};

struct AllocationResult {
  bool optimized = false;  // MILP in framework mode, greedy fill otherwise
  SolveStatus status = SolveStatus::kOptimal;
  std::vector<std::string> process_ids;
  std::vector<double> values;
  double objective = 0.0;

  bool operator==(const AllocationResult&) const = default;
};

struct RunArtifacts {
  int version = 1;
  std::optional<SimulationTrace> trace;
  std::optional<BinEventStream> bin_events;
  std::vector<BinEvent> train_events;
  std::vector<BinEvent> heldout_events;
  std::optional<SoftmaxModel> classifier;
  std::optional<ThresholdClassifier> rule_classifier;
  std::vector<CollectionGraph> districts;
  std::vector<QTable> qtables;  // one per district, framework mode only
  std::vector<Route> routes;
  AllocationResult allocation;
  CarbonReport carbon;
};

struct RunOutcome {
  RunResult result;
  RunArtifacts artifacts;
};

// Throws kModeUnsupported when a battery scenario lacks a facility or a waste
// scenario lacks a graph or sensors; stage failures are rethrown with the
// stage name prefixed.
RunOutcome run_pipeline(const ScenarioSpec& s, RunMode mode,
                        std::optional<uint64_t> seed_override = std::nullopt);
RunResult run(const ScenarioSpec& s, RunMode mode,
              std::optional<uint64_t> seed_override = std::nullopt);

// Declaration-order fill: each process with negative unit cost takes as many
// units as the remaining availabilities allow.
AllocationResult greedy_allocation(const ScenarioSpec& s);

// Repeated nearest-neighbour chains from the depot, each at most max_bins
// long. Every district keeps the depot and the edges among its nodes.
std::vector<CollectionGraph> partition_districts(const CollectionGraph& g, size_t max_bins);

enum class Direction { kImproved, kWorsened, kUnchanged };

std::string_view direction_name(Direction d);

struct MetricComparison {
  std::string key;
  std::string label;
  double baseline = 0.0;
  double framework = 0.0;
  bool percentage = false;       // values are fractions shown as %
  bool lower_is_better = false;
  std::optional<double> delta_pp;        // percentage points
  std::optional<double> delta_relative;  // percent, (f - b) / b
  Direction direction = Direction::kUnchanged;

  bool operator==(const MetricComparison&) const = default;
};

struct ImprovementReport {
  ScenarioFamily family = ScenarioFamily::kGeneric;
  std::vector<MetricComparison> metrics;
  std::vector<std::string> annotations;

  const MetricComparison* find(std::string_view key) const;
  bool operator==(const ImprovementReport&) const = default;
};

// Throws kModeMismatch unless b is a baseline run and f a framework run of the
// same scenario family.
ImprovementReport compare_runs(const RunResult& b, const RunResult& f);

struct FeedbackResult {
  RunArtifacts artifacts;
  double accuracy_before = 0.0;
  double accuracy_after = 0.0;
  std::vector<std::string> diagnostics;
};

// Retrains the classifier on the prior training events plus s.feedback.horizon
// steps of new events, and continues Q-learning in every district for
// s.feedback.extra_episodes episodes. Throws kMissingArtifacts when the prior
// run produced neither a classifier nor Q-tables.
FeedbackResult feedback_update(const ScenarioSpec& s, const RunArtifacts& prior);

}  // namespace greenloop

#endif  // GREENLOOP_PIPELINE_HPP_
