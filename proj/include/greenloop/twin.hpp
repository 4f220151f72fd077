// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

// Seeded digital twin: a station-by-station mass-flow model of a battery
// recycling line and a stochastic smart-bin fill/deposit generator.

#ifndef GREENLOOP_TWIN_HPP_
#define GREENLOOP_TWIN_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "greenloop/classifier.hpp"
#include "greenloop/facility.hpp"
#include "greenloop/lca.hpp"
#include "greenloop/routing.hpp"
#include "greenloop/scenario.hpp"

namespace greenloop {

// Mass not covered by a material's composition is tracked under this element.
inline constexpr std::string_view kRemainderElement = "other";

struct StationEvent {
  int64_t step = 0;
  size_t item = 0;  // index into the scenario's materials
  std::string station_id;
  double input_kg = 0.0;
  std::map<std::string, double> recovered;  // element -> kg
  double lost_kg = 0.0;
  double energy_kwh = 0.0;

  bool operator==(const StationEvent&) const = default;
};

struct SimulationTrace {
  std::vector<StationEvent> steps;  // ordered by (step, station, item)
  std::map<std::string, double> input_totals;
  std::map<std::string, double> recovered_totals;
  std::map<std::string, double> lost_totals;
  std::map<std::string, double> residual_by_element;
  double input_kg = 0.0;
  double residual_kg = 0.0;
  double energy_kwh = 0.0;
  int64_t makespan_steps = 0;
  ActivityLedger activity_ledger;  // station id -> kg processed
  uint64_t rng_seed_used = 0;

  bool operator==(const SimulationTrace&) const = default;
};

// Every battery-cell material passes through the stations in order. At each
// station an element's recovered mass is incoming x efficiency, lost mass is
// incoming x loss_fraction, and the rest moves on; what leaves the last
// station is residual.
SimulationTrace simulate_recycling(const ScenarioSpec& s, const FacilityModel& f);

// recovered / input per element; elements with no input are absent.
std::map<std::string, double> recovery_rates(const SimulationTrace& trace, const ScenarioSpec& s);

// Violations of input = recovered + lost + residual (per element, relative
// tolerance) and of nonnegativity. Empty when the trace balances.
std::vector<std::string> check_mass_balance(const SimulationTrace& trace, double rel_tol = 1e-6);

// 1 - residual / input over all mass; 0 for an empty trace.
double waste_reduction_fraction(const SimulationTrace& trace);

struct BinEvent {
  int64_t step = 0;
  NodeId bin = 0;
  double fill_level = 0.0;
  SensorRecord record;
  std::string true_label;

  bool operator==(const BinEvent&) const = default;
};

struct BinEventStream {
  std::vector<BinEvent> events;
  std::map<NodeId, double> final_fill;

  bool operator==(const BinEventStream&) const = default;
};

// Throws kNoGraph without a collection graph and kValidation without a sensor
// configuration. The overload without `seed` draws from the scenario seed.
BinEventStream simulate_bins(const ScenarioSpec& s, int64_t horizon);
BinEventStream simulate_bins(const ScenarioSpec& s, int64_t horizon, uint64_t seed);

// The graph with each bin's fill level replaced by its end-of-stream value.
CollectionGraph with_fill_levels(const CollectionGraph& g, const BinEventStream& stream);

// Newline-delimited JSON, one record per line.
void write_trace_ndjson(const SimulationTrace& trace, std::ostream& out);
void write_bin_events_ndjson(const BinEventStream& stream, std::ostream& out);

struct CalibrationReport {
  std::map<std::string, double> efficiency_scale;  // element -> multiplier
  std::map<std::string, double> achieved_recovery;
  double energy_scale = 1.0;
  double co2_scale = 1.0;
  double achieved_energy_kwh = 0.0;
  double achieved_co2_kg = 0.0;
  std::vector<std::string> notes;
};

// Adjusts the facility so simulated recovery rates hit `targets.recovery`
// (bisection on a per-element multiplier applied to every station), then
// rescales station kWh/kg and the stations' emission factors to hit the
// energy and CO2 totals. Returns the adjusted scenario.
ScenarioSpec calibrate_scenario(const ScenarioSpec& s, const CalibrationTargets& targets,
                                CalibrationReport* report = nullptr);

}  // namespace greenloop

#endif  // GREENLOOP_TWIN_HPP_
