// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

// Declarative scenario model, its JSON file format, validation, and
// compilation into a linear program.

#ifndef GREENLOOP_SCENARIO_HPP_
#define GREENLOOP_SCENARIO_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "greenloop/classifier.hpp"
#include "greenloop/energy.hpp"
#include "greenloop/facility.hpp"
#include "greenloop/lca.hpp"
#include "greenloop/milp.hpp"
#include "greenloop/routing.hpp"

namespace greenloop {

enum class MaterialCategory { kBatteryCell, kPlastic, kMetal, kOrganic, kGlass, kOther };
enum class MaterialStage { kCollected, kDisassembled, kRecovered, kResidual };

std::string_view material_category_name(MaterialCategory c);
std::string_view material_stage_name(MaterialStage s);

struct MaterialSpec {
  std::string id;
  std::string name;
  MaterialCategory category = MaterialCategory::kOther;
  double mass_kg = 0.0;
  std::map<std::string, double> composition;  // element -> mass fraction
  MaterialStage lifecycle_stage = MaterialStage::kCollected;

  bool operator==(const MaterialSpec&) const = default;
};

struct ProcessSpec {
  std::string id;
  double unit_cost = 0.0;
  double energy_per_unit = 0.0;  // kWh
  std::string emission_factor_id;

  bool operator==(const ProcessSpec&) const = default;
};

struct ResourceLimit {
  std::string resource_id;
  double availability = 0.0;
  std::map<std::string, double> consumption;  // process id -> units per unit

  bool operator==(const ResourceLimit&) const = default;
};

enum class ScenarioFamily { kGeneric, kBattery, kWaste };

std::string_view scenario_family_name(ScenarioFamily f);
std::optional<ScenarioFamily> parse_scenario_family(std::string_view text);

// A published improvement figure attached to a fixture. `points` compares
// against the percentage-point delta, `relative` against the relative one.
struct Expectation {
  enum class Form { kPoints, kRelative };
  Form form = Form::kRelative;
  double value = 0.0;

  bool operator==(const Expectation&) const = default;
};

struct CalibrationTargets {
  std::map<std::string, double> recovery;  // element -> fraction
  std::optional<double> process_energy_kwh;
  std::optional<double> co2_kg;

  bool operator==(const CalibrationTargets&) const = default;
};

struct FeedbackConfig {
  int64_t horizon = 0;         // steps of new sensor data per round
  int64_t extra_episodes = 0;  // Q-learning episodes per district per round

  bool operator==(const FeedbackConfig&) const = default;
};

struct ScenarioSpec {
  std::string name;
  ScenarioFamily family = ScenarioFamily::kGeneric;
  std::string notes;
  uint64_t rng_seed = 0;

  std::vector<MaterialSpec> materials;
  std::vector<ProcessSpec> processes;
  std::vector<ResourceLimit> limits;
  std::vector<EmissionFactor> emission_factors;
  std::map<std::string, double> targets;
  std::set<std::string> integrality;
  std::optional<CollectionGraph> collection_graph;

  std::optional<FacilityModel> facility;
  std::optional<SensorConfig> sensors;
  RLConfig routing;
  size_t max_district_bins = 10;
  TrainConfig classifier;
  EnergyConfig energy;
  std::map<std::string, Expectation> expectations;
  std::optional<CalibrationTargets> calibration;
  FeedbackConfig feedback;

  bool operator==(const ScenarioSpec&) const = default;
};

struct Diagnostic {
  std::string path;  // e.g. "materials[3].mass_kg"
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

std::vector<Diagnostic> validate_scenario(const ScenarioSpec& s);

// Throws kParse (with line/column or field path) or kValidation (listing the
// first diagnostic and the count of the rest).
ScenarioSpec parse_scenario(std::string_view text, std::string_view source = "<memory>");
ScenarioSpec load_scenario(const std::filesystem::path& path);

// Structural parse (kParse on failure) followed by every validation finding.
std::vector<Diagnostic> lint_scenario(std::string_view text, std::string_view source);

// Pretty-printed JSON with sorted keys; parse_scenario(to_json) round-trips.
std::string scenario_to_json(const ScenarioSpec& s);
void save_scenario(const ScenarioSpec& s, const std::filesystem::path& path);

// One variable per process in declaration order; one row per limit, plus a
// CO2 cap row when targets has co2_cap_kg. Integral processes also get the
// tightest finite upper bound implied by the limits. Throws kCompile for a
// limit naming an unknown process and for an integral process no limit bounds.
LinearProgram compile_to_lp(const ScenarioSpec& s);

}  // namespace greenloop

#endif  // GREENLOOP_SCENARIO_HPP_
