// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "greenloop/scenario.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "greenloop/error.hpp"
#include "greenloop/json_util.hpp"

namespace greenloop {

namespace {

constexpr std::array kCategories{
    std::pair{MaterialCategory::kBatteryCell, std::string_view("battery-cell")},
    std::pair{MaterialCategory::kPlastic, std::string_view("plastic")},
    std::pair{MaterialCategory::kMetal, std::string_view("metal")},
    std::pair{MaterialCategory::kOrganic, std::string_view("organic")},
    std::pair{MaterialCategory::kGlass, std::string_view("glass")},
    std::pair{MaterialCategory::kOther, std::string_view("other")},
};

constexpr std::array kStages{
    std::pair{MaterialStage::kCollected, std::string_view("collected")},
    std::pair{MaterialStage::kDisassembled, std::string_view("disassembled")},
    std::pair{MaterialStage::kRecovered, std::string_view("recovered")},
    std::pair{MaterialStage::kResidual, std::string_view("residual")},
};

constexpr std::array kFamilies{
    std::pair{ScenarioFamily::kGeneric, std::string_view("generic")},
    std::pair{ScenarioFamily::kBattery, std::string_view("battery")},
    std::pair{ScenarioFamily::kWaste, std::string_view("waste")},
};

template <typename Table, typename E>
std::string_view name_in(const Table& table, E value) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

template <typename Table>
auto parse_enum(const Table& table, const std::string& text, const std::string& path) {
  for (const auto& [v, name] : table) {
    if (name == text) return v;
  }
  std::string allowed;
  for (const auto& [v, name] : table) allowed += fmt::format("{}'{}'", allowed.empty() ? "" : ", ", name);
  throw_field_error(path, fmt::format("'{}' is not one of {}", text, allowed));
}

bool nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
bool unit_interval(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

std::string_view material_category_name(MaterialCategory c) { return name_in(kCategories, c); }
std::string_view material_stage_name(MaterialStage s) { return name_in(kStages, s); }
std::string_view scenario_family_name(ScenarioFamily f) { return name_in(kFamilies, f); }

std::optional<ScenarioFamily> parse_scenario_family(std::string_view text) {
  for (const auto& [v, name] : kFamilies) {
    if (name == text) return v;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// validation

std::vector<Diagnostic> validate_scenario(const ScenarioSpec& s) {
  std::vector<Diagnostic> out;
  auto add = [&out](std::string path, std::string message) {
    out.push_back({std::move(path), std::move(message)});
  };

  std::set<std::string> material_ids;
  for (size_t i = 0; i < s.materials.size(); ++i) {
    const auto& m = s.materials[i];
    const auto at = fmt::format("materials[{}]", i);
    if (!material_ids.insert(m.id).second) add(at + ".id", fmt::format("duplicate id '{}'", m.id));
    if (!nonneg(m.mass_kg)) {
      add(at + ".mass_kg", fmt::format("material '{}': mass {} must be >= 0", m.id, m.mass_kg));
    }
    double sum = 0.0;
    for (const auto& [el, frac] : m.composition) {
      if (!unit_interval(frac)) {
        add(fmt::format("{}.composition.{}", at, el),
            fmt::format("material '{}': fraction {} outside [0, 1]", m.id, frac));
      }
      sum += frac;
    }
    if (sum > 1.0 + 1e-9) {
      add(at + ".composition", fmt::format("material '{}': fractions sum > 1 ({})", m.id, sum));
    }
  }

  std::set<std::string> factor_ids;
  std::set<std::string> factor_processes;
  std::set<std::string> process_ids;
  for (const auto& p : s.processes) process_ids.insert(p.id);
  for (size_t i = 0; i < s.emission_factors.size(); ++i) {
    const auto& f = s.emission_factors[i];
    const auto at = fmt::format("emission_factors[{}]", i);
    if (!factor_ids.insert(f.id).second) add(at + ".id", fmt::format("duplicate id '{}'", f.id));
    if (!nonneg(f.e)) add(at + ".e", fmt::format("factor '{}': e = {} must be >= 0", f.id, f.e));
    if (!process_ids.contains(f.process_id)) {
      add(at + ".process_id", fmt::format("factor '{}' names unknown process '{}'", f.id, f.process_id));
    }
    if (!factor_processes.insert(f.process_id).second) {
      add(at + ".process_id",
          fmt::format("process '{}' already has an emission factor", f.process_id));
    }
  }

  std::set<std::string> seen_processes;
  for (size_t i = 0; i < s.processes.size(); ++i) {
    const auto& p = s.processes[i];
    const auto at = fmt::format("processes[{}]", i);
    if (!seen_processes.insert(p.id).second) add(at + ".id", fmt::format("duplicate id '{}'", p.id));
    if (!std::isfinite(p.unit_cost)) add(at + ".unit_cost", "must be finite");
    if (!nonneg(p.energy_per_unit)) {
      add(at + ".energy_per_unit", fmt::format("process '{}': must be >= 0", p.id));
    }
    if (!factor_ids.contains(p.emission_factor_id)) {
      add(at + ".emission_factor_id",
          fmt::format("process '{}' references unknown emission factor '{}'", p.id,
                      p.emission_factor_id));
    }
  }

  for (size_t i = 0; i < s.limits.size(); ++i) {
    const auto& l = s.limits[i];
    const auto at = fmt::format("limits[{}]", i);
    if (!nonneg(l.availability)) {
      add(at + ".availability", fmt::format("limit '{}': must be >= 0", l.resource_id));
    }
    for (const auto& [pid, a] : l.consumption) {
      const auto cell = fmt::format("{}.consumption.{}", at, pid);
      if (!process_ids.contains(pid)) add(cell, fmt::format("unknown process '{}'", pid));
      if (!nonneg(a)) add(cell, fmt::format("coefficient {} must be >= 0", a));
    }
  }

  for (const auto& [key, value] : s.targets) {
    if (!nonneg(value)) add("targets." + key, fmt::format("target {} must be >= 0", value));
  }
  for (const auto& pid : s.integrality) {
    if (!process_ids.contains(pid)) add("integrality", fmt::format("unknown process '{}'", pid));
  }

  if (s.collection_graph) {
    for (auto& msg : validate_graph(*s.collection_graph)) add("collection_graph", msg);
  }
  if (s.facility) {
    for (auto& msg : validate_facility(*s.facility)) add("facility", msg);
    for (size_t i = 0; i < s.facility->stations.size(); ++i) {
      const auto& id = s.facility->stations[i].id;
      if (!process_ids.contains(id)) {
        add(fmt::format("facility.stations[{}].id", i),
            fmt::format("station '{}' is not a declared process", id));
      }
    }
  }
  if (s.sensors) {
    for (auto& msg : validate_sensors(*s.sensors)) add("sensors", msg);
  }
  for (auto& msg : validate_rl_config(s.routing)) add("routing", msg);
  if (s.max_district_bins < 1 || s.max_district_bins > kMaxTabularBins) {
    add("routing.max_district_bins", fmt::format("must lie in [1, {}]", kMaxTabularBins));
  }
  const auto& c = s.classifier;
  if (!(c.learning_rate > 0.0) || c.epochs < 1 || !nonneg(c.l2_penalty) || !nonneg(c.init_scale)) {
    add("classifier", "need learning_rate > 0, epochs >= 1, l2_penalty >= 0, init_scale >= 0");
  }
  if (!nonneg(s.energy.model.alpha) || !nonneg(s.energy.model.beta)) {
    add("energy", "alpha and beta must be >= 0");
  }
  for (const auto& [stage, u] : s.energy.synthetic_costs) {
    if (!nonneg(u.compute_seconds) || !nonneg(u.transferred_mb)) {
      add("energy.stage_costs." + stage, "usage must be >= 0");
    }
  }
  if (s.calibration) {
    for (const auto& [el, r] : s.calibration->recovery) {
      if (!unit_interval(r)) add("calibration.recovery." + el, "must lie in [0, 1]");
    }
    if (s.calibration->process_energy_kwh && !nonneg(*s.calibration->process_energy_kwh)) {
      add("calibration.process_energy_kwh", "must be >= 0");
    }
    if (s.calibration->co2_kg && !nonneg(*s.calibration->co2_kg)) {
      add("calibration.co2_kg", "must be >= 0");
    }
  }
  if (s.feedback.horizon < 0 || s.feedback.extra_episodes < 0) {
    add("feedback", "horizon and extra_episodes must be >= 0");
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON reading

namespace {

std::map<std::string, double> read_number_map(const Json& j, const std::string& path) {
  if (!j.is_object()) throw_field_error(path, "expected an object of numbers");
  std::map<std::string, double> out;
  for (const auto& [k, v] : j.items()) out[k] = as_number(v, path + "." + k);
  return out;
}

template <typename F>
void for_each_element(const Json& arr, const std::string& path, F&& f) {
  for (size_t i = 0; i < arr.size(); ++i) f(arr[i], fmt::format("{}[{}]", path, i));
}

CollectionGraph read_graph(ObjectReader r) {
  CollectionGraph g;
  g.service_threshold = r.number_or("service_threshold", 0.0);
  for_each_element(r.array("nodes"), r.field("nodes"), [&](const Json& j, const std::string& p) {
    ObjectReader n(j, p);
    const int64_t id = n.integer("id");
    if (id < 0 || id > UINT32_MAX) throw_field_error(n.field("id"), "node id out of range");
    g.nodes.push_back({static_cast<NodeId>(id), n.number_or("fill_level", 0.0),
                       n.boolean_or("is_depot", false)});
    n.finish();
  });
  for_each_element(r.array("edges"), r.field("edges"), [&](const Json& j, const std::string& p) {
    ObjectReader e(j, p);
    const auto a = static_cast<NodeId>(e.integer("from"));
    const auto b = static_cast<NodeId>(e.integer("to"));
    EdgeAttrs attrs{e.number("distance_km"), e.number("emission_rate_kg_per_km")};
    if (!g.edges.emplace(std::pair{a, b}, attrs).second) {
      throw_field_error(p, fmt::format("duplicate edge {} -> {}", a, b));
    }
    e.finish();
  });
  r.finish();
  return g;
}

FacilityModel read_facility(ObjectReader r) {
  FacilityModel f;
  f.throughput_kg_per_step = r.number("throughput_kg_per_step");
  f.composition_jitter = r.number_or("composition_jitter", 0.0);
  for_each_element(r.array("stations"), r.field("stations"), [&](const Json& j, const std::string& p) {
    ObjectReader s(j, p);
    Station st;
    st.id = s.string("id");
    st.recovery_efficiency = read_number_map(s.at("recovery_efficiency"), s.field("recovery_efficiency"));
    st.energy_kwh_per_kg = s.number_or("energy_kwh_per_kg", 0.0);
    st.loss_fraction = s.number_or("loss_fraction", 0.0);
    s.finish();
    f.stations.push_back(std::move(st));
  });
  r.finish();
  return f;
}

std::array<double, kFeatureCount> read_feature_array(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != kFeatureCount) {
    throw_field_error(path, fmt::format("expected {} numbers", kFeatureCount));
  }
  std::array<double, kFeatureCount> out{};
  for (size_t i = 0; i < kFeatureCount; ++i) out[i] = as_number(j[i], fmt::format("{}[{}]", path, i));
  return out;
}

SensorConfig read_sensors(ObjectReader r) {
  SensorConfig s;
  s.horizon = r.integer_or("horizon", 0);
  s.deposit_probability = r.number_or("deposit_probability", s.deposit_probability);
  if (r.has("fill_increment")) {
    const Json& inc = r.array("fill_increment");
    if (inc.size() != 2) throw_field_error(r.field("fill_increment"), "expected [min, max]");
    s.fill_increment_min = as_number(inc[0], r.field("fill_increment") + "[0]");
    s.fill_increment_max = as_number(inc[1], r.field("fill_increment") + "[1]");
  }
  s.train_fraction = r.number_or("train_fraction", s.train_fraction);
  for_each_element(r.array("categories"), r.field("categories"), [&](const Json& j, const std::string& p) {
    ObjectReader c(j, p);
    CategoryProfile cat;
    cat.label = c.string("label");
    cat.share = c.number("share");
    cat.mean = read_feature_array(c.at("mean"), c.field("mean"));
    cat.stddev = read_feature_array(c.at("stddev"), c.field("stddev"));
    c.finish();
    s.categories.push_back(std::move(cat));
  });
  r.finish();
  return s;
}

ScenarioSpec read_scenario(const Json& doc) {
  ObjectReader r(doc, "");
  ScenarioSpec s;
  s.name = r.string_or("name", "");
  if (r.has("family")) s.family = parse_enum(kFamilies, r.string("family"), "family");
  s.notes = r.string_or("notes", "");
  s.rng_seed = r.unsigned_integer("rng_seed");

  if (r.has("materials")) {
    for_each_element(r.array("materials"), "materials", [&](const Json& j, const std::string& p) {
      ObjectReader m(j, p);
      MaterialSpec mat;
      mat.id = m.string("id");
      mat.name = m.string_or("name", mat.id);
      mat.category = parse_enum(kCategories, m.string("category"), m.field("category"));
      mat.mass_kg = m.number("mass_kg");
      if (m.has("composition")) mat.composition = read_number_map(m.at("composition"), m.field("composition"));
      if (m.has("lifecycle_stage")) {
        mat.lifecycle_stage =
            parse_enum(kStages, m.string("lifecycle_stage"), m.field("lifecycle_stage"));
      }
      m.finish();
      s.materials.push_back(std::move(mat));
    });
  }
  if (r.has("processes")) {
    for_each_element(r.array("processes"), "processes", [&](const Json& j, const std::string& p) {
      ObjectReader o(j, p);
      ProcessSpec proc;
      proc.id = o.string("id");
      proc.unit_cost = o.number("unit_cost");
      proc.energy_per_unit = o.number_or("energy_per_unit", 0.0);
      proc.emission_factor_id = o.string("emission_factor_id");
      o.finish();
      s.processes.push_back(std::move(proc));
    });
  }
  if (r.has("limits")) {
    for_each_element(r.array("limits"), "limits", [&](const Json& j, const std::string& p) {
      ObjectReader o(j, p);
      ResourceLimit lim;
      lim.resource_id = o.string("resource_id");
      lim.availability = o.number("availability");
      lim.consumption = read_number_map(o.at("consumption"), o.field("consumption"));
      o.finish();
      s.limits.push_back(std::move(lim));
    });
  }
  if (r.has("emission_factors")) {
    for_each_element(r.array("emission_factors"), "emission_factors",
                     [&](const Json& j, const std::string& p) {
                       ObjectReader o(j, p);
                       EmissionFactor f;
                       f.id = o.string("id");
                       f.process_id = o.string("process_id");
                       f.e = o.number("e");
                       const auto stage = o.string("stage");
                       auto parsed = parse_lifecycle_stage(stage);
                       if (!parsed) {
                         throw_field_error(o.field("stage"),
                                           fmt::format("unknown lifecycle stage '{}'", stage));
                       }
                       f.stage = *parsed;
                       o.finish();
                       s.emission_factors.push_back(std::move(f));
                     });
  }
  if (r.has("targets")) s.targets = read_number_map(r.at("targets"), "targets");
  if (r.has("integrality")) {
    for_each_element(r.array("integrality"), "integrality", [&](const Json& j, const std::string& p) {
      s.integrality.insert(as_string(j, p));
    });
  }
  if (r.has("collection_graph") && !r.at("collection_graph").is_null()) {
    s.collection_graph = read_graph(r.object("collection_graph"));
  }
  if (r.has("facility")) s.facility = read_facility(r.object("facility"));
  if (r.has("sensors")) s.sensors = read_sensors(r.object("sensors"));
  if (r.has("routing")) {
    auto o = r.object("routing");
    auto& c = s.routing;
    c.learning_rate = o.number_or("learning_rate", c.learning_rate);
    c.discount = o.number_or("discount", c.discount);
    c.epsilon_start = o.number_or("epsilon_start", c.epsilon_start);
    c.epsilon_end = o.number_or("epsilon_end", c.epsilon_end);
    c.episodes = o.integer_or("episodes", c.episodes);
    c.rng_seed = o.unsigned_or("rng_seed", c.rng_seed);
    c.reward_scale = o.number_or("reward_scale", c.reward_scale);
    const int64_t max_bins = o.integer_or("max_district_bins", static_cast<int64_t>(s.max_district_bins));
    if (max_bins < 0) throw_field_error(o.field("max_district_bins"), "must be nonnegative");
    s.max_district_bins = static_cast<size_t>(max_bins);
    o.finish();
  }
  if (r.has("classifier")) {
    auto o = r.object("classifier");
    auto& c = s.classifier;
    c.learning_rate = o.number_or("learning_rate", c.learning_rate);
    c.epochs = o.integer_or("epochs", c.epochs);
    c.l2_penalty = o.number_or("l2_penalty", c.l2_penalty);
    c.rng_seed = o.unsigned_or("rng_seed", c.rng_seed);
    c.init_scale = o.number_or("init_scale", c.init_scale);
    o.finish();
  }
  if (r.has("energy")) {
    auto o = r.object("energy");
    s.energy.model.alpha = o.number_or("alpha", 0.0);
    s.energy.model.beta = o.number_or("beta", 0.0);
    if (o.has("stage_costs")) {
      auto costs = o.object("stage_costs");
      for (const auto& [stage, v] : o.at("stage_costs").items()) {
        auto u = costs.object(stage);
        s.energy.synthetic_costs[stage] =
            StageUsage{stage, u.number_or("compute_seconds", 0.0), u.number_or("transferred_mb", 0.0)};
        u.finish();
      }
      costs.finish();
    }
    o.finish();
  }
  if (r.has("expectations")) {
    auto o = r.object("expectations");
    for (const auto& [metric, v] : r.at("expectations").items()) {
      auto e = o.object(metric);
      Expectation ex;
      const auto form = e.string("form");
      if (form == "points") {
        ex.form = Expectation::Form::kPoints;
      } else if (form == "relative") {
        ex.form = Expectation::Form::kRelative;
      } else {
        throw_field_error(e.field("form"), "expected 'points' or 'relative'");
      }
      ex.value = e.number("value");
      e.finish();
      s.expectations[metric] = ex;
    }
    o.finish();
  }
  if (r.has("calibration")) {
    auto o = r.object("calibration");
    CalibrationTargets t;
    if (o.has("recovery")) t.recovery = read_number_map(o.at("recovery"), o.field("recovery"));
    if (o.has("process_energy_kwh")) t.process_energy_kwh = o.number("process_energy_kwh");
    if (o.has("co2_kg")) t.co2_kg = o.number("co2_kg");
    o.finish();
    s.calibration = std::move(t);
  }
  if (r.has("feedback")) {
    auto o = r.object("feedback");
    s.feedback.horizon = o.integer_or("horizon", 0);
    s.feedback.extra_episodes = o.integer_or("extra_episodes", 0);
    o.finish();
  }
  r.finish();
  return s;
}

}  // namespace

namespace {

ScenarioSpec read_unchecked(std::string_view text, std::string_view source) {
  try {
    return read_scenario(parse_json(text, source));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kParse) throw;
    const std::string msg = e.what();
    // parse_json already prefixes the source.
    if (msg.rfind(std::string(source), 0) == 0) throw;
    throw Error(ErrorCode::kParse, fmt::format("{}: {}", source, msg));
  }
}

}  // namespace

ScenarioSpec parse_scenario(std::string_view text, std::string_view source) {
  ScenarioSpec s = read_unchecked(text, source);
  const auto problems = validate_scenario(s);
  if (!problems.empty()) {
    std::string more = problems.size() > 1 ? fmt::format(" (+{} more)", problems.size() - 1) : "";
    throw Error(ErrorCode::kValidation, fmt::format("{}: {}: {}{}", source, problems.front().path,
                                                    problems.front().message, more));
  }
  return s;
}

std::vector<Diagnostic> lint_scenario(std::string_view text, std::string_view source) {
  return validate_scenario(read_unchecked(text, source));
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kIo, fmt::format("scenario file '{}' does not exist", path.string()));
  }
  return parse_scenario(read_text_file(path), path.string());
}

// ---------------------------------------------------------------------------
// JSON writing

namespace {

Json features_json(const std::array<double, kFeatureCount>& a) {
  return Json(std::vector<double>(a.begin(), a.end()));
}

}  // namespace

std::string scenario_to_json(const ScenarioSpec& s) {
  Json j;
  j["name"] = s.name;
  j["family"] = scenario_family_name(s.family);
  if (!s.notes.empty()) j["notes"] = s.notes;
  j["rng_seed"] = s.rng_seed;

  j["materials"] = Json::array();
  for (const auto& m : s.materials) {
    j["materials"].push_back({{"id", m.id},
                              {"name", m.name},
                              {"category", material_category_name(m.category)},
                              {"mass_kg", m.mass_kg},
                              {"composition", m.composition},
                              {"lifecycle_stage", material_stage_name(m.lifecycle_stage)}});
  }
  j["processes"] = Json::array();
  for (const auto& p : s.processes) {
    j["processes"].push_back({{"id", p.id},
                              {"unit_cost", p.unit_cost},
                              {"energy_per_unit", p.energy_per_unit},
                              {"emission_factor_id", p.emission_factor_id}});
  }
  j["limits"] = Json::array();
  for (const auto& l : s.limits) {
    j["limits"].push_back(
        {{"resource_id", l.resource_id}, {"availability", l.availability}, {"consumption", l.consumption}});
  }
  j["emission_factors"] = Json::array();
  for (const auto& f : s.emission_factors) {
    j["emission_factors"].push_back({{"id", f.id},
                                     {"process_id", f.process_id},
                                     {"e", f.e},
                                     {"stage", lifecycle_stage_name(f.stage)}});
  }
  j["targets"] = s.targets;
  j["integrality"] = Json(std::vector<std::string>(s.integrality.begin(), s.integrality.end()));

  if (s.collection_graph) {
    const auto& g = *s.collection_graph;
    Json nodes = Json::array();
    for (const auto& n : g.nodes) {
      nodes.push_back({{"id", n.id}, {"fill_level", n.fill_level}, {"is_depot", n.is_depot}});
    }
    Json edges = Json::array();
    for (const auto& [key, e] : g.edges) {
      edges.push_back({{"from", key.first},
                       {"to", key.second},
                       {"distance_km", e.distance_km},
                       {"emission_rate_kg_per_km", e.emission_rate_kg_per_km}});
    }
    j["collection_graph"] = {{"service_threshold", g.service_threshold}, {"nodes", nodes}, {"edges", edges}};
  }
  if (s.facility) {
    Json stations = Json::array();
    for (const auto& st : s.facility->stations) {
      stations.push_back({{"id", st.id},
                          {"recovery_efficiency", st.recovery_efficiency},
                          {"energy_kwh_per_kg", st.energy_kwh_per_kg},
                          {"loss_fraction", st.loss_fraction}});
    }
    j["facility"] = {{"throughput_kg_per_step", s.facility->throughput_kg_per_step},
                     {"composition_jitter", s.facility->composition_jitter},
                     {"stations", stations}};
  }
  if (s.sensors) {
    Json cats = Json::array();
    for (const auto& c : s.sensors->categories) {
      cats.push_back({{"label", c.label},
                      {"share", c.share},
                      {"mean", features_json(c.mean)},
                      {"stddev", features_json(c.stddev)}});
    }
    j["sensors"] = {{"horizon", s.sensors->horizon},
                    {"deposit_probability", s.sensors->deposit_probability},
                    {"fill_increment", {s.sensors->fill_increment_min, s.sensors->fill_increment_max}},
                    {"train_fraction", s.sensors->train_fraction},
                    {"categories", cats}};
  }
  j["routing"] = {{"learning_rate", s.routing.learning_rate},
                  {"discount", s.routing.discount},
                  {"epsilon_start", s.routing.epsilon_start},
                  {"epsilon_end", s.routing.epsilon_end},
                  {"episodes", s.routing.episodes},
                  {"rng_seed", s.routing.rng_seed},
                  {"reward_scale", s.routing.reward_scale},
                  {"max_district_bins", s.max_district_bins}};
  j["classifier"] = {{"learning_rate", s.classifier.learning_rate},
                     {"epochs", s.classifier.epochs},
                     {"l2_penalty", s.classifier.l2_penalty},
                     {"rng_seed", s.classifier.rng_seed},
                     {"init_scale", s.classifier.init_scale}};
  Json costs = Json::object();
  for (const auto& [stage, u] : s.energy.synthetic_costs) {
    costs[stage] = {{"compute_seconds", u.compute_seconds}, {"transferred_mb", u.transferred_mb}};
  }
  j["energy"] = {{"alpha", s.energy.model.alpha}, {"beta", s.energy.model.beta}, {"stage_costs", costs}};
  if (!s.expectations.empty()) {
    Json ex = Json::object();
    for (const auto& [metric, e] : s.expectations) {
      ex[metric] = {{"form", e.form == Expectation::Form::kPoints ? "points" : "relative"},
                    {"value", e.value}};
    }
    j["expectations"] = ex;
  }
  if (s.calibration) {
    Json c = {{"recovery", s.calibration->recovery}};
    if (s.calibration->process_energy_kwh) c["process_energy_kwh"] = *s.calibration->process_energy_kwh;
    if (s.calibration->co2_kg) c["co2_kg"] = *s.calibration->co2_kg;
    j["calibration"] = c;
  }
  j["feedback"] = {{"horizon", s.feedback.horizon}, {"extra_episodes", s.feedback.extra_episodes}};
  return dump_json(j);
}

void save_scenario(const ScenarioSpec& s, const std::filesystem::path& path) {
  write_text_file(path, scenario_to_json(s));
}

// ---------------------------------------------------------------------------
// compilation

LinearProgram compile_to_lp(const ScenarioSpec& s) {
  std::map<std::string, size_t> column;
  std::vector<double> costs;
  for (const auto& p : s.processes) {
    column.emplace(p.id, costs.size());
    costs.push_back(p.unit_cost);
  }
  auto lp = LinearProgram::with_objective(costs);
  const size_t n = costs.size();

  for (const auto& lim : s.limits) {
    std::vector<double> row(n, 0.0);
    for (const auto& [pid, a] : lim.consumption) {
      auto it = column.find(pid);
      if (it == column.end()) {
        throw Error(ErrorCode::kCompile,
                    fmt::format("limit '{}' references unknown process '{}'", lim.resource_id, pid));
      }
      row[it->second] = a;
    }
    lp.add_row(std::move(row), lim.availability);
  }

  if (auto cap = s.targets.find("co2_cap_kg"); cap != s.targets.end()) {
    std::map<std::string, double> e_by_factor;
    for (const auto& f : s.emission_factors) e_by_factor[f.id] = f.e;
    std::vector<double> row(n, 0.0);
    for (size_t j = 0; j < n; ++j) {
      auto it = e_by_factor.find(s.processes[j].emission_factor_id);
      if (it == e_by_factor.end()) {
        throw Error(ErrorCode::kCompile, fmt::format("process '{}' has no emission factor",
                                                     s.processes[j].id));
      }
      row[j] = it->second;
    }
    lp.add_row(std::move(row), cap->second);
  }

  for (const auto& pid : s.integrality) {
    auto it = column.find(pid);
    if (it == column.end()) {
      throw Error(ErrorCode::kCompile, fmt::format("integrality names unknown process '{}'", pid));
    }
    const size_t j = it->second;
    double bound = kInfinity;
    for (const auto& row : lp.rows) {
      if (row.coefficients[j] > 0.0) bound = std::min(bound, row.rhs / row.coefficients[j]);
    }
    if (!std::isfinite(bound)) {
      throw Error(ErrorCode::kCompile,
                  fmt::format("integral process '{}' is not bounded by any limit", pid));
    }
    lp.integer_mask[j] = true;
    lp.upper_bounds[j] = std::floor(bound + 1e-9);
  }
  return lp;
}

}  // namespace greenloop
