// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "greenloop/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "greenloop/display.hpp"
#include "greenloop/error.hpp"
#include "greenloop/rng.hpp"

namespace greenloop {

std::string_view run_mode_name(RunMode m) {
  return m == RunMode::kBaseline ? "baseline" : "framework";
}

std::optional<RunMode> parse_run_mode(std::string_view text) {
  if (text == "baseline") return RunMode::kBaseline;
  if (text == "framework") return RunMode::kFramework;
  return std::nullopt;
}

std::string_view direction_name(Direction d) {
  switch (d) {
    case Direction::kImproved: return "improved";
    case Direction::kWorsened: return "worsened";
    case Direction::kUnchanged: return "unchanged";
  }
  return "unchanged";
}

namespace {

// Seed sub-streams.
constexpr uint64_t kSplitStream = 3;
constexpr uint64_t kRouteStream = 4;
constexpr uint64_t kFeedbackStream = 5;

constexpr std::string_view kRouteProcess = "collection_routes";

std::vector<LabeledSample> featurize_events(const std::vector<BinEvent>& events,
                                            const NormStats& stats) {
  std::vector<LabeledSample> out;
  out.reserve(events.size());
  for (const auto& ev : events) out.push_back({featurize(ev.record, stats), ev.true_label});
  return out;
}

NormStats stats_of(const std::vector<BinEvent>& events) {
  std::vector<SensorRecord> recs;
  recs.reserve(events.size());
  for (const auto& ev : events) recs.push_back(ev.record);
  return compute_norm_stats(recs);
}

void split_events(const std::vector<BinEvent>& events, double train_fraction, uint64_t seed,
                  std::vector<BinEvent>& train, std::vector<BinEvent>& heldout) {
  std::vector<size_t> order(events.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
  const auto n_train = static_cast<size_t>(std::llround(train_fraction * static_cast<double>(events.size())));
  for (size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? train : heldout).push_back(events[order[i]]);
  }
}

SoftmaxModel fit_softmax(const std::vector<BinEvent>& train, const TrainConfig& cfg) {
  const auto stats = stats_of(train);
  auto model = train_classifier(featurize_events(train, stats), cfg);
  model.norm_stats = stats;
  return model;
}

double softmax_accuracy(const SoftmaxModel& m, const std::vector<BinEvent>& events) {
  return evaluate_accuracy(m, featurize_events(events, m.norm_stats));
}

RLConfig district_config(const ScenarioSpec& s, size_t district, uint64_t round) {
  RLConfig cfg = s.routing;
  cfg.rng_seed = derive_seed(derive_seed(derive_seed(s.rng_seed, kRouteStream), s.routing.rng_seed),
                             round * 1000 + district);
  return cfg;
}

void require_components(const ScenarioSpec& s) {
  if (s.family == ScenarioFamily::kBattery && !s.facility) {
    throw Error(ErrorCode::kModeUnsupported,
                fmt::format("battery scenario '{}' needs a facility", s.name));
  }
  if (s.family == ScenarioFamily::kWaste && (!s.collection_graph || !s.sensors)) {
    throw Error(ErrorCode::kModeUnsupported,
                fmt::format("waste scenario '{}' needs collection_graph and sensors", s.name));
  }
}

}  // namespace

AllocationResult greedy_allocation(const ScenarioSpec& s) {
  AllocationResult out;
  const auto lp = compile_to_lp(s);  // reuses the limit rows and the CO2 cap
  std::vector<double> remaining;
  for (const auto& row : lp.rows) remaining.push_back(row.rhs);
  for (size_t j = 0; j < s.processes.size(); ++j) {
    out.process_ids.push_back(s.processes[j].id);
    double amount = 0.0;
    if (s.processes[j].unit_cost < 0.0) {
      double room = std::numeric_limits<double>::infinity();
      for (size_t i = 0; i < lp.rows.size(); ++i) {
        const double a = lp.rows[i].coefficients[j];
        if (a > 0.0) room = std::min(room, std::max(0.0, remaining[i]) / a);
      }
      if (std::isfinite(room)) amount = s.integrality.contains(s.processes[j].id) ? std::floor(room + 1e-9) : room;
    }
    for (size_t i = 0; i < lp.rows.size(); ++i) remaining[i] -= lp.rows[i].coefficients[j] * amount;
    out.values.push_back(amount);
    out.objective += s.processes[j].unit_cost * amount;
  }
  return out;
}

std::vector<CollectionGraph> partition_districts(const CollectionGraph& g, size_t max_bins) {
  if (max_bins < 1) throw Error(ErrorCode::kValidation, "max_bins must be at least 1");
  std::vector<NodeId> bins;
  for (const auto& n : g.nodes) {
    if (!n.is_depot) bins.push_back(n.id);
  }
  if (bins.empty()) return {};
  if (bins.size() <= max_bins) return {g};

  const NodeId depot = g.depot();
  std::set<NodeId> unassigned(bins.begin(), bins.end());
  auto nearest = [&](NodeId from) -> std::optional<NodeId> {
    std::optional<NodeId> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (NodeId b : unassigned) {  // ascending, so ties keep the lowest id
      auto e = g.edge(from, b);
      if (e && e->distance_km < best_d) {
        best_d = e->distance_km;
        best = b;
      }
    }
    return best;
  };

  std::vector<CollectionGraph> out;
  while (!unassigned.empty()) {
    std::set<NodeId> members;
    NodeId here = depot;
    while (members.size() < max_bins && !unassigned.empty()) {
      auto next = nearest(here);
      if (!next) next = nearest(depot);
      if (!next) next = *unassigned.begin();
      members.insert(*next);
      unassigned.erase(*next);
      here = *next;
    }
    CollectionGraph d;
    d.service_threshold = g.service_threshold;
    for (const auto& n : g.nodes) {
      if (n.id == depot || members.contains(n.id)) d.nodes.push_back(n);
    }
    for (const auto& [key, attrs] : g.edges) {
      const bool a_in = key.first == depot || members.contains(key.first);
      const bool b_in = key.second == depot || members.contains(key.second);
      if (a_in && b_in) d.edges.emplace(key, attrs);
    }
    out.push_back(std::move(d));
  }
  return out;
}

RunOutcome run_pipeline(const ScenarioSpec& input, RunMode mode, std::optional<uint64_t> seed_override) {
  ScenarioSpec s = input;
  if (seed_override) s.rng_seed = *seed_override;
  require_components(s);

  RunOutcome out;
  RunResult& r = out.result;
  RunArtifacts& a = out.artifacts;
  r.mode = mode;
  r.scenario_name = s.name;
  r.family = s.family;
  r.seed = s.rng_seed;
  r.expectations = s.expectations;
  const bool framework = mode == RunMode::kFramework;

  // Each stage returns an estimate of the megabytes it moved; synthetic costs
  // from the scenario replace both measurements when present.
  auto metered = [&](std::string_view name, auto&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    double mb = 0.0;
    try {
      mb = body();
    } catch (const Error& e) {
      throw e.with_context(fmt::format("stage '{}'", name));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.timings[std::string(name)] = secs;
    StageUsage usage{std::string(name), secs, mb};
    if (auto it = s.energy.synthetic_costs.find(std::string(name)); it != s.energy.synthetic_costs.end()) {
      usage = it->second;
      usage.stage_name = std::string(name);
    }
    r.pipeline_energy = record_stage(r.pipeline_energy, s.energy.model, usage);
  };
  constexpr double kRecordMb = kFeatureCount * 8.0 / 1e6;

  metered("preprocess", [&] {
    if (!s.collection_graph || !s.sensors) return 0.0;
    a.bin_events = simulate_bins(s, s.sensors->horizon);
    split_events(a.bin_events->events, s.sensors->train_fraction, derive_seed(s.rng_seed, kSplitStream),
                 a.train_events, a.heldout_events);
    std::set<std::string> labels;
    for (const auto& ev : a.train_events) labels.insert(ev.true_label);
    if (labels.size() >= 2) {
      if (framework) {
        a.classifier = fit_softmax(a.train_events, s.classifier);
        if (!a.heldout_events.empty()) r.classification_accuracy = softmax_accuracy(*a.classifier, a.heldout_events);
      } else {
        const auto stats = stats_of(a.train_events);
        a.rule_classifier = fit_threshold_classifier(featurize_events(a.train_events, stats), 0);
        if (!a.heldout_events.empty()) {
          r.classification_accuracy =
              evaluate_accuracy(*a.rule_classifier, featurize_events(a.heldout_events, stats));
        }
      }
    }
    return static_cast<double>(a.bin_events->events.size()) * kRecordMb;
  });

  metered("simulate", [&] {
    if (!s.facility) return 0.0;
    a.trace = simulate_recycling(s, *s.facility);
    for (const auto& [el, rate] : recovery_rates(*a.trace, s)) {
      if (el != kRemainderElement) r.recovery[el] = rate;
    }
    r.input_kg = a.trace->input_kg;
    r.process_energy_kwh = a.trace->energy_kwh;
    r.waste_reduction_fraction = waste_reduction_fraction(*a.trace);
    return static_cast<double>(a.trace->steps.size()) * 64.0 / 1e6;
  });

  metered("optimize", [&] {
    if (s.processes.empty()) return 0.0;
    if (framework) {
      const auto lp = compile_to_lp(s);
      const auto sol = solve_milp(lp);
      a.allocation.optimized = true;
      a.allocation.status = sol.status;
      for (const auto& p : s.processes) a.allocation.process_ids.push_back(p.id);
      a.allocation.values = sol.values;
      a.allocation.objective = sol.objective_value;
      if (sol.status == SolveStatus::kOptimal) r.allocation_objective = sol.objective_value;
    } else {
      a.allocation = greedy_allocation(s);
      r.allocation_objective = a.allocation.objective;
    }
    return static_cast<double>(s.processes.size() * (s.limits.size() + 1)) * 8.0 / 1e6;
  });

  metered("route", [&] {
    if (!s.collection_graph) return 0.0;
    const auto g = a.bin_events ? with_fill_levels(*s.collection_graph, *a.bin_events) : *s.collection_graph;
    a.districts = partition_districts(g, s.max_district_bins);
    double total = 0.0;
    for (size_t d = 0; d < a.districts.size(); ++d) {
      const auto& district = a.districts[d];
      Route route;
      if (framework) {
        a.qtables.push_back(train_routing(district, district_config(s, d, 0)));
        route = greedy_route(a.qtables.back(), district);
      } else {
        route = naive_route(district);
      }
      total += route_emissions(district, route);
      a.routes.push_back(std::move(route));
    }
    r.transport_emissions_kg = total;
    return static_cast<double>(g.edges.size()) * 24.0 / 1e6;
  });

  metered("carbon", [&] {
    const ActivityLedger ledger = a.trace ? a.trace->activity_ledger : ActivityLedger{};
    a.carbon = carbon_footprint(s.emission_factors, ledger);
    if (r.transport_emissions_kg) {
      const std::string key(kRouteProcess);
      a.carbon.by_process[key] = *r.transport_emissions_kg;
      a.carbon.process_stage[key] = LifecycleStage::kTransport;
      a.carbon.by_stage[LifecycleStage::kTransport] += *r.transport_emissions_kg;
      a.carbon.total_kg += *r.transport_emissions_kg;
    }
    r.co2_by_stage = aggregate_by_stage(a.carbon);
    r.co2_kg = a.carbon.total_kg;
    return static_cast<double>(ledger.entries.size()) * 16.0 / 1e6;
  });

  metered("metrics", [&] {
    auto bad = [](double v) { return !(v >= 0.0) || !std::isfinite(v); };
    for (const auto& [el, rate] : r.recovery) {
      if (bad(rate) || rate > 1.0) throw Error(ErrorCode::kValidation, fmt::format("recovery of {} is {}", el, rate));
    }
    if (bad(r.process_energy_kwh) || bad(r.co2_kg) || bad(r.waste_reduction_fraction)) {
      throw Error(ErrorCode::kValidation, "negative or non-finite totals");
    }
    return 0.0;
  });
  return out;
}

RunResult run(const ScenarioSpec& s, RunMode mode, std::optional<uint64_t> seed_override) {
  return run_pipeline(s, mode, seed_override).result;
}

// ---------------------------------------------------------------------------
// comparison

const MetricComparison* ImprovementReport::find(std::string_view key) const {
  for (const auto& m : metrics) {
    if (m.key == key) return &m;
  }
  return nullptr;
}

namespace {

std::string capitalized(const std::string& s) {
  std::string out = s;
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

MetricComparison make_row(std::string key, std::string label, double b, double f, bool percentage,
                          bool lower_is_better) {
  MetricComparison m;
  m.key = std::move(key);
  m.label = std::move(label);
  m.baseline = b;
  m.framework = f;
  m.percentage = percentage;
  m.lower_is_better = lower_is_better;
  const double d = f - b;
  if (percentage) m.delta_pp = d * 100.0;
  if (b != 0.0) m.delta_relative = d / std::abs(b) * 100.0;
  if (std::abs(d) <= 1e-12 * std::max(1.0, std::abs(b))) {
    m.direction = Direction::kUnchanged;
    if (m.delta_pp) m.delta_pp = 0.0;
    if (m.delta_relative) m.delta_relative = 0.0;
  } else {
    m.direction = (d < 0.0) == lower_is_better ? Direction::kImproved : Direction::kWorsened;
  }
  return m;
}

double mean_of(const std::map<std::string, double>& m) {
  double sum = 0.0;
  for (const auto& [k, v] : m) sum += v;
  return sum / static_cast<double>(m.size());
}

}  // namespace

ImprovementReport compare_runs(const RunResult& b, const RunResult& f) {
  if (b.mode != RunMode::kBaseline || f.mode != RunMode::kFramework) {
    throw Error(ErrorCode::kModeMismatch,
                fmt::format("compare needs a baseline and a framework run, got {} and {}",
                            run_mode_name(b.mode), run_mode_name(f.mode)));
  }
  if (b.family != f.family) {
    throw Error(ErrorCode::kModeMismatch,
                fmt::format("scenario families differ: {} vs {}", scenario_family_name(b.family),
                            scenario_family_name(f.family)));
  }
  ImprovementReport rep;
  rep.family = b.family;
  auto& rows = rep.metrics;

  // Headline elements first, then everything else both runs carry.
  for (const char* el : {"cobalt", "nickel", "lithium"}) {
    if (b.recovery.contains(el) && f.recovery.contains(el)) {
      rows.push_back(make_row(fmt::format("recovery.{}", el), capitalized(el) + " Recovery Rate (%)",
                              b.recovery.at(el), f.recovery.at(el), true, false));
    }
  }
  for (const auto& [el, rate] : b.recovery) {
    if (el == "cobalt" || el == "nickel" || el == "lithium" || !f.recovery.contains(el)) continue;
    rows.push_back(make_row("recovery." + el, capitalized(el) + " Recovery Rate (%)", rate,
                            f.recovery.at(el), true, false));
  }
  const bool has_facility = !b.recovery.empty() && !f.recovery.empty();
  if (has_facility) {
    rows.push_back(make_row("process_energy_kwh", "Energy Consumption (kWh)", b.process_energy_kwh,
                            f.process_energy_kwh, false, true));
  }
  if (b.classification_accuracy && f.classification_accuracy) {
    rows.push_back(make_row("classification_accuracy", "Waste Classification Accuracy (%)",
                            *b.classification_accuracy, *f.classification_accuracy, true, false));
  }
  if (b.transport_emissions_kg && f.transport_emissions_kg) {
    // Indexed to the baseline, as a share of its emissions.
    if (*b.transport_emissions_kg > 0.0) {
      rows.push_back(make_row("transport_emissions", "Transportation Emissions (%)", 1.0,
                              *f.transport_emissions_kg / *b.transport_emissions_kg, true, true));
    }
    rows.push_back(make_row("transport_emissions_kg", "Transportation Emissions (kg CO2)",
                            *b.transport_emissions_kg, *f.transport_emissions_kg, false, true));
  }
  rows.push_back(make_row("co2_kg", "CO2 Emissions (tons)", b.co2_kg, f.co2_kg, false, true));
  if (has_facility) {
    rows.push_back(make_row("recovery.mean", "Average Recovery Rate (%)", mean_of(b.recovery),
                            mean_of(f.recovery), true, false));
    rows.push_back(make_row("waste_reduction", "Waste Reduction (%)", b.waste_reduction_fraction,
                            f.waste_reduction_fraction, true, false));
  }
  rows.push_back(make_row("pipeline_energy_wh", "Pipeline Compute Energy (Wh)",
                          b.pipeline_energy.total_kwh * 1000.0, f.pipeline_energy.total_kwh * 1000.0, false,
                          true));

  std::map<std::string, Expectation> expectations = b.expectations;
  for (const auto& [k, v] : f.expectations) expectations[k] = v;
  for (const auto& m : rows) {
    auto it = expectations.find(m.key);
    if (it == expectations.end()) continue;
    const bool points = it->second.form == Expectation::Form::kPoints;
    const auto computed = points ? m.delta_pp : m.delta_relative;
    const char* unit = points ? " pp" : "%";
    if (!computed) {
      rep.annotations.push_back(fmt::format("{}: published figure {}{} has no computable counterpart",
                                            m.label, format_signed(it->second.value), unit));
      continue;
    }
    if (std::abs(*computed - it->second.value) > 1.0) {
      rep.annotations.push_back(fmt::format(
          "{}: computed {} delta {}{} differs from the published figure {}{}", m.label,
          points ? "percentage-point" : "relative", format_signed(*computed), unit,
          format_signed(it->second.value), unit));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// feedback

FeedbackResult feedback_update(const ScenarioSpec& s, const RunArtifacts& prior) {
  if (!prior.classifier && prior.qtables.empty()) {
    throw Error(ErrorCode::kMissingArtifacts, "prior run has neither a classifier nor Q-tables");
  }
  if (prior.qtables.size() != prior.districts.size()) {
    throw Error(ErrorCode::kMissingArtifacts, "Q-tables do not match the stored districts");
  }
  FeedbackResult out;
  out.artifacts = prior;
  RunArtifacts& a = out.artifacts;
  a.version = prior.version + 1;
  const auto round = static_cast<uint64_t>(a.version);

  if (prior.classifier) {
    if (prior.train_events.empty() || prior.heldout_events.empty()) {
      throw Error(ErrorCode::kMissingArtifacts, "classifier present but its training/held-out events are not");
    }
    out.accuracy_before = softmax_accuracy(*prior.classifier, prior.heldout_events);
    if (s.feedback.horizon > 0) {
      const auto fresh = simulate_bins(s, s.feedback.horizon,
                                       derive_seed(derive_seed(s.rng_seed, kFeedbackStream), round));
      a.train_events.insert(a.train_events.end(), fresh.events.begin(), fresh.events.end());
    }
    a.classifier = fit_softmax(a.train_events, s.classifier);
    out.accuracy_after = softmax_accuracy(*a.classifier, a.heldout_events);
    if (out.accuracy_after < out.accuracy_before) {
      out.diagnostics.push_back(fmt::format("held-out accuracy fell from {} to {} after update v{}",
                                            out.accuracy_before, out.accuracy_after, a.version));
    }
  }

  if (s.feedback.extra_episodes > 0) {
    for (size_t d = 0; d < a.districts.size(); ++d) {
      RLConfig cfg = district_config(s, d, round);
      cfg.episodes = s.feedback.extra_episodes;
      cfg.epsilon_start = cfg.epsilon_end;
      a.qtables[d] = train_routing(a.districts[d], cfg, &prior.qtables[d]);
      a.routes[d] = greedy_route(a.qtables[d], a.districts[d]);
    }
  }
  return out;
}

}  // namespace greenloop
