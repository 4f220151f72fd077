// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "greenloop/twin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "greenloop/error.hpp"
#include "greenloop/json_util.hpp"
#include "greenloop/rng.hpp"

namespace greenloop {

namespace {

// Sub-streams of the scenario seed.
constexpr uint64_t kRecyclingStream = 1;
constexpr uint64_t kBinStream = 2;

}  // namespace

std::vector<std::string> validate_facility(const FacilityModel& f) {
  std::vector<std::string> out;
  if (!(f.throughput_kg_per_step > 0.0) || !std::isfinite(f.throughput_kg_per_step)) {
    out.push_back("throughput_kg_per_step: must be > 0");
  }
  if (!(f.composition_jitter >= 0.0)) out.push_back("composition_jitter: must be >= 0");
  std::set<std::string> ids;
  for (size_t i = 0; i < f.stations.size(); ++i) {
    const auto& st = f.stations[i];
    const auto at = fmt::format("stations[{}]", i);
    if (!ids.insert(st.id).second) out.push_back(fmt::format("{}.id: duplicate '{}'", at, st.id));
    if (!(st.loss_fraction >= 0.0 && st.loss_fraction <= 1.0)) {
      out.push_back(fmt::format("{}.loss_fraction: outside [0, 1]", at));
    }
    if (!(st.energy_kwh_per_kg >= 0.0) || !std::isfinite(st.energy_kwh_per_kg)) {
      out.push_back(fmt::format("{}.energy_kwh_per_kg: must be >= 0", at));
    }
    for (const auto& [el, eff] : st.recovery_efficiency) {
      if (!(eff >= 0.0 && eff <= 1.0)) {
        out.push_back(fmt::format("{}.recovery_efficiency.{}: outside [0, 1]", at, el));
      } else if (eff + st.loss_fraction > 1.0 + 1e-12) {
        out.push_back(fmt::format("{}.recovery_efficiency.{}: recovery + loss exceeds 1", at, el));
      }
    }
  }
  return out;
}

std::vector<std::string> validate_sensors(const SensorConfig& s) {
  std::vector<std::string> out;
  if (s.horizon < 0) out.push_back("horizon: must be >= 0");
  if (!(s.deposit_probability >= 0.0 && s.deposit_probability <= 1.0)) {
    out.push_back("deposit_probability: outside [0, 1]");
  }
  if (!(s.fill_increment_min >= 0.0 && s.fill_increment_min <= s.fill_increment_max &&
        s.fill_increment_max <= 1.0)) {
    out.push_back("fill_increment: need 0 <= min <= max <= 1");
  }
  if (!(s.train_fraction > 0.0 && s.train_fraction < 1.0)) {
    out.push_back("train_fraction: must lie in (0, 1)");
  }
  std::set<std::string> labels;
  double share = 0.0;
  for (size_t i = 0; i < s.categories.size(); ++i) {
    const auto& c = s.categories[i];
    if (!labels.insert(c.label).second) {
      out.push_back(fmt::format("categories[{}].label: duplicate '{}'", i, c.label));
    }
    if (!(c.share >= 0.0)) out.push_back(fmt::format("categories[{}].share: must be >= 0", i));
    share += c.share;
    for (size_t f = 0; f < kFeatureCount; ++f) {
      if (!(c.stddev[f] > 0.0)) {
        out.push_back(fmt::format("categories[{}].stddev[{}]: must be > 0", i, f));
      }
    }
  }
  if (!s.categories.empty() && std::abs(share - 1.0) > 1e-9) {
    out.push_back(fmt::format("categories: shares sum to {}, expected 1", share));
  }
  return out;
}

// ---------------------------------------------------------------------------
// recycling line

namespace {

std::map<std::string, double> element_masses(const MaterialSpec& m, double jitter, Rng& rng) {
  std::map<std::string, double> frac;
  for (const auto& [el, f] : m.composition) {
    double v = f;
    if (jitter > 0.0) v *= std::max(0.0, 1.0 + jitter * rng.normal());
    frac[el] += v;
  }
  const double sum = std::accumulate(frac.begin(), frac.end(), 0.0,
                                     [](double acc, const auto& kv) { return acc + kv.second; });
  if (sum > 1.0) {
    for (auto& [el, f] : frac) f /= sum;
  }
  std::map<std::string, double> kg;
  double covered = 0.0;
  for (const auto& [el, f] : frac) {
    kg[el] = f * m.mass_kg;
    covered += kg[el];
  }
  const double rest = m.mass_kg - covered;
  if (rest > 0.0) kg[std::string(kRemainderElement)] += rest;
  return kg;
}

}  // namespace

SimulationTrace simulate_recycling(const ScenarioSpec& s, const FacilityModel& f) {
  SimulationTrace trace;
  trace.rng_seed_used = s.rng_seed;
  Rng rng(derive_seed(s.rng_seed, kRecyclingStream));

  const size_t n_stations = f.stations.size();
  std::vector<int64_t> station_free(n_stations, 0);
  for (const auto& st : f.stations) trace.activity_ledger.entries[st.id] = 0.0;

  for (size_t item = 0; item < s.materials.size(); ++item) {
    const auto& m = s.materials[item];
    if (m.category != MaterialCategory::kBatteryCell) continue;
    auto flow = element_masses(m, f.composition_jitter, rng);
    for (const auto& [el, kg] : flow) {
      trace.input_totals[el] += kg;
      trace.input_kg += kg;
    }
    int64_t ready = 0;
    for (size_t k = 0; k < n_stations; ++k) {
      const auto& st = f.stations[k];
      StationEvent ev;
      ev.item = item;
      ev.station_id = st.id;
      for (const auto& [el, kg] : flow) ev.input_kg += kg;
      const int64_t duration =
          std::max<int64_t>(1, static_cast<int64_t>(std::ceil(ev.input_kg / f.throughput_kg_per_step)));
      ev.step = std::max(ready, station_free[k]);
      ready = ev.step + duration;
      station_free[k] = ready;
      trace.makespan_steps = std::max(trace.makespan_steps, ready);

      for (auto& [el, kg] : flow) {
        auto eff_it = st.recovery_efficiency.find(el);
        const double eff = eff_it == st.recovery_efficiency.end() ? 0.0 : eff_it->second;
        const double rec = kg * eff;
        const double lost = kg * st.loss_fraction;
        if (eff_it != st.recovery_efficiency.end()) ev.recovered[el] = rec;
        trace.recovered_totals[el] += rec;
        trace.lost_totals[el] += lost;
        ev.lost_kg += lost;
        kg = std::max(0.0, kg - rec - lost);
      }
      ev.energy_kwh = st.energy_kwh_per_kg * ev.input_kg;
      trace.energy_kwh += ev.energy_kwh;
      trace.activity_ledger.entries[st.id] += ev.input_kg;
      trace.steps.push_back(std::move(ev));
    }
    for (const auto& [el, kg] : flow) {
      trace.residual_by_element[el] += kg;
      trace.residual_kg += kg;
    }
  }

  std::map<std::string, size_t> station_index;
  for (size_t k = 0; k < n_stations; ++k) station_index[f.stations[k].id] = k;
  std::stable_sort(trace.steps.begin(), trace.steps.end(), [&](const auto& a, const auto& b) {
    return std::tuple(a.step, station_index[a.station_id], a.item) <
           std::tuple(b.step, station_index[b.station_id], b.item);
  });
  return trace;
}

std::map<std::string, double> recovery_rates(const SimulationTrace& trace, const ScenarioSpec& s) {
  std::set<std::string> elements{std::string(kRemainderElement)};
  for (const auto& m : s.materials) {
    for (const auto& [el, f] : m.composition) elements.insert(el);
  }
  for (const auto& [el, kg] : trace.input_totals) elements.insert(el);
  std::map<std::string, double> out;
  for (const auto& el : elements) {
    auto in = trace.input_totals.find(el);
    if (in == trace.input_totals.end() || !(in->second > 0.0)) continue;
    auto rec = trace.recovered_totals.find(el);
    const double r = rec == trace.recovered_totals.end() ? 0.0 : rec->second;
    out[el] = std::clamp(r / in->second, 0.0, 1.0);
  }
  return out;
}

std::vector<std::string> check_mass_balance(const SimulationTrace& trace, double rel_tol) {
  std::vector<std::string> out;
  auto get = [](const std::map<std::string, double>& m, const std::string& k) {
    auto it = m.find(k);
    return it == m.end() ? 0.0 : it->second;
  };
  std::set<std::string> elements;
  for (const auto* m : {&trace.input_totals, &trace.recovered_totals, &trace.lost_totals,
                        &trace.residual_by_element}) {
    for (const auto& [el, kg] : *m) {
      elements.insert(el);
      if (!(kg >= 0.0)) out.push_back(fmt::format("{}: negative mass {}", el, kg));
    }
  }
  for (const auto& el : elements) {
    const double in = get(trace.input_totals, el);
    const double out_kg =
        get(trace.recovered_totals, el) + get(trace.lost_totals, el) + get(trace.residual_by_element, el);
    if (std::abs(in - out_kg) > rel_tol * std::max(in, 1e-12)) {
      out.push_back(fmt::format("{}: input {} kg but recovered + lost + residual = {} kg", el, in, out_kg));
    }
  }
  for (const auto& ev : trace.steps) {
    if (!(ev.input_kg >= 0.0) || !(ev.lost_kg >= 0.0) || !(ev.energy_kwh >= 0.0)) {
      out.push_back(fmt::format("step {} at {}: negative quantity", ev.step, ev.station_id));
    }
  }
  return out;
}

double waste_reduction_fraction(const SimulationTrace& trace) {
  if (!(trace.input_kg > 0.0)) return 0.0;
  return std::clamp(1.0 - trace.residual_kg / trace.input_kg, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// smart bins

BinEventStream simulate_bins(const ScenarioSpec& s, int64_t horizon) {
  return simulate_bins(s, horizon, derive_seed(s.rng_seed, kBinStream));
}

BinEventStream simulate_bins(const ScenarioSpec& s, int64_t horizon, uint64_t seed) {
  if (!s.collection_graph) {
    throw Error(ErrorCode::kNoGraph, fmt::format("scenario '{}' has no collection_graph", s.name));
  }
  if (!s.sensors) {
    throw Error(ErrorCode::kValidation, fmt::format("scenario '{}' has no sensors block", s.name));
  }
  const auto& cfg = *s.sensors;
  BinEventStream stream;
  std::vector<NodeId> bins;
  for (const auto& n : s.collection_graph->nodes) {
    if (n.is_depot) continue;
    bins.push_back(n.id);
    stream.final_fill[n.id] = n.fill_level;
  }
  std::sort(bins.begin(), bins.end());
  if (horizon <= 0 || cfg.categories.empty()) return stream;

  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& c : cfg.categories) cumulative.push_back(acc += c.share);

  Rng rng(seed);
  for (int64_t t = 0; t < horizon; ++t) {
    for (NodeId b : bins) {
      if (!rng.bernoulli(cfg.deposit_probability)) continue;
      double& fill = stream.final_fill[b];
      fill = std::min(1.0, fill + rng.uniform(cfg.fill_increment_min, cfg.fill_increment_max));
      const double u = rng.uniform() * acc;
      size_t k = 0;
      while (k + 1 < cumulative.size() && u >= cumulative[k]) ++k;
      const auto& cat = cfg.categories[k];
      BinEvent ev{t, b, fill, {}, cat.label};
      for (size_t f = 0; f < kFeatureCount; ++f) {
        ev.record[std::string(kFeatureNames[f])] = rng.normal(cat.mean[f], cat.stddev[f]);
      }
      stream.events.push_back(std::move(ev));
    }
  }
  return stream;
}

CollectionGraph with_fill_levels(const CollectionGraph& g, const BinEventStream& stream) {
  CollectionGraph out = g;
  for (auto& n : out.nodes) {
    if (auto it = stream.final_fill.find(n.id); it != stream.final_fill.end() && !n.is_depot) {
      n.fill_level = it->second;
    }
  }
  return out;
}

void write_trace_ndjson(const SimulationTrace& trace, std::ostream& out) {
  for (const auto& ev : trace.steps) {
    Json j = {{"step", ev.step},         {"item", ev.item},
              {"station", ev.station_id}, {"input_kg", ev.input_kg},
              {"recovered", ev.recovered}, {"lost_kg", ev.lost_kg},
              {"energy_kwh", ev.energy_kwh}};
    out << j.dump() << '\n';
  }
}

void write_bin_events_ndjson(const BinEventStream& stream, std::ostream& out) {
  for (const auto& ev : stream.events) {
    Json j = {{"step", ev.step},
              {"bin", ev.bin},
              {"fill_level", ev.fill_level},
              {"record", ev.record},
              {"true_label", ev.true_label}};
    out << j.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// calibration

namespace {

FacilityModel scaled_facility(const FacilityModel& base, const std::string& element, double scale) {
  FacilityModel f = base;
  for (auto& st : f.stations) {
    auto it = st.recovery_efficiency.find(element);
    if (it == st.recovery_efficiency.end()) continue;
    it->second = std::min(it->second * scale, 1.0 - st.loss_fraction);
  }
  return f;
}

}  // namespace

ScenarioSpec calibrate_scenario(const ScenarioSpec& s, const CalibrationTargets& targets,
                                CalibrationReport* report) {
  if (!s.facility) {
    throw Error(ErrorCode::kModeUnsupported,
                fmt::format("scenario '{}' has no facility to calibrate", s.name));
  }
  CalibrationReport local;
  CalibrationReport& rep = report ? *report : local;
  ScenarioSpec out = s;
  FacilityModel& fac = *out.facility;

  for (const auto& [element, target] : targets.recovery) {
    auto rate_at = [&](double scale) {
      const auto rates = recovery_rates(simulate_recycling(out, scaled_facility(fac, element, scale)), out);
      auto it = rates.find(element);
      return it == rates.end() ? 0.0 : it->second;
    };
    double hi = 1.0;
    for (const auto& st : fac.stations) {
      auto it = st.recovery_efficiency.find(element);
      if (it != st.recovery_efficiency.end() && it->second > 0.0) {
        hi = std::max(hi, (1.0 - st.loss_fraction) / it->second);
      }
    }
    if (rate_at(hi) < target) {
      rep.notes.push_back(fmt::format("{}: target {} unreachable, capped at {}", element, target, rate_at(hi)));
      fac = scaled_facility(fac, element, hi);
      rep.efficiency_scale[element] = hi;
      continue;
    }
    double lo = 0.0;
    for (int iter = 0; iter < 100 && hi - lo > 1e-13; ++iter) {
      const double mid = 0.5 * (lo + hi);
      (rate_at(mid) < target ? lo : hi) = mid;
    }
    // Pick whichever end lands closer.
    const double scale = std::abs(rate_at(lo) - target) <= std::abs(rate_at(hi) - target) ? lo : hi;
    fac = scaled_facility(fac, element, scale);
    rep.efficiency_scale[element] = scale;
  }

  auto trace = simulate_recycling(out, fac);
  if (targets.process_energy_kwh) {
    if (trace.energy_kwh > 0.0) {
      rep.energy_scale = *targets.process_energy_kwh / trace.energy_kwh;
      for (auto& st : fac.stations) st.energy_kwh_per_kg *= rep.energy_scale;
      trace = simulate_recycling(out, fac);
    } else {
      rep.notes.push_back("process energy is zero; energy target ignored");
    }
  }

  if (targets.co2_kg) {
    std::set<std::string> stations;
    for (const auto& st : fac.stations) stations.insert(st.id);
    const double co2 = carbon_footprint(out.emission_factors, trace.activity_ledger).total_kg;
    if (co2 > 0.0) {
      rep.co2_scale = *targets.co2_kg / co2;
      for (auto& f : out.emission_factors) {
        if (stations.contains(f.process_id)) f.e *= rep.co2_scale;
      }
    } else {
      rep.notes.push_back("station emissions are zero; CO2 target ignored");
    }
  }

  rep.achieved_recovery = recovery_rates(trace, out);
  rep.achieved_energy_kwh = trace.energy_kwh;
  rep.achieved_co2_kg = carbon_footprint(out.emission_factors, trace.activity_ledger).total_kg;
  return out;
}

}  // namespace greenloop
