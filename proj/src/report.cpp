// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "greenloop/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "greenloop/display.hpp"
#include "greenloop/error.hpp"

namespace greenloop {

namespace fs = std::filesystem;

std::string compute_run_id(const ScenarioSpec& s, RunMode mode, uint64_t seed) {
  const std::string text =
      fmt::format("{}\n{}\n{}\n{}", scenario_to_json(s), seed, run_mode_name(mode), kToolVersion);
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return fmt::format("{:016x}", h);
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
  const std::time_t secs = static_cast<std::time_t>(ms / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", tm.tm_year + 1900, tm.tm_mon + 1,
                     tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, ms % 1000);
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> read_optional(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

bool all_stages_synthetic(const ScenarioSpec& s) {
  return std::all_of(kPipelineStages.begin(), kPipelineStages.end(),
                     [&](std::string_view st) { return s.energy.synthetic_costs.contains(std::string(st)); });
}

EnergyLedger energy_ledger_from_json(const Json& j) {
  EnergyLedger l;
  for (const auto& st : j.at("stages")) {
    MeteredStage m;
    m.usage.stage_name = st.at("stage").get<std::string>();
    m.usage.compute_seconds = st.at("compute_seconds").get<double>();
    m.usage.transferred_mb = st.at("transferred_mb").get<double>();
    m.energy_kwh = st.at("energy_kwh").get<double>();
    l.stages.push_back(std::move(m));
  }
  l.total_kwh = j.at("total_kwh").get<double>();
  return l;
}

Json carbon_to_json(const CarbonReport& c) {
  Json by_stage = Json::object();
  for (const auto& [st, kg] : c.by_stage) by_stage[std::string(lifecycle_stage_name(st))] = kg;
  Json by_process = Json::object();
  for (const auto& [p, kg] : c.by_process) {
    by_process[p] = {{"kg", kg}, {"stage", lifecycle_stage_name(c.process_stage.at(p))}};
  }
  return {{"total_kg", c.total_kg}, {"by_stage", by_stage}, {"by_process", by_process}};
}

Json routes_to_json(const RunArtifacts& a) {
  Json districts = Json::array();
  for (size_t d = 0; d < a.districts.size(); ++d) {
    Json bins = Json::array();
    for (const auto& n : a.districts[d].nodes) {
      if (!n.is_depot) bins.push_back(n.id);
    }
    Json entry = {{"bins", bins}};
    if (d < a.routes.size()) {
      entry["route"] = a.routes[d];
      entry["emissions_kg"] = route_emissions(a.districts[d], a.routes[d]);
      entry["distance_km"] = route_distance_km(a.districts[d], a.routes[d]);
    }
    districts.push_back(std::move(entry));
  }
  return {{"districts", districts}};
}

}  // namespace

Json energy_ledger_to_json(const EnergyLedger& l) {
  Json stages = Json::array();
  for (const auto& st : l.stages) {
    stages.push_back({{"stage", st.usage.stage_name},
                      {"compute_seconds", st.usage.compute_seconds},
                      {"transferred_mb", st.usage.transferred_mb},
                      {"energy_kwh", st.energy_kwh}});
  }
  return {{"stages", stages}, {"total_kwh", l.total_kwh}};
}

Json metrics_to_json(const RunResult& r, bool include_pipeline_energy) {
  Json j;
  j["mode"] = run_mode_name(r.mode);
  j["scenario_name"] = r.scenario_name;
  j["family"] = scenario_family_name(r.family);
  j["seed"] = r.seed;
  j["recovery"] = r.recovery;
  j["input_kg"] = r.input_kg;
  j["process_energy_kwh"] = r.process_energy_kwh;
  j["co2_kg"] = r.co2_kg;
  Json by_stage = Json::object();
  for (const auto& [st, kg] : r.co2_by_stage) by_stage[std::string(lifecycle_stage_name(st))] = kg;
  j["co2_by_stage"] = by_stage;
  j["classification_accuracy"] = optional_number(r.classification_accuracy);
  j["transport_emissions_kg"] = optional_number(r.transport_emissions_kg);
  j["waste_reduction_fraction"] = r.waste_reduction_fraction;
  j["allocation_objective"] = optional_number(r.allocation_objective);
  Json ex = Json::object();
  for (const auto& [k, e] : r.expectations) {
    ex[k] = {{"form", e.form == Expectation::Form::kPoints ? "points" : "relative"}, {"value", e.value}};
  }
  j["expectations"] = ex;
  if (include_pipeline_energy) j["pipeline_energy"] = energy_ledger_to_json(r.pipeline_energy);
  return j;
}

RunResult metrics_from_json(const Json& j, const std::string& source) {
  try {
    RunResult r;
    auto mode = parse_run_mode(j.at("mode").get<std::string>());
    auto family = parse_scenario_family(j.at("family").get<std::string>());
    if (!mode || !family) throw Error(ErrorCode::kManifestUnreadable, "unknown mode or family");
    r.mode = *mode;
    r.family = *family;
    r.scenario_name = j.at("scenario_name").get<std::string>();
    r.seed = j.at("seed").get<uint64_t>();
    r.recovery = j.at("recovery").get<std::map<std::string, double>>();
    r.input_kg = j.at("input_kg").get<double>();
    r.process_energy_kwh = j.at("process_energy_kwh").get<double>();
    r.co2_kg = j.at("co2_kg").get<double>();
    for (const auto& [name, kg] : j.at("co2_by_stage").items()) {
      auto st = parse_lifecycle_stage(name);
      if (!st) throw Error(ErrorCode::kManifestUnreadable, fmt::format("unknown stage '{}'", name));
      r.co2_by_stage[*st] = kg.get<double>();
    }
    r.classification_accuracy = read_optional(j, "classification_accuracy");
    r.transport_emissions_kg = read_optional(j, "transport_emissions_kg");
    r.waste_reduction_fraction = j.at("waste_reduction_fraction").get<double>();
    r.allocation_objective = read_optional(j, "allocation_objective");
    for (const auto& [k, e] : j.at("expectations").items()) {
      Expectation ex;
      ex.form = e.at("form").get<std::string>() == "points" ? Expectation::Form::kPoints
                                                            : Expectation::Form::kRelative;
      ex.value = e.at("value").get<double>();
      r.expectations[k] = ex;
    }
    if (j.contains("pipeline_energy")) r.pipeline_energy = energy_ledger_from_json(j.at("pipeline_energy"));
    return r;
  } catch (const Error& e) {
    throw Error(ErrorCode::kManifestUnreadable, fmt::format("{}: {}", source, e.what()));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kManifestUnreadable, fmt::format("{}: {}", source, e.what()));
  }
}

Json classifier_to_json(const SoftmaxModel& m) {
  return {{"kind", "softmax"},
          {"class_labels", m.class_labels},
          {"weights", m.weights},
          {"biases", m.biases},
          {"norm_mean", m.norm_stats.mean},
          {"norm_stddev", m.norm_stats.stddev}};
}

Json threshold_classifier_to_json(const ThresholdClassifier& c) {
  return {{"kind", "threshold"},
          {"feature", c.feature},
          {"labels", c.labels},
          {"class_means", c.class_means},
          {"thresholds", c.thresholds}};
}

Json qtables_to_json(const std::vector<QTable>& tables) {
  Json out = Json::array();
  for (const auto& q : tables) {
    Json rows = Json::array();
    for (const auto& [key, v] : q.entries()) rows.push_back({key.current, key.visited, key.action, v});
    out.push_back({{"columns", {"current", "visited_mask", "action", "q"}}, {"entries", rows}});
  }
  return out;
}

Json allocation_to_json(const AllocationResult& a) {
  Json values = Json::object();
  for (size_t i = 0; i < a.process_ids.size() && i < a.values.size(); ++i) values[a.process_ids[i]] = a.values[i];
  return {{"method", a.optimized ? "milp" : "greedy"},
          {"status", solve_status_name(a.status)},
          {"values", values},
          {"objective", a.objective}};
}

RunManifest persist_run(const ScenarioSpec& s, const RunOutcome& outcome, const fs::path& out_dir) {
  const RunResult& r = outcome.result;
  const RunArtifacts& a = outcome.artifacts;
  RunManifest m;
  m.run_id = compute_run_id(s, r.mode, r.seed);
  m.scenario_name = r.scenario_name;
  m.family = r.family;
  m.mode = r.mode;
  m.seed = r.seed;
  m.tool_version = std::string(kToolVersion);
  m.created_at = utc_now();
  m.timings = r.timings;
  m.pipeline_energy = r.pipeline_energy;
  m.metrics = metrics_to_json(r, all_stages_synthetic(s));

  const fs::path dir = out_dir / m.run_id;
  auto put = [&](const std::string& name, const std::string& file, std::string_view text) {
    write_text_file(dir / file, text);
    m.artifacts[name] = file;
  };
  put("scenario", "scenario.json", scenario_to_json(s));
  put("metrics", "metrics.json", dump_json(m.metrics));
  put("allocation", "allocation.json", dump_json(allocation_to_json(a.allocation)));
  put("carbon", "carbon.json", dump_json(carbon_to_json(a.carbon)));
  if (!a.districts.empty()) put("routes", "routes.json", dump_json(routes_to_json(a)));
  if (!a.qtables.empty()) put("qtables", "qtables.json", dump_json(qtables_to_json(a.qtables)));
  if (a.classifier) put("classifier", "classifier.json", dump_json(classifier_to_json(*a.classifier)));
  if (a.rule_classifier) {
    put("classifier", "classifier.json", dump_json(threshold_classifier_to_json(*a.rule_classifier)));
  }
  if (a.trace) {
    std::ostringstream os;
    write_trace_ndjson(*a.trace, os);
    put("trace", "trace.ndjson", os.str());
  }
  if (a.bin_events) {
    std::ostringstream os;
    write_bin_events_ndjson(*a.bin_events, os);
    put("bin_events", "bin_events.ndjson", os.str());
  }

  Json j;
  j["run_id"] = m.run_id;
  j["scenario_name"] = m.scenario_name;
  j["family"] = scenario_family_name(m.family);
  j["mode"] = run_mode_name(m.mode);
  j["seed"] = m.seed;
  j["tool_version"] = m.tool_version;
  j["created_at"] = m.created_at;
  j["artifacts"] = m.artifacts;
  j["timings"] = m.timings;
  j["pipeline_energy"] = energy_ledger_to_json(m.pipeline_energy);
  j["metrics"] = m.metrics;
  write_text_file(dir / "manifest.json", dump_json(j));
  return m;
}

LoadedRun load_run(const fs::path& path) {
  const fs::path file = fs::is_directory(path) ? path / "manifest.json" : path;
  const std::string source = file.string();
  Json j;
  try {
    j = read_json_file(file);
  } catch (const Error& e) {
    throw Error(ErrorCode::kManifestUnreadable, e.what());
  }
  LoadedRun out;
  out.dir = file.parent_path();
  try {
    RunManifest& m = out.manifest;
    m.run_id = j.at("run_id").get<std::string>();
    m.scenario_name = j.at("scenario_name").get<std::string>();
    m.seed = j.at("seed").get<uint64_t>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.created_at = j.at("created_at").get<std::string>();
    m.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
    m.timings = j.at("timings").get<std::map<std::string, double>>();
    m.pipeline_energy = energy_ledger_from_json(j.at("pipeline_energy"));
    m.metrics = j.at("metrics");
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kManifestUnreadable, fmt::format("{}: {}", source, e.what()));
  }
  out.result = metrics_from_json(out.manifest.metrics, source);
  out.manifest.mode = out.result.mode;
  out.manifest.family = out.result.family;
  out.result.timings = out.manifest.timings;
  out.result.pipeline_energy = out.manifest.pipeline_energy;
  return out;
}

std::optional<LoadedRun> latest_run(const fs::path& out_dir, RunMode mode, std::optional<ScenarioFamily> family) {
  std::optional<LoadedRun> best;
  std::error_code ec;
  if (!fs::is_directory(out_dir, ec)) return best;
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(out_dir, ec)) {
    if (entry.is_directory() && fs::exists(entry.path() / "manifest.json")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) {
    LoadedRun run;
    try {
      run = load_run(d);
    } catch (const Error&) {
      continue;  // someone else's directory; not ours to judge
    }
    if (run.manifest.mode != mode || (family && run.manifest.family != *family)) continue;
    if (!best || std::tie(run.manifest.created_at, run.manifest.run_id) >
                     std::tie(best->manifest.created_at, best->manifest.run_id)) {
      best = std::move(run);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// tables

std::string display_value(const MetricComparison& m, double v) {
  if (m.percentage) return format_decimal(v * 100.0) + "%";
  if (m.key == "co2_kg") return format_thousands(v / 1000.0);
  return format_thousands(v);
}

std::string display_improvement(const MetricComparison& m) {
  const std::string rel = m.delta_relative ? format_signed(*m.delta_relative) + "%" : "n/a";
  if (m.percentage) return format_signed(m.delta_pp.value_or(0.0)) + " pp / " + rel;
  return rel;
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> notes_for(const ImprovementReport& rep) {
  std::vector<std::string> notes = rep.annotations;
  if (rep.find("waste_reduction")) {
    notes.push_back("Waste Reduction (%) is 1 - residual/input over all simulated facility mass.");
  }
  if (rep.find("transport_emissions")) {
    notes.push_back("Transportation Emissions (%) is indexed to the baseline route total (baseline = 100%).");
  }
  return notes;
}

}  // namespace

std::string render_compare_markdown(const ImprovementReport& rep) {
  std::string out = fmt::format("# Baseline vs framework ({})\n\n", scenario_family_name(rep.family));
  out += "| Metric | Baseline | Framework | Improvement |\n|---|---|---|---|\n";
  for (const auto& m : rep.metrics) {
    out += fmt::format("| {} | {} | {} | {} |\n", m.label, display_value(m, m.baseline),
                       display_value(m, m.framework), display_improvement(m));
  }
  out += "\n## Annotations\n\n";
  const auto notes = notes_for(rep);
  if (notes.empty()) out += "None.\n";
  for (const auto& n : notes) out += "- " + n + "\n";
  return out;
}

std::string render_compare_csv(const ImprovementReport& rep) {
  std::string out = "Metric,Baseline,Framework,Improvement\n";
  for (const auto& m : rep.metrics) {
    out += fmt::format("{},{},{},{}\n", csv_cell(m.label), csv_cell(display_value(m, m.baseline)),
                       csv_cell(display_value(m, m.framework)), csv_cell(display_improvement(m)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// charts

std::string_view chart_kind_name(ChartKind k) {
  switch (k) {
    case ChartKind::kRecovery: return "recovery";
    case ChartKind::kEnergy: return "energy";
    case ChartKind::kEmissions: return "emissions";
    case ChartKind::kAccuracy: return "accuracy";
    case ChartKind::kSummary: return "summary";
  }
  return "?";
}

std::optional<ChartKind> parse_chart_kind(std::string_view text) {
  for (auto k : {ChartKind::kRecovery, ChartKind::kEnergy, ChartKind::kEmissions, ChartKind::kAccuracy,
                 ChartKind::kSummary}) {
    if (chart_kind_name(k) == text) return k;
  }
  return std::nullopt;
}

namespace {

bool in_chart(const MetricComparison& m, ChartKind kind) {
  switch (kind) {
    case ChartKind::kRecovery: return m.key.starts_with("recovery.") && m.key != "recovery.mean";
    case ChartKind::kEnergy: return m.key == "process_energy_kwh";
    case ChartKind::kEmissions: return m.key == "co2_kg";
    case ChartKind::kAccuracy: return m.key == "classification_accuracy";
    case ChartKind::kSummary: return m.percentage;
  }
  return false;
}

std::string axis_label(ChartKind kind) {
  switch (kind) {
    case ChartKind::kEnergy: return "Energy (kWh)";
    case ChartKind::kEmissions: return "CO2 (tons)";
    default: return "Percent (%)";
  }
}

double chart_number(const MetricComparison& m, double v) {
  if (m.percentage) return v * 100.0;
  if (m.key == "co2_kg") return v / 1000.0;
  return v;
}

double nice_ceiling(double v) {
  if (!(v > 0.0)) return 1.0;
  const double mag = std::pow(10.0, std::floor(std::log10(v)));
  for (double step : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (step * mag >= v) return step * mag;
  }
  return 10.0 * mag;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string px(double v) { return format_decimal(v, 2); }

}  // namespace

std::string render_chart_svg(const ImprovementReport& rep, ChartKind kind) {
  std::vector<const MetricComparison*> rows;
  for (const auto& m : rep.metrics) {
    if (in_chart(m, kind)) rows.push_back(&m);
  }
  if (rows.empty()) {
    throw Error(ErrorCode::kMissingMetric,
                fmt::format("no metrics for chart '{}' in the comparison", chart_kind_name(kind)));
  }

  double top = 0.0;
  for (const auto* m : rows) top = std::max({top, chart_number(*m, m->baseline), chart_number(*m, m->framework)});
  const bool percent = kind == ChartKind::kRecovery || kind == ChartKind::kAccuracy || kind == ChartKind::kSummary;
  const double ymax = percent && top <= 100.0 ? 100.0 : nice_ceiling(top);

  const double left = 80, right = 20, plot_top = 50, plot_bottom = 300;
  const double group_w = 160, bar_w = 50;
  const double width = left + right + group_w * static_cast<double>(rows.size());
  const double height = 380;
  const double plot_h = plot_bottom - plot_top;
  auto y_of = [&](double v) { return plot_bottom - plot_h * std::clamp(v / ymax, 0.0, 1.0); };

  std::string svg;
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      px(width), px(height), px(width), px(height));
  svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n", px(width), px(height));
  svg += fmt::format("<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{} ({})</text>\n",
                     px(width / 2), xml_escape(std::string(chart_kind_name(kind))),
                     scenario_family_name(rep.family));

  for (int t = 0; t <= 5; ++t) {
    const double v = ymax * t / 5.0;
    const double y = y_of(v);
    svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\"/>\n", px(left), px(y),
                       px(width - right), px(y));
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", px(left - 6), px(y + 4),
                       format_decimal(v));
  }
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#000000\"/>\n", px(left),
                     px(plot_top), px(plot_bottom));
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#000000\"/>\n", px(left),
                     px(plot_bottom), px(width - right));
  svg += fmt::format(
      "<text x=\"20\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {0})\">{1}</text>\n",
      px((plot_top + plot_bottom) / 2), xml_escape(axis_label(kind)));

  for (size_t g = 0; g < rows.size(); ++g) {
    const auto& m = *rows[g];
    const double gx = left + group_w * static_cast<double>(g) + (group_w - 2 * bar_w) / 2;
    const std::pair<double, const char*> bars[] = {{m.baseline, "#9e9e9e"}, {m.framework, "#2e7d32"}};
    for (size_t b = 0; b < 2; ++b) {
      const double v = chart_number(m, bars[b].first);
      const double x = gx + bar_w * static_cast<double>(b);
      const double y = y_of(v);
      svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n", px(x), px(y),
                         px(bar_w - 4), px(plot_bottom - y), bars[b].second);
      svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", px(x + (bar_w - 4) / 2),
                         px(y - 4), xml_escape(display_value(m, bars[b].first)));
    }
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", px(gx + bar_w),
                       px(plot_bottom + 18), xml_escape(m.label));
  }

  const double ly = height - 24;
  svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"#9e9e9e\"/>\n", px(left), px(ly - 10));
  svg += fmt::format("<text x=\"{}\" y=\"{}\">Baseline</text>\n", px(left + 18), px(ly));
  svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"#2e7d32\"/>\n", px(left + 100),
                     px(ly - 10));
  svg += fmt::format("<text x=\"{}\" y=\"{}\">Framework</text>\n", px(left + 118), px(ly));
  svg += "</svg>\n";
  return svg;
}

// ---------------------------------------------------------------------------
// three-column comparison

Table3Fixture load_table3(const fs::path& path) {
  const Json j = read_json_file(path);
  const std::string src = path.string();
  Table3Fixture t;
  ObjectReader r(j, src);
  t.title = r.string("title");
  for (const auto& c : r.array("columns")) t.columns.push_back(as_string(c, src + ".columns"));
  const Json& rows = r.array("rows");
  for (size_t i = 0; i < rows.size(); ++i) {
    ObjectReader rr(rows[i], fmt::format("{}.rows[{}]", src, i));
    Table3Row row;
    row.label = rr.string("label");
    row.traditional = rr.string("traditional");
    row.ai_driven = rr.string("ai_driven");
    row.proposed = rr.string("proposed");
    row.measured_key = rr.string_or("measured", "");
    rr.finish();
    t.rows.push_back(std::move(row));
  }
  if (r.has("notes")) {
    for (const auto& n : r.array("notes")) t.notes.push_back(as_string(n, src + ".notes"));
  }
  r.finish();
  if (t.columns.size() != 4) throw_field_error(src + ".columns", "expected 4 header cells");
  return t;
}

Table3Measured measure_table3(const fs::path& out_dir) {
  Table3Measured m;
  auto fw = latest_run(out_dir, RunMode::kFramework);
  if (!fw) return m;
  const RunResult& f = fw->result;
  if (f.input_kg > 0.0) m.energy_gj_per_tonne = f.process_energy_kwh * 0.0036 / (f.input_kg / 1000.0);
  if (!f.recovery.empty()) {
    double sum = 0.0;
    for (const auto& [el, v] : f.recovery) sum += v;
    m.recovery_percent = sum / static_cast<double>(f.recovery.size()) * 100.0;
  }
  if (auto base = latest_run(out_dir, RunMode::kBaseline, f.family); base && base->result.co2_kg > 0.0) {
    m.co2_reduction_percent = (base->result.co2_kg - f.co2_kg) / base->result.co2_kg * 100.0;
  }
  return m;
}

namespace {

std::string measured_cell(const Table3Row& row, const Table3Measured& m) {
  std::optional<double> v;
  if (row.measured_key == "energy_intensity") v = m.energy_gj_per_tonne;
  if (row.measured_key == "recovery") v = m.recovery_percent;
  if (row.measured_key == "co2_reduction") v = m.co2_reduction_percent;
  return v ? format_decimal(*v) : "n/a";
}

}  // namespace

std::string render_table3_markdown(const Table3Fixture& t, const Table3Measured& m) {
  std::string out = fmt::format("# {}\n\n", t.title);
  out += "|";
  for (const auto& c : t.columns) out += " " + c + " |";
  out += " Measured |\n|---|---|---|---|---|\n";
  for (const auto& row : t.rows) {
    out += fmt::format("| {} | {} | {} | {} | {} |\n", row.label, row.traditional, row.ai_driven, row.proposed,
                       measured_cell(row, m));
  }
  if (!t.notes.empty()) {
    out += "\n";
    for (const auto& n : t.notes) out += "- " + n + "\n";
  }
  return out;
}

std::string render_table3_csv(const Table3Fixture& t, const Table3Measured& m) {
  std::string out;
  for (const auto& c : t.columns) out += csv_cell(c) + ",";
  out += "Measured\n";
  for (const auto& row : t.rows) {
    out += fmt::format("{},{},{},{},{}\n", csv_cell(row.label), csv_cell(row.traditional), csv_cell(row.ai_driven),
                       csv_cell(row.proposed), measured_cell(row, m));
  }
  return out;
}

}  // namespace greenloop
