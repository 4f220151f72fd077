// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "greenloop/lca.hpp"

#include <cmath>
#include <set>

#include <fmt/format.h>

#include "greenloop/error.hpp"

namespace greenloop {

std::string_view lifecycle_stage_name(LifecycleStage stage) {
  switch (stage) {
    case LifecycleStage::kCollection: return "collection";
    case LifecycleStage::kTransport: return "transport";
    case LifecycleStage::kProcessing: return "processing";
    case LifecycleStage::kRecovery: return "recovery";
    case LifecycleStage::kDisposal: return "disposal";
  }
  return "processing";
}

std::optional<LifecycleStage> parse_lifecycle_stage(std::string_view name) {
  for (auto s : {LifecycleStage::kCollection, LifecycleStage::kTransport,
                 LifecycleStage::kProcessing, LifecycleStage::kRecovery,
                 LifecycleStage::kDisposal}) {
    if (lifecycle_stage_name(s) == name) return s;
  }
  return std::nullopt;
}

namespace {

std::map<std::string, const EmissionFactor*> index_factors(
    std::span<const EmissionFactor> factors) {
  std::map<std::string, const EmissionFactor*> by_process;
  std::set<std::string> ids;
  for (const auto& f : factors) {
    if (!ids.insert(f.id).second) {
      throw Error(ErrorCode::kDuplicateFactor, fmt::format("factor id '{}' is not unique", f.id));
    }
    if (!by_process.emplace(f.process_id, &f).second) {
      throw Error(ErrorCode::kDuplicateFactor,
                  fmt::format("process '{}' has more than one emission factor", f.process_id));
    }
  }
  return by_process;
}

bool relatively_equal(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

CarbonReport carbon_footprint(std::span<const EmissionFactor> factors,
                              const ActivityLedger& ledger) {
  const auto by_process = index_factors(factors);
  CarbonReport report;
  for (const auto& [process, activity] : ledger.entries) {
    auto it = by_process.find(process);
    if (it == by_process.end()) {
      throw Error(ErrorCode::kMissingFactor,
                  fmt::format("no emission factor for process '{}'", process));
    }
    const double kg = it->second->e * activity;
    report.by_process[process] = kg;
    report.process_stage[process] = it->second->stage;
    report.by_stage[it->second->stage] += kg;
    report.total_kg += kg;
  }
  return report;
}

std::map<LifecycleStage, double> aggregate_by_stage(const CarbonReport& report) {
  std::map<LifecycleStage, double> resummed;
  double process_total = 0.0;
  for (const auto& [process, kg] : report.by_process) {
    auto it = report.process_stage.find(process);
    if (it == report.process_stage.end()) {
      throw Error(ErrorCode::kInconsistentReport,
                  fmt::format("process '{}' has no stage assignment", process));
    }
    resummed[it->second] += kg;
    process_total += kg;
  }
  double stage_total = 0.0;
  for (const auto& [stage, kg] : report.by_stage) stage_total += kg;

  std::set<LifecycleStage> stages;
  for (const auto& [s, kg] : resummed) stages.insert(s);
  for (const auto& [s, kg] : report.by_stage) stages.insert(s);
  for (auto s : stages) {
    const double want = resummed.contains(s) ? resummed.at(s) : 0.0;
    const double have = report.by_stage.contains(s) ? report.by_stage.at(s) : 0.0;
    if (!relatively_equal(want, have)) {
      throw Error(ErrorCode::kInconsistentReport,
                  fmt::format("stage '{}' holds {} kg but its processes sum to {} kg",
                              lifecycle_stage_name(s), have, want));
    }
  }
  if (!relatively_equal(stage_total, report.total_kg) ||
      !relatively_equal(process_total, report.total_kg)) {
    throw Error(ErrorCode::kInconsistentReport,
                fmt::format("total {} kg disagrees with stage sum {} / process sum {}",
                            report.total_kg, stage_total, process_total));
  }
  return report.by_stage;
}

}  // namespace greenloop
