// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

// Lifecycle carbon accounting: total CO2 is the sum over processes of the
// process emission factor times its activity level.

#ifndef GREENLOOP_LCA_HPP_
#define GREENLOOP_LCA_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace greenloop {

enum class LifecycleStage { kCollection, kTransport, kProcessing, kRecovery, kDisposal };

std::string_view lifecycle_stage_name(LifecycleStage stage);
std::optional<LifecycleStage> parse_lifecycle_stage(std::string_view name);

struct EmissionFactor {
  std::string id;
  std::string process_id;
  double e = 0.0;  // kg CO2 per activity unit
  LifecycleStage stage = LifecycleStage::kProcessing;

  bool operator==(const EmissionFactor&) const = default;
};

// Activity level per process id, in that process's own units.
struct ActivityLedger {
  std::map<std::string, double> entries;

  void add(const std::string& process_id, double amount) { entries[process_id] += amount; }
  bool operator==(const ActivityLedger&) const = default;
};

struct CarbonReport {
  double total_kg = 0.0;
  std::map<LifecycleStage, double> by_stage;
  std::map<std::string, double> by_process;
  // Stage each process was booked under.
  std::map<std::string, LifecycleStage> process_stage;

  bool operator==(const CarbonReport&) const = default;
};

// Throws kMissingFactor when a ledger process has no factor and
// kDuplicateFactor when a process (or factor id) appears twice.
CarbonReport carbon_footprint(std::span<const EmissionFactor> factors,
                              const ActivityLedger& ledger);

// Returns report.by_stage after re-summing by_process into stages and
// comparing; throws kInconsistentReport on a mismatch above 1e-9 relative.
std::map<LifecycleStage, double> aggregate_by_stage(const CarbonReport& report);

}  // namespace greenloop

#endif  // GREENLOOP_LCA_HPP_
