// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GREENLOOP_ENERGY_HPP_
#define GREENLOOP_ENERGY_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace greenloop {

// E = alpha * compute + beta * transfer.
struct EnergyModel {
  double alpha = 0.0;  // kWh per processor-second
  double beta = 0.0;   // kWh per megabyte transferred

  bool operator==(const EnergyModel&) const = default;
};

struct StageUsage {
  std::string stage_name;
  double compute_seconds = 0.0;
  double transferred_mb = 0.0;

  bool operator==(const StageUsage&) const = default;
};

struct MeteredStage {
  StageUsage usage;
  double energy_kwh = 0.0;

  bool operator==(const MeteredStage&) const = default;
};

struct EnergyLedger {
  std::vector<MeteredStage> stages;
  double total_kwh = 0.0;

  bool operator==(const EnergyLedger&) const = default;
};

// Pipeline metering configuration. When a stage has a synthetic cost the
// measured wall-clock time is ignored for that stage.
struct EnergyConfig {
  EnergyModel model;
  std::map<std::string, StageUsage> synthetic_costs;

  bool operator==(const EnergyConfig&) const = default;
};

double energy_of(const EnergyModel& model, const StageUsage& usage);

EnergyLedger record_stage(EnergyLedger ledger, const EnergyModel& model, StageUsage usage);

}  // namespace greenloop

#endif  // GREENLOOP_ENERGY_HPP_
