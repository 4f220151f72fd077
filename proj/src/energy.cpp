// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "greenloop/energy.hpp"

#include <utility>

namespace greenloop {

double energy_of(const EnergyModel& model, const StageUsage& usage) {
  return model.alpha * usage.compute_seconds + model.beta * usage.transferred_mb;
}

EnergyLedger record_stage(EnergyLedger ledger, const EnergyModel& model, StageUsage usage) {
  const double kwh = energy_of(model, usage);
  ledger.stages.push_back(MeteredStage{std::move(usage), kwh});
  ledger.total_kwh += kwh;
  return ledger;
}

}  // namespace greenloop
