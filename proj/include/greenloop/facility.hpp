// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

// Configuration consumed by the digital twin: the recycling line and the
// smart-bin sensor generator.

#ifndef GREENLOOP_FACILITY_HPP_
#define GREENLOOP_FACILITY_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "greenloop/classifier.hpp"

namespace greenloop {

struct Station {
  // Also the process id its throughput is booked under for carbon accounting.
  std::string id;
  std::map<std::string, double> recovery_efficiency;  // element -> fraction
  double energy_kwh_per_kg = 0.0;
  double loss_fraction = 0.0;

  bool operator==(const Station&) const = default;
};

struct FacilityModel {
  std::vector<Station> stations;
  double throughput_kg_per_step = 1.0;
  // Relative standard deviation applied to each element fraction per item.
  double composition_jitter = 0.0;

  bool operator==(const FacilityModel&) const = default;
};

// Problems with a facility, as "field: message" strings.
std::vector<std::string> validate_facility(const FacilityModel& f);

struct CategoryProfile {
  std::string label;
  double share = 0.0;
  std::array<double, kFeatureCount> mean{};
  std::array<double, kFeatureCount> stddev{};

  bool operator==(const CategoryProfile&) const = default;
};

struct SensorConfig {
  int64_t horizon = 0;
  double deposit_probability = 0.1;
  double fill_increment_min = 0.0;
  double fill_increment_max = 0.05;
  double train_fraction = 0.7;
  std::vector<CategoryProfile> categories;

  bool operator==(const SensorConfig&) const = default;
};

std::vector<std::string> validate_sensors(const SensorConfig& s);

}  // namespace greenloop

#endif  // GREENLOOP_FACILITY_HPP_
