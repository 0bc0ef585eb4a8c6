// Copyright 2026 The VitalNet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VITALNET_SYNTH_HPP_
#define VITALNET_SYNTH_HPP_

// Deterministic synthetic cohort with class-conditional demographics and
// vitals, and a linear deterioration drift before each adverse event.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

#include "vitalnet/cohort.hpp"
#include "vitalnet/preprocess.hpp"

namespace vitalnet {

struct ClassProfile {
  std::array<VitalStats, kNumVitals> vitals{};  // spo2, hr, temp
  double female = 0.5;
  double age_mean = 65.0;
  double age_sd = 18.0;
  double diabetes_without = 0.2;
  double diabetes_with = 0.015;
  double hypertension = 0.4;
  double vaccinated = 0.5;
  double vaccination_months_mean = 0.0;
  double vaccination_months_sd = 6.0;
  double obesity = 0.17;
};

// Cohort characteristics of deteriorating patients (n = 6104).
ClassProfile deteriorated_profile();
// Cohort characteristics of non-deteriorating patients (n = 30902).
ClassProfile stable_profile();

inline constexpr double kMinMonitoringHours = 72.0;

struct CohortSpec {
  std::size_t n_patients = 2000;
  double prevalence = 6104.0 / 37006.0;
  ClassProfile deteriorated = deteriorated_profile();
  ClassProfile stable = stable_profile();
  // Length of the ramp from the stable mean to the drift target, ending at
  // the adverse event.
  double drift_hours = 48.0;
  // Fraction of the deteriorated-minus-stable mean gap reached at the event,
  // per vital (spo2, hr, temp).
  std::array<double, kNumVitals> drift_weight{1.0, 1.0, 0.3};
  double sampling_min_hours = 4.0;
  double sampling_max_hours = 5.0;
  double min_stay_hours = 78.0;
  double max_stay_hours = 120.0;
  // Hourly AR(1) coefficient of the within-patient noise.
  double ar_coefficient = 0.8;
  // Share of each class variance that is within-patient noise; the rest is
  // a per-patient offset.
  double within_patient_variance = 0.25;
  std::uint64_t seed = 0;

  // Throws ConfigError when the spec is inconsistent.
  void validate() const;
};

struct CohortFiles {
  std::string encounters_csv;
  std::string vitals_csv;
  std::string events_csv;
};

CohortFiles generate_cohort(const CohortSpec& spec);

}  // namespace vitalnet

#endif  // VITALNET_SYNTH_HPP_
