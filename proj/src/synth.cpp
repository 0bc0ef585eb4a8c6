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

#include "vitalnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "vitalnet/error.hpp"
#include "vitalnet/random.hpp"

namespace vitalnet {

namespace {

// 2021-01-01T00:00:00Z
constexpr std::int64_t kEpochBase = 1609459200;

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

double clamp_to_bounds(VitalKind kind, double v) {
  switch (kind) {
    case VitalKind::kSpo2: return std::clamp(v, 50.0, 100.0);
    case VitalKind::kHr: return std::clamp(v, 25.0, 250.0);
    case VitalKind::kTemp: return std::clamp(v, 90.0, 108.0);
  }
  return v;
}

}  // namespace

ClassProfile deteriorated_profile() {
  ClassProfile p;
  p.vitals = {VitalStats{95.2, 4.5}, VitalStats{93.98, 27.1}, VitalStats{98.37, 1.6}};
  p.female = 0.415;
  p.age_mean = 66.0;
  p.age_sd = 18.4;
  p.diabetes_without = 0.247;
  p.diabetes_with = 0.018;
  p.hypertension = 0.445;
  p.vaccinated = 0.391;
  p.vaccination_months_mean = -0.67;
  p.vaccination_months_sd = 6.2;
  p.obesity = 0.164;
  return p;
}

ClassProfile stable_profile() {
  ClassProfile p;
  p.vitals = {VitalStats{96.2, 2.7}, VitalStats{82.9, 18.57}, VitalStats{98.2, 1.4}};
  p.female = 0.575;
  p.age_mean = 63.1;
  p.age_sd = 18.0;
  p.diabetes_without = 0.180;
  p.diabetes_with = 0.012;
  p.hypertension = 0.380;
  p.vaccinated = 0.542;
  p.vaccination_months_mean = -0.94;
  p.vaccination_months_sd = 7.3;
  p.obesity = 0.173;
  return p;
}

void CohortSpec::validate() const {
  if (n_patients == 0) throw ConfigError("n_patients must be positive");
  if (!(prevalence > 0.0 && prevalence < 1.0)) throw ConfigError("prevalence must lie in (0, 1)");
  for (const ClassProfile* p : {&deteriorated, &stable}) {
    for (const auto& v : p->vitals)
      if (!(v.sd > 0.0)) throw ConfigError("vital standard deviations must be positive");
  }
  if (!(sampling_min_hours > 0.0 && sampling_max_hours >= sampling_min_hours)) {
    throw ConfigError("sampling interval must be a positive range");
  }
  // First sample lands in the first hour and the last within one interval
  // of discharge, so this bound guarantees the monitored span.
  if (!(min_stay_hours >= kMinMonitoringHours + sampling_max_hours + 1.0) ||
      max_stay_hours < min_stay_hours) {
    throw ConfigError("stays must allow at least 72 hours of monitoring");
  }
  if (!(drift_hours > 0.0)) throw ConfigError("drift_hours must be positive");
  if (!(ar_coefficient >= 0.0 && ar_coefficient < 1.0)) {
    throw ConfigError("ar_coefficient must lie in [0, 1)");
  }
  if (!(within_patient_variance > 0.0 && within_patient_variance <= 1.0)) {
    throw ConfigError("within_patient_variance must lie in (0, 1]");
  }
}

CohortFiles generate_cohort(const CohortSpec& spec) {
  spec.validate();
  CohortFiles files;
  files.encounters_csv =
      "patient_id,encounter_id,encounter_start,covid_positive,sex,age_years,diabetes,"
      "hypertension,obesity,vaccinated,second_dose_date\n";
  files.vitals_csv = "encounter_id,time,kind,value\n";
  files.events_csv = "encounter_id,time,kind\n";

  const double within = std::sqrt(spec.within_patient_variance);
  const double between = std::sqrt(1.0 - spec.within_patient_variance);
  const double innovation = std::sqrt(1.0 - spec.ar_coefficient * spec.ar_coefficient);

  for (std::size_t i = 0; i < spec.n_patients; ++i) {
    Rng rng(derive_seed(spec.seed, i));
    const bool deteriorates = rng.bernoulli(spec.prevalence);
    const ClassProfile& cls = deteriorates ? spec.deteriorated : spec.stable;

    char ids[64];
    std::snprintf(ids, sizeof ids, "P%06zu", i);
    const std::string patient_id = ids;
    std::snprintf(ids, sizeof ids, "E%06zu", i);
    const std::string encounter_id = ids;

    const Timestamp start{kEpochBase + static_cast<std::int64_t>(rng.below(600)) * kSecondsPerDay +
                          static_cast<std::int64_t>(rng.below(24)) * kSecondsPerHour};
    const double stay = rng.uniform(spec.min_stay_hours, spec.max_stay_hours);

    std::vector<double> times;
    for (double t = rng.uniform(0.0, 1.0); t <= stay;
         t += rng.uniform(spec.sampling_min_hours, spec.sampling_max_hours)) {
      times.push_back(std::round(t * 3600.0) / 3600.0);
    }
    // The last vital is charted at the reference time: the adverse event for
    // deteriorating patients, discharge otherwise.
    const double event_hour = times.back();
    const std::size_t hours = static_cast<std::size_t>(std::ceil(stay)) + 1;

    for (std::size_t k = 0; k < kNumVitals; ++k) {
      const VitalKind kind = kAllVitals[k];
      const double sd = cls.vitals[k].sd;
      const double offset = rng.normal(0.0, between * sd);
      std::vector<double> noise(hours);
      noise[0] = rng.normal(0.0, within * sd);
      for (std::size_t h = 1; h < hours; ++h) {
        noise[h] = spec.ar_coefficient * noise[h - 1] + innovation * rng.normal(0.0, within * sd);
      }
      const double base = spec.stable.vitals[k].mean;
      const double gap =
          spec.drift_weight[k] * (spec.deteriorated.vitals[k].mean - spec.stable.vitals[k].mean);
      for (double t : times) {
        double level = base + offset;
        if (deteriorates) {
          const double ramp =
              std::clamp((t - (event_hour - spec.drift_hours)) / spec.drift_hours, 0.0, 1.0);
          level += gap * ramp;
        }
        const double value = clamp_to_bounds(kind, level + noise[static_cast<std::size_t>(t)]);
        files.vitals_csv += encounter_id + "," + format_timestamp(start.plus_hours(t)) + "," +
                            std::string(vital_name(kind)) + "," + fmt("%.2f", value) + "\n";
      }
    }

    const bool female = rng.bernoulli(cls.female);
    const int age =
        static_cast<int>(std::clamp(std::round(rng.normal(cls.age_mean, cls.age_sd)), 18.0, 100.0));
    const double u = rng.uniform();
    const char* diabetes = u < cls.diabetes_with                          ? "with_comp"
                           : u < cls.diabetes_with + cls.diabetes_without ? "no_comp"
                                                                          : "none";
    const bool hypertension = rng.bernoulli(cls.hypertension);
    const bool obesity = rng.bernoulli(cls.obesity);
    const bool vaccinated = rng.bernoulli(cls.vaccinated);
    const double months = rng.normal(cls.vaccination_months_mean, cls.vaccination_months_sd);
    std::string dose;
    if (vaccinated) {
      const std::int64_t ref_day =
          start.plus_hours(event_hour).seconds / kSecondsPerDay -
          static_cast<std::int64_t>(std::llround(months * 30.0));
      dose = format_timestamp(Timestamp{ref_day * kSecondsPerDay}).substr(0, 10);
    }
    files.encounters_csv += patient_id + "," + encounter_id + "," + format_timestamp(start) +
                            ",1," + (female ? "female" : "male") + "," + std::to_string(age) +
                            "," + diabetes + "," + (hypertension ? "1" : "0") + "," +
                            (obesity ? "1" : "0") + "," + (vaccinated ? "1" : "0") + "," + dose +
                            "\n";

    if (deteriorates) {
      static constexpr const char* kKinds[] = {"mortality", "icu", "intubation"};
      files.events_csv += encounter_id + "," + format_timestamp(start.plus_hours(event_hour)) +
                          "," + kKinds[rng.below(3)] + "\n";
    }
  }
  return files;
}

}  // namespace vitalnet
