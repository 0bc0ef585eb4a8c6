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

#ifndef VITALNET_COHORT_HPP_
#define VITALNET_COHORT_HPP_

// Encounter records, inclusion filtering, deterioration labelling and the
// cutting of 24-hour input windows.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vitalnet/timestamp.hpp"

namespace vitalnet {

enum class Sex { kMale, kFemale };
enum class Diabetes { kNone, kWithoutComplications, kWithComplications };
enum class EventKind { kMortality, kIcuAdmission, kIntubation };

// Column order of the SEQ grid.
enum class VitalKind { kSpo2 = 0, kHr = 1, kTemp = 2 };
inline constexpr std::size_t kNumVitals = 3;
inline constexpr std::array<VitalKind, kNumVitals> kAllVitals{VitalKind::kSpo2, VitalKind::kHr,
                                                              VitalKind::kTemp};

inline constexpr std::array<int, 8> kHorizons{3, 6, 9, 12, 15, 18, 21, 24};
inline constexpr double kWindowHours = 24.0;
inline constexpr double kRequiredCoverageHours = 48.0;

std::string_view vital_name(VitalKind kind);
std::optional<VitalKind> parse_vital_kind(std::string_view name);
std::string_view event_name(EventKind kind);
bool is_valid_horizon(int hours);
// True when `value` is inside the physiological sanity bounds for `kind`.
bool vital_in_bounds(VitalKind kind, double value);

struct TimedValue {
  Timestamp time;
  double value = 0.0;
};

// Observations of one vital sign, strictly increasing in time.
using VitalSeries = std::vector<TimedValue>;

struct VitalObservation {
  Timestamp time;
  VitalKind kind = VitalKind::kSpo2;
  double value = 0.0;
};

struct AdverseEvent {
  Timestamp time;
  EventKind kind = EventKind::kMortality;
};

struct Encounter {
  std::string patient_id;
  std::string encounter_id;
  Timestamp encounter_start;
  bool covid_positive = false;
  Sex sex = Sex::kMale;
  int age_years = 0;
  Diabetes diabetes = Diabetes::kNone;
  bool hypertension = false;
  bool obesity = false;
  bool vaccinated = false;
  std::optional<Timestamp> second_dose_date;
  std::array<VitalSeries, kNumVitals> vitals;
  std::vector<AdverseEvent> events;

  const VitalSeries& series(VitalKind kind) const { return vitals[static_cast<std::size_t>(kind)]; }
  std::size_t observation_count() const;
  std::optional<Timestamp> first_observation() const;
  std::optional<Timestamp> last_observation() const;
};

// Fixed layout of the static feature vector.
struct NonSeqSlot {
  static constexpr std::size_t kSex = 0;
  static constexpr std::size_t kAgeGroup = 1;
  static constexpr std::size_t kDiabetesNone = 2;
  static constexpr std::size_t kDiabetesWithout = 3;
  static constexpr std::size_t kDiabetesWith = 4;
  static constexpr std::size_t kHypertension = 5;
  static constexpr std::size_t kVaccinated = 6;
  static constexpr std::size_t kVaccinationMonths = 7;
  static constexpr std::size_t kObesity = 8;
};
inline constexpr std::size_t kNonSeqSize = 9;
using NonSeqVector = std::array<double, kNonSeqSize>;

enum class Label { kNegative = 0, kPositive = 1 };

struct LabeledWindow {
  std::string encounter_id;
  int horizon_hours = 24;
  Label label = Label::kNegative;
  Timestamp window_end;
  std::array<VitalSeries, kNumVitals> raw_series;
  NonSeqVector nonseq{};

  const VitalSeries& series(VitalKind kind) const {
    return raw_series[static_cast<std::size_t>(kind)];
  }
};

struct RejectedRow {
  std::string file;
  std::size_t row = 0;  // 1-based line number, header is row 1
  std::string reason;
};

struct RejectionReport {
  std::vector<RejectedRow> rows;
  std::size_t size() const { return rows.size(); }
  void merge(const RejectionReport& other);
  // "row,reason" CSV.
  std::string to_csv() const;
};

struct ParsedCohort {
  std::vector<Encounter> encounters;
  RejectionReport rejects;
};

// Joins the three CSV tables on encounter_id. Structural problems throw
// ParseError; out-of-bounds vitals, duplicates and orphaned rows are
// rejected and listed in the report instead.
ParsedCohort parse_encounters(std::string_view encounters_csv, std::string_view vitals_csv,
                              std::string_view events_csv);

// Most recent encounter per patient, then COVID positive, then at least one
// vital observation. Relative order is preserved.
std::vector<Encounter> apply_inclusion_criteria(const std::vector<Encounter>& encounters);

// Per event kind, same-kind events more than a week apart only count from
// the latest cluster on; the earliest surviving time across kinds wins.
std::optional<Timestamp> derive_deterioration_time(const Encounter& encounter);

struct AgeBinning {
  int first_edge = 18;
  int width = 5;
  int count = 18;
  int group(int age_years) const;
};

NonSeqVector encode_nonseq(const Encounter& encounter, Timestamp prediction_time,
                           const AgeBinning& bins = {});
// Inverse of the one-hot diabetes slots.
Diabetes decode_diabetes(const NonSeqVector& v);

std::optional<LabeledWindow> extract_window(const Encounter& encounter, int horizon_hours,
                                            const AgeBinning& bins = {});

}  // namespace vitalnet

#endif  // VITALNET_COHORT_HPP_
