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

#include "vitalnet/cohort.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

#include "vitalnet/error.hpp"

namespace vitalnet {

namespace {

constexpr std::string_view kEncounterHeader =
    "patient_id,encounter_id,encounter_start,covid_positive,sex,age_years,diabetes,"
    "hypertension,obesity,vaccinated,second_dose_date";
constexpr std::string_view kVitalsHeader = "encounter_id,time,kind,value";
constexpr std::string_view kEventsHeader = "encounter_id,time,kind";

constexpr std::int64_t kClusterGapSeconds = 7 * kSecondsPerDay;

struct CsvLine {
  std::size_t row;
  std::vector<std::string_view> fields;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

// Splits a table into rows of fields. Blank lines are skipped; the header
// must match exactly. Quoting is not supported: identifiers are opaque
// tokens without commas.
std::vector<CsvLine> read_table(std::string_view text, std::string_view header,
                                std::string_view file) {
  std::vector<CsvLine> lines;
  std::size_t row = 0;
  bool seen_header = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++row;
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header) {
        throw ParseError(row, std::string(file) + ": expected header '" + std::string(header) + "'");
      }
      seen_header = true;
      continue;
    }
    CsvLine out{row, {}};
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      out.fields.push_back(trim(line.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    lines.push_back(std::move(out));
  }
  return lines;
}

void expect_fields(const CsvLine& line, std::size_t n, std::string_view file) {
  if (line.fields.size() != n) {
    throw ParseError(line.row, std::string(file) + ": expected " + std::to_string(n) +
                                   " fields, found " + std::to_string(line.fields.size()));
  }
}

bool parse_flag(const CsvLine& line, std::string_view s, std::string_view column) {
  if (s == "0") return false;
  if (s == "1") return true;
  throw ParseError(line.row, std::string(column) + " must be 0 or 1, got '" + std::string(s) + "'");
}

Timestamp parse_time(const CsvLine& line, std::string_view s) {
  try {
    return parse_timestamp(s);
  } catch (const ContractError& e) {
    throw ParseError(line.row, e.what());
  }
}

double parse_double(const CsvLine& line, std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError(line.row, "invalid number '" + std::string(s) + "'");
  }
  return v;
}

int parse_int(const CsvLine& line, std::string_view s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(line.row, "invalid integer '" + std::string(s) + "'");
  }
  return v;
}

Encounter parse_encounter_row(const CsvLine& line) {
  expect_fields(line, 11, "encounters.csv");
  const auto& f = line.fields;
  Encounter e;
  e.patient_id = f[0];
  e.encounter_id = f[1];
  if (e.patient_id.empty() || e.encounter_id.empty()) {
    throw ParseError(line.row, "empty patient_id or encounter_id");
  }
  e.encounter_start = parse_time(line, f[2]);
  e.covid_positive = parse_flag(line, f[3], "covid_positive");
  if (f[4] == "male") {
    e.sex = Sex::kMale;
  } else if (f[4] == "female") {
    e.sex = Sex::kFemale;
  } else {
    throw ParseError(line.row, "sex must be male or female");
  }
  e.age_years = parse_int(line, f[5]);
  if (e.age_years < 0) throw ParseError(line.row, "negative age");
  if (f[6] == "none") {
    e.diabetes = Diabetes::kNone;
  } else if (f[6] == "no_comp") {
    e.diabetes = Diabetes::kWithoutComplications;
  } else if (f[6] == "with_comp") {
    e.diabetes = Diabetes::kWithComplications;
  } else {
    throw ParseError(line.row, "diabetes must be none, no_comp or with_comp");
  }
  e.hypertension = parse_flag(line, f[7], "hypertension");
  e.obesity = parse_flag(line, f[8], "obesity");
  e.vaccinated = parse_flag(line, f[9], "vaccinated");
  if (!f[10].empty()) e.second_dose_date = parse_time(line, f[10]);
  if (e.vaccinated != e.second_dose_date.has_value()) {
    throw ParseError(line.row, "second_dose_date must be present exactly when vaccinated");
  }
  return e;
}

std::optional<EventKind> parse_event_kind(std::string_view s) {
  if (s == "mortality") return EventKind::kMortality;
  if (s == "icu") return EventKind::kIcuAdmission;
  if (s == "intubation") return EventKind::kIntubation;
  return std::nullopt;
}

}  // namespace

std::string_view vital_name(VitalKind kind) {
  switch (kind) {
    case VitalKind::kSpo2: return "spo2";
    case VitalKind::kHr: return "hr";
    case VitalKind::kTemp: return "temp";
  }
  return "?";
}

std::optional<VitalKind> parse_vital_kind(std::string_view name) {
  for (VitalKind k : kAllVitals)
    if (vital_name(k) == name) return k;
  return std::nullopt;
}

std::string_view event_name(EventKind kind) {
  switch (kind) {
    case EventKind::kMortality: return "mortality";
    case EventKind::kIcuAdmission: return "icu";
    case EventKind::kIntubation: return "intubation";
  }
  return "?";
}

bool is_valid_horizon(int hours) {
  return std::find(kHorizons.begin(), kHorizons.end(), hours) != kHorizons.end();
}

bool vital_in_bounds(VitalKind kind, double value) {
  switch (kind) {
    case VitalKind::kSpo2: return value >= 0.0 && value <= 100.0;
    case VitalKind::kHr: return value > 0.0 && value < 400.0;
    case VitalKind::kTemp: return value > 80.0 && value < 115.0;
  }
  return false;
}

std::size_t Encounter::observation_count() const {
  std::size_t n = 0;
  for (const auto& s : vitals) n += s.size();
  return n;
}

std::optional<Timestamp> Encounter::first_observation() const {
  std::optional<Timestamp> first;
  for (const auto& s : vitals)
    if (!s.empty() && (!first || s.front().time < *first)) first = s.front().time;
  return first;
}

std::optional<Timestamp> Encounter::last_observation() const {
  std::optional<Timestamp> last;
  for (const auto& s : vitals)
    if (!s.empty() && (!last || s.back().time > *last)) last = s.back().time;
  return last;
}

void RejectionReport::merge(const RejectionReport& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

std::string RejectionReport::to_csv() const {
  std::string out = "row,reason\n";
  for (const auto& r : rows) {
    out += std::to_string(r.row);
    out += ',';
    out += r.file + ": " + r.reason;
    out += '\n';
  }
  return out;
}

ParsedCohort parse_encounters(std::string_view encounters_csv, std::string_view vitals_csv,
                              std::string_view events_csv) {
  ParsedCohort out;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& line : read_table(encounters_csv, kEncounterHeader, "encounters.csv")) {
    Encounter e = parse_encounter_row(line);
    if (!index.emplace(e.encounter_id, out.encounters.size()).second) {
      throw ParseError(line.row, "duplicate encounter_id '" + e.encounter_id + "'");
    }
    out.encounters.push_back(std::move(e));
  }

  // Vitals: reject in file order, then sort each series by time.
  std::set<std::tuple<std::size_t, int, std::int64_t>> seen;
  for (const auto& line : read_table(vitals_csv, kVitalsHeader, "vitals.csv")) {
    expect_fields(line, 4, "vitals.csv");
    const auto& f = line.fields;
    const Timestamp t = parse_time(line, f[1]);
    const auto kind = parse_vital_kind(f[2]);
    if (!kind) throw ParseError(line.row, "unknown vital kind '" + std::string(f[2]) + "'");
    const double value = parse_double(line, f[3]);
    const auto it = index.find(std::string(f[0]));
    if (it == index.end()) {
      out.rejects.rows.push_back({"vitals.csv", line.row, "unknown encounter_id"});
      continue;
    }
    if (!vital_in_bounds(*kind, value)) {
      out.rejects.rows.push_back({"vitals.csv", line.row,
                                  std::string(vital_name(*kind)) + " value out of bounds"});
      continue;
    }
    if (!seen.emplace(it->second, static_cast<int>(*kind), t.seconds).second) {
      out.rejects.rows.push_back({"vitals.csv", line.row, "duplicate observation"});
      continue;
    }
    out.encounters[it->second].vitals[static_cast<std::size_t>(*kind)].push_back({t, value});
  }
  for (auto& e : out.encounters) {
    for (auto& s : e.vitals) {
      std::stable_sort(s.begin(), s.end(), [](const TimedValue& a, const TimedValue& b) {
        return a.time < b.time;
      });
    }
  }

  for (const auto& line : read_table(events_csv, kEventsHeader, "events.csv")) {
    expect_fields(line, 3, "events.csv");
    const auto& f = line.fields;
    const Timestamp t = parse_time(line, f[1]);
    const auto kind = parse_event_kind(f[2]);
    if (!kind) throw ParseError(line.row, "unknown event kind '" + std::string(f[2]) + "'");
    const auto it = index.find(std::string(f[0]));
    if (it == index.end()) {
      out.rejects.rows.push_back({"events.csv", line.row, "unknown encounter_id"});
      continue;
    }
    auto& events = out.encounters[it->second].events;
    if (*kind == EventKind::kMortality &&
        std::any_of(events.begin(), events.end(),
                    [](const AdverseEvent& a) { return a.kind == EventKind::kMortality; })) {
      out.rejects.rows.push_back({"events.csv", line.row, "second mortality event"});
      continue;
    }
    events.push_back({t, *kind});
  }
  return out;
}

std::vector<Encounter> apply_inclusion_criteria(const std::vector<Encounter>& encounters) {
  // Latest start wins; among equal starts the later record wins.
  std::map<std::string, std::size_t> latest;
  for (std::size_t i = 0; i < encounters.size(); ++i) {
    auto [it, inserted] = latest.emplace(encounters[i].patient_id, i);
    if (!inserted && encounters[i].encounter_start >= encounters[it->second].encounter_start) {
      it->second = i;
    }
  }
  std::vector<Encounter> kept;
  for (std::size_t i = 0; i < encounters.size(); ++i) {
    const Encounter& e = encounters[i];
    if (latest.at(e.patient_id) != i) continue;
    if (!e.covid_positive) continue;
    if (e.observation_count() == 0) continue;
    kept.push_back(e);
  }
  return kept;
}

std::optional<Timestamp> derive_deterioration_time(const Encounter& encounter) {
  std::optional<Timestamp> earliest;
  for (EventKind kind : {EventKind::kMortality, EventKind::kIcuAdmission, EventKind::kIntubation}) {
    std::vector<Timestamp> times;
    for (const auto& ev : encounter.events)
      if (ev.kind == kind) times.push_back(ev.time);
    if (times.empty()) continue;
    std::sort(times.begin(), times.end());
    // Start of the latest cluster: the first event after the last gap that
    // exceeds a week.
    Timestamp cluster_start = times.front();
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (times[i].seconds - times[i - 1].seconds > kClusterGapSeconds) cluster_start = times[i];
    }
    if (!earliest || cluster_start < *earliest) earliest = cluster_start;
  }
  return earliest;
}

int AgeBinning::group(int age_years) const {
  if (age_years < first_edge) return 1;
  return std::min(count, 1 + (age_years - first_edge) / width);
}

NonSeqVector encode_nonseq(const Encounter& encounter, Timestamp prediction_time,
                           const AgeBinning& bins) {
  NonSeqVector v{};
  v[NonSeqSlot::kSex] = encounter.sex == Sex::kFemale ? 1.0 : 0.0;
  v[NonSeqSlot::kAgeGroup] = bins.group(encounter.age_years);
  v[NonSeqSlot::kDiabetesNone] = encounter.diabetes == Diabetes::kNone ? 1.0 : 0.0;
  v[NonSeqSlot::kDiabetesWithout] =
      encounter.diabetes == Diabetes::kWithoutComplications ? 1.0 : 0.0;
  v[NonSeqSlot::kDiabetesWith] = encounter.diabetes == Diabetes::kWithComplications ? 1.0 : 0.0;
  v[NonSeqSlot::kHypertension] = encounter.hypertension ? 1.0 : 0.0;
  v[NonSeqSlot::kObesity] = encounter.obesity ? 1.0 : 0.0;
  if (encounter.vaccinated && encounter.second_dose_date) {
    v[NonSeqSlot::kVaccinated] = 1.0;
    const double days = static_cast<double>(prediction_time.seconds -
                                            encounter.second_dose_date->seconds) /
                        kSecondsPerDay;
    // Negative when the second dose falls after the prediction time.
    v[NonSeqSlot::kVaccinationMonths] = std::floor(days / 30.0);
  }
  return v;
}

Diabetes decode_diabetes(const NonSeqVector& v) {
  if (v[NonSeqSlot::kDiabetesWithout] == 1.0) return Diabetes::kWithoutComplications;
  if (v[NonSeqSlot::kDiabetesWith] == 1.0) return Diabetes::kWithComplications;
  return Diabetes::kNone;
}

std::optional<LabeledWindow> extract_window(const Encounter& encounter, int horizon_hours,
                                            const AgeBinning& bins) {
  if (!is_valid_horizon(horizon_hours)) {
    throw ConfigError("horizon must be one of 3,6,...,24 hours, got " +
                      std::to_string(horizon_hours));
  }
  const auto first = encounter.first_observation();
  if (!first) return std::nullopt;
  const auto deterioration = derive_deterioration_time(encounter);
  const Timestamp reference = deterioration ? *deterioration : *encounter.last_observation();
  if (*first > reference.plus_hours(-kRequiredCoverageHours)) return std::nullopt;

  LabeledWindow w;
  w.encounter_id = encounter.encounter_id;
  w.horizon_hours = horizon_hours;
  w.label = deterioration ? Label::kPositive : Label::kNegative;
  w.window_end = reference.plus_hours(-horizon_hours);
  const Timestamp window_start = w.window_end.plus_hours(-kWindowHours);
  for (std::size_t k = 0; k < kNumVitals; ++k) {
    for (const auto& obs : encounter.vitals[k]) {
      if (obs.time >= window_start && obs.time <= w.window_end) w.raw_series[k].push_back(obs);
    }
    if (w.raw_series[k].size() < 2) return std::nullopt;
  }
  w.nonseq = encode_nonseq(encounter, w.window_end, bins);
  return w;
}

}  // namespace vitalnet
