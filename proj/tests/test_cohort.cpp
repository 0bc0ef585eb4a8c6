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

#include <algorithm>
#include <set>
#include <string>

#include <doctest.h>

#include "vitalnet/cohort.hpp"
#include "vitalnet/error.hpp"

using namespace vitalnet;

namespace {

constexpr const char* kEncHeader =
    "patient_id,encounter_id,encounter_start,covid_positive,sex,age_years,diabetes,hypertension,"
    "obesity,vaccinated,second_dose_date\n";
constexpr const char* kVitalsHeader = "encounter_id,time,kind,value\n";
constexpr const char* kEventsHeader = "encounter_id,time,kind\n";

const Timestamp kT0 = parse_timestamp("2021-03-01T00:00:00Z");

Timestamp hour(double h) { return kT0.plus_hours(h); }

// Encounter with all three vitals sampled every `step` hours over [from, to].
Encounter monitored(double from, double to, double step = 4.0) {
  Encounter e;
  e.patient_id = "P1";
  e.encounter_id = "E1";
  e.encounter_start = hour(from);
  e.covid_positive = true;
  e.age_years = 50;
  for (double t = from; t <= to + 1e-9; t += step) {
    e.vitals[0].push_back({hour(t), 96.0});
    e.vitals[1].push_back({hour(t), 80.0});
    e.vitals[2].push_back({hour(t), 98.6});
  }
  return e;
}

}  // namespace

TEST_SUITE("cohort") {
  TEST_CASE("empty vitals file joins to empty series") {
    const std::string enc = std::string(kEncHeader) +
                            "P1,E1,2021-01-01T00:00:00Z,1,female,70,none,0,0,0,\n"
                            "P2,E2,2021-01-02T00:00:00Z,1,male,40,no_comp,1,1,1,2020-12-01\n";
    const ParsedCohort c = parse_encounters(enc, kVitalsHeader, kEventsHeader);
    REQUIRE(c.encounters.size() == 2);
    CHECK(c.encounters[0].observation_count() == 0);
    CHECK(c.encounters[1].diabetes == Diabetes::kWithoutComplications);
    CHECK(c.encounters[1].second_dose_date.has_value());
    CHECK(c.rejects.size() == 0);
  }

  TEST_CASE("vitals group by encounter and sort by time") {
    const std::string enc = std::string(kEncHeader) +
                            "P1,E1,2021-01-01T00:00:00Z,1,female,70,none,0,0,0,\n"
                            "P2,E2,2021-01-02T00:00:00Z,1,male,40,none,0,0,0,\n";
    const std::string vit = std::string(kVitalsHeader) +
                            "E1,2021-01-01T05:00:00Z,hr,90\n"
                            "E2,2021-01-02T01:00:00Z,spo2,97\n"
                            "E1,2021-01-01T02:00:00Z,hr,85\n";
    const ParsedCohort c = parse_encounters(enc, vit, kEventsHeader);
    const auto& hr = c.encounters[0].series(VitalKind::kHr);
    REQUIRE(hr.size() == 2);
    CHECK(hr[0].value == 85.0);
    CHECK(hr[1].value == 90.0);
    CHECK(c.encounters[1].series(VitalKind::kSpo2).size() == 1);
    CHECK(c.encounters[1].series(VitalKind::kHr).empty());
  }

  TEST_CASE("duplicates, out-of-bounds and orphans are rejected with row numbers") {
    const std::string enc =
        std::string(kEncHeader) + "P1,E1,2021-01-01T00:00:00Z,1,female,70,none,0,0,0,\n";
    const std::string vit = std::string(kVitalsHeader) +
                            "E1,2021-01-01T05:00:00Z,hr,90\n"
                            "E1,2021-01-01T05:00:00Z,hr,91\n"
                            "E1,2021-01-01T06:00:00Z,spo2,101\n"
                            "E9,2021-01-01T06:00:00Z,temp,99\n";
    const std::string evt = std::string(kEventsHeader) +
                            "E1,2021-01-02T00:00:00Z,mortality\n"
                            "E1,2021-01-03T00:00:00Z,mortality\n";
    const ParsedCohort c = parse_encounters(enc, vit, evt);
    REQUIRE(c.rejects.size() == 4);
    CHECK(c.rejects.rows[0].row == 3);
    CHECK(c.rejects.rows[0].reason == "duplicate observation");
    CHECK(c.rejects.rows[1].row == 4);
    CHECK(c.rejects.rows[2].row == 5);
    CHECK(c.rejects.rows[3].file == "events.csv");
    CHECK(c.encounters[0].series(VitalKind::kHr)[0].value == 90.0);
    CHECK(c.encounters[0].events.size() == 1);
    CHECK(c.rejects.to_csv().starts_with("row,reason\n3,vitals.csv: duplicate observation\n"));
  }

  TEST_CASE("malformed rows raise parse errors carrying the row") {
    const std::string enc =
        std::string(kEncHeader) + "P1,E1,2021-01-01T00:00:00Z,1,female,70,none,0,0,0,\n";
    try {
      parse_encounters(enc, std::string(kVitalsHeader) + "E1,2021-01-01T05:00:00Z,hr,abc\n",
                       kEventsHeader);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.row() == 2);
    }
    CHECK_THROWS_AS(parse_encounters("wrong,header\n", kVitalsHeader, kEventsHeader), ParseError);
    CHECK_THROWS_AS(
        parse_encounters(std::string(kEncHeader) +
                             "P1,E1,2021-01-01T00:00:00Z,1,female,70,none,0,0,1,\n",
                         kVitalsHeader, kEventsHeader),
        ParseError);
    CHECK_THROWS_AS(
        parse_encounters(std::string(kEncHeader) +
                             "P1,E1,2021-01-01T00:00:00Z,1,other,70,none,0,0,0,\n",
                         kVitalsHeader, kEventsHeader),
        ParseError);
  }

  TEST_CASE("inclusion keeps the most recent covid-positive monitored encounter") {
    Encounter jan = monitored(0, 10);
    jan.encounter_id = "jan";
    jan.encounter_start = parse_timestamp("2021-01-05");
    Encounter mar = monitored(0, 10);
    mar.encounter_id = "mar";
    mar.encounter_start = parse_timestamp("2021-03-05");
    Encounter negative = monitored(0, 10);
    negative.patient_id = "P2";
    negative.covid_positive = false;
    Encounter silent = monitored(0, 10);
    silent.patient_id = "P3";
    for (auto& s : silent.vitals) s.clear();

    const auto kept = apply_inclusion_criteria({jan, mar, negative, silent});
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].encounter_id == "mar");

    std::set<std::string> patients;
    for (const auto& e : apply_inclusion_criteria({mar, jan, jan, mar})) {
      CHECK(patients.insert(e.patient_id).second);
    }
  }

  TEST_CASE("deterioration time composition") {
    Encounter e = monitored(0, 10);
    CHECK_FALSE(derive_deterioration_time(e).has_value());

    e.events = {{hour(5), EventKind::kIcuAdmission}};
    CHECK(*derive_deterioration_time(e) == hour(5));

    e.events = {{hour(48), EventKind::kIntubation}, {hour(24), EventKind::kIcuAdmission}};
    CHECK(*derive_deterioration_time(e) == hour(24));

    e.events = {{hour(24), EventKind::kIcuAdmission}, {hour(24 * 10), EventKind::kIcuAdmission}};
    CHECK(*derive_deterioration_time(e) == hour(240));

    // Exactly seven days apart is not "more than a week".
    e.events = {{hour(0), EventKind::kIcuAdmission}, {hour(168), EventKind::kIcuAdmission}};
    CHECK(*derive_deterioration_time(e) == hour(0));
  }

  TEST_CASE("positive window ends one horizon before deterioration") {
    Encounter e = monitored(0, 110, 2.0);
    e.events = {{hour(100), EventKind::kMortality}};
    const auto w = extract_window(e, 24);
    REQUIRE(w.has_value());
    CHECK(w->label == Label::kPositive);
    CHECK(w->window_end == hour(76));
    CHECK(w->window_end.plus_hours(24) == *derive_deterioration_time(e));
    for (const auto& s : w->raw_series) {
      CHECK(s.size() >= 2);
      for (const auto& o : s) {
        CHECK(o.time >= hour(52));
        CHECK(o.time <= hour(76));
      }
    }
  }

  TEST_CASE("less than 48 hours of monitoring is rejected") {
    Encounter e = monitored(60, 110, 2.0);
    e.events = {{hour(100), EventKind::kIcuAdmission}};
    CHECK_FALSE(extract_window(e, 24).has_value());
  }

  TEST_CASE("negative window ends one horizon before the last vital") {
    const Encounter e = monitored(0, 200, 2.0);
    const auto w = extract_window(e, 3);
    REQUIRE(w.has_value());
    CHECK(w->label == Label::kNegative);
    CHECK(w->window_end == hour(197));
  }

  TEST_CASE("windows need two observations of every vital") {
    Encounter e = monitored(0, 200, 2.0);
    auto& temp = e.vitals[2];
    std::erase_if(temp, [](const TimedValue& o) { return o.time > hour(150) && o.time < hour(196); });
    temp.push_back({hour(180), 98.0});
    std::sort(temp.begin(), temp.end(), [](auto& a, auto& b) { return a.time < b.time; });
    CHECK_FALSE(extract_window(e, 24).has_value());
    CHECK_THROWS_AS(extract_window(e, 5), ConfigError);
  }

  TEST_CASE("non-SEQ encoding") {
    Encounter e = monitored(0, 10);
    e.sex = Sex::kFemale;
    e.age_years = 30;
    e.diabetes = Diabetes::kWithoutComplications;
    e.hypertension = true;
    const Timestamp t = hour(0);
    NonSeqVector v = encode_nonseq(e, t);
    CHECK(v[NonSeqSlot::kSex] == 1.0);
    CHECK(v[NonSeqSlot::kAgeGroup] == 3.0);
    CHECK(v[NonSeqSlot::kDiabetesNone] == 0.0);
    CHECK(v[NonSeqSlot::kDiabetesWithout] == 1.0);
    CHECK(v[NonSeqSlot::kDiabetesWith] == 0.0);
    CHECK(v[NonSeqSlot::kHypertension] == 1.0);
    CHECK(v[NonSeqSlot::kVaccinated] == 0.0);
    CHECK(v[NonSeqSlot::kVaccinationMonths] == 0.0);

    e.vaccinated = true;
    e.second_dose_date = t.plus_hours(-95 * 24.0);
    v = encode_nonseq(e, t);
    CHECK(v[NonSeqSlot::kVaccinated] == 1.0);
    CHECK(v[NonSeqSlot::kVaccinationMonths] == 3.0);

    // A dose after the prediction time yields a negative count.
    e.second_dose_date = t.plus_hours(10 * 24.0);
    CHECK(encode_nonseq(e, t)[NonSeqSlot::kVaccinationMonths] == -1.0);

    for (Diabetes d : {Diabetes::kNone, Diabetes::kWithoutComplications,
                       Diabetes::kWithComplications}) {
      e.diabetes = d;
      const NonSeqVector enc = encode_nonseq(e, t);
      CHECK(enc[2] + enc[3] + enc[4] == 1.0);
      CHECK(decode_diabetes(enc) == d);
    }
  }

  TEST_CASE("age bins") {
    const AgeBinning bins;
    CHECK(bins.group(5) == 1);
    CHECK(bins.group(18) == 1);
    CHECK(bins.group(22) == 1);
    CHECK(bins.group(23) == 2);
    CHECK(bins.group(102) == 17);
    CHECK(bins.group(103) == 18);
    CHECK(bins.group(130) == 18);
  }

  TEST_CASE("timestamps round-trip") {
    const Timestamp t = parse_timestamp("2021-02-28T23:59:59Z");
    CHECK(format_timestamp(t) == "2021-02-28T23:59:59Z");
    CHECK(parse_timestamp("2021-03-01") == t.plus_hours(1.0 / 3600.0));
    CHECK_THROWS(parse_timestamp("2021-02-30"));
  }
}
