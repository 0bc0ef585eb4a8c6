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

#include "vitalnet/timestamp.hpp"

#include <chrono>
#include <cstdio>

#include "vitalnet/error.hpp"

namespace vitalnet {

namespace {

bool all_digits(std::string_view s) {
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return !s.empty();
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
  const bool date_only = text.size() == 10;
  if (!(date_only || (text.size() == 19 && text[10] == 'T')) || text[4] != '-' ||
      text[7] != '-') {
    throw ContractError("malformed timestamp '" + std::string(text) + "'");
  }
  const auto year = text.substr(0, 4), month = text.substr(5, 2), day = text.substr(8, 2);
  int hh = 0, mm = 0, ss = 0;
  if (!all_digits(year) || !all_digits(month) || !all_digits(day)) {
    throw ContractError("malformed timestamp '" + std::string(text) + "'");
  }
  if (!date_only) {
    const auto h = text.substr(11, 2), m = text.substr(14, 2), s = text.substr(17, 2);
    if (text[13] != ':' || text[16] != ':' || !all_digits(h) || !all_digits(m) ||
        !all_digits(s)) {
      throw ContractError("malformed timestamp '" + std::string(text) + "'");
    }
    hh = to_int(h);
    mm = to_int(m);
    ss = to_int(s);
    if (hh > 23 || mm > 59 || ss > 59) {
      throw ContractError("time of day out of range in '" + std::string(text) + "'");
    }
  }
  const std::chrono::year_month_day ymd{std::chrono::year{to_int(year)},
                                        std::chrono::month{static_cast<unsigned>(to_int(month))},
                                        std::chrono::day{static_cast<unsigned>(to_int(day))}};
  if (!ymd.ok()) throw ContractError("invalid calendar date '" + std::string(text) + "'");
  const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
  return Timestamp{static_cast<std::int64_t>(days) * kSecondsPerDay + hh * kSecondsPerHour +
                   mm * 60 + ss};
}

std::string format_timestamp(Timestamp t) {
  std::int64_t days = t.seconds / kSecondsPerDay;
  std::int64_t rem = t.seconds % kSecondsPerDay;
  if (rem < 0) {
    rem += kSecondsPerDay;
    --days;
  }
  const std::chrono::year_month_day ymd{
      std::chrono::sys_days{std::chrono::days{static_cast<int>(days)}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(rem / kSecondsPerHour), static_cast<int>(rem % kSecondsPerHour / 60),
                static_cast<int>(rem % 60));
  return buf;
}

}  // namespace vitalnet
