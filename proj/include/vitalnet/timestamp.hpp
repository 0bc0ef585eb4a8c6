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

#ifndef VITALNET_TIMESTAMP_HPP_
#define VITALNET_TIMESTAMP_HPP_

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace vitalnet {

inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 24 * kSecondsPerHour;

// Seconds since the Unix epoch, UTC.
struct Timestamp {
  std::int64_t seconds = 0;

  auto operator<=>(const Timestamp&) const = default;

  static Timestamp from_hours(double hours) {
    return Timestamp{std::llround(hours * kSecondsPerHour)};
  }
  Timestamp plus_hours(double hours) const {
    return Timestamp{seconds + std::llround(hours * kSecondsPerHour)};
  }
};

// Signed elapsed time from `from` to `to`.
inline double hours_between(Timestamp from, Timestamp to) {
  return static_cast<double>(to.seconds - from.seconds) / kSecondsPerHour;
}

// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS" and the same with a trailing
// 'Z'. Throws ContractError on anything else.
Timestamp parse_timestamp(std::string_view text);
// "YYYY-MM-DDTHH:MM:SSZ".
std::string format_timestamp(Timestamp t);

}  // namespace vitalnet

#endif  // VITALNET_TIMESTAMP_HPP_
