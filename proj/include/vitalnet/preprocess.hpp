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

#ifndef VITALNET_PREPROCESS_HPP_
#define VITALNET_PREPROCESS_HPP_

// Irregular vital-sign series to the fixed 96 x 3 grid: Z-score, natural
// cubic spline, 15-minute resampling.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "vitalnet/cohort.hpp"

namespace vitalnet {

inline constexpr std::size_t kGridSteps = 96;
inline constexpr double kGridStepHours = 0.25;
inline constexpr double kSdFloor = 1e-8;

// Hours relative to the window end for step k in [1, 96]; step 96 is t = 0.
inline double grid_time(std::size_t k) { return -kWindowHours + kGridStepHours * k; }

struct VitalStats {
  double mean = 0.0;
  double sd = 0.0;  // population standard deviation
};

struct NormStats {
  std::array<VitalStats, kNumVitals> vitals{};
  const VitalStats& operator[](VitalKind k) const { return vitals[static_cast<std::size_t>(k)]; }
  VitalStats& operator[](VitalKind k) { return vitals[static_cast<std::size_t>(k)]; }
};

// Count, mean and sum of squared deviations of a set of observations.
// Combining is exact up to rounding, so pooled statistics can be rebuilt
// from per-window summaries.
struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  static Moments of(std::span<const double> values);
  static Moments combine(const Moments& a, const Moments& b);
  double population_sd() const;
};

using WindowMoments = std::array<Moments, kNumVitals>;

WindowMoments observation_moments(const LabeledWindow& window);

// Pooled per-vital mean and population SD over every raw observation.
// Throws ContractError when a vital has no observations at all.
NormStats fit_normalizer(std::span<const LabeledWindow> training_windows);
NormStats fit_normalizer(std::span<const WindowMoments> window_moments);

std::vector<double> zscore(std::span<const double> values, const VitalStats& stats);

class SplineModel {
 public:
  // Natural cubic spline through (times[i], values[i]); times strictly
  // increasing, at least two knots.
  static SplineModel fit(std::span<const double> times, std::span<const double> values);

  // Value at t; outside the knot range the nearest knot value is held.
  double operator()(double t) const;
  // Second derivative at t inside the knot range.
  double second_derivative(double t) const;

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& second_derivatives() const { return m_; }

 private:
  std::size_t segment(double t) const;

  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> m_;
};

inline SplineModel spline_fit(std::span<const double> times, std::span<const double> values) {
  return SplineModel::fit(times, values);
}

// The spline evaluated at the 96 grid times (hours relative to window end).
std::array<double, kGridSteps> resample(const SplineModel& spline);

// Row-major [step][vital] grid of normalized values.
struct SeqGrid {
  std::vector<double> values = std::vector<double>(kGridSteps * kNumVitals, 0.0);

  double at(std::size_t step, std::size_t vital) const { return values[step * kNumVitals + vital]; }
  double& at(std::size_t step, std::size_t vital) { return values[step * kNumVitals + vital]; }
};

SeqGrid build_seq_grid(const LabeledWindow& window, const NormStats& stats);

// Re-expresses a grid normalized with `from` in terms of `to`. Exact up to
// rounding because every preprocessing step is affine in the values.
void renormalize(SeqGrid& grid, const NormStats& from, const NormStats& to);

}  // namespace vitalnet

#endif  // VITALNET_PREPROCESS_HPP_
