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

#include "vitalnet/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vitalnet/error.hpp"

namespace vitalnet {

Moments Moments::of(std::span<const double> values) {
  Moments m;
  if (values.empty()) return m;
  m.count = static_cast<double>(values.size());
  double total = 0.0;
  for (double v : values) total += v;
  m.mean = total / m.count;
  for (double v : values) m.m2 += (v - m.mean) * (v - m.mean);
  return m;
}

Moments Moments::combine(const Moments& a, const Moments& b) {
  if (a.count == 0.0) return b;
  if (b.count == 0.0) return a;
  Moments out;
  out.count = a.count + b.count;
  const double delta = b.mean - a.mean;
  out.mean = a.mean + delta * (b.count / out.count);
  out.m2 = a.m2 + b.m2 + delta * delta * (a.count * b.count / out.count);
  return out;
}

double Moments::population_sd() const {
  return count > 0.0 ? std::sqrt(std::max(0.0, m2 / count)) : 0.0;
}

WindowMoments observation_moments(const LabeledWindow& window) {
  WindowMoments out;
  for (std::size_t k = 0; k < kNumVitals; ++k) {
    std::vector<double> v;
    v.reserve(window.raw_series[k].size());
    for (const auto& o : window.raw_series[k]) v.push_back(o.value);
    out[k] = Moments::of(v);
  }
  return out;
}

NormStats fit_normalizer(std::span<const WindowMoments> window_moments) {
  std::array<Moments, kNumVitals> pooled{};
  for (const auto& wm : window_moments)
    for (std::size_t k = 0; k < kNumVitals; ++k) pooled[k] = Moments::combine(pooled[k], wm[k]);
  NormStats stats;
  for (std::size_t k = 0; k < kNumVitals; ++k) {
    if (pooled[k].count == 0.0) {
      throw ContractError("no " + std::string(vital_name(kAllVitals[k])) +
                          " observations to fit normalization statistics");
    }
    stats.vitals[k] = {pooled[k].mean, pooled[k].population_sd()};
  }
  return stats;
}

NormStats fit_normalizer(std::span<const LabeledWindow> training_windows) {
  std::vector<WindowMoments> moments;
  moments.reserve(training_windows.size());
  for (const auto& w : training_windows) moments.push_back(observation_moments(w));
  return fit_normalizer(std::span<const WindowMoments>(moments));
}

std::vector<double> zscore(std::span<const double> values, const VitalStats& stats) {
  const double sd = std::max(stats.sd, kSdFloor);
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - stats.mean) / sd;
  return out;
}

SplineModel SplineModel::fit(std::span<const double> times, std::span<const double> values) {
  const std::size_t n = times.size();
  if (n < 2) throw ContractError("spline needs at least two knots");
  if (values.size() != n) throw ContractError("spline knots and values differ in length");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(times[i] > times[i - 1])) throw ContractError("spline knots must be strictly increasing");
  }
  SplineModel s;
  s.knots_.assign(times.begin(), times.end());
  s.values_.assign(values.begin(), values.end());
  s.m_.assign(n, 0.0);
  if (n == 2) return s;

  // Interior second derivatives from the tridiagonal system
  //   h[i-1] M[i-1] + 2 (h[i-1] + h[i]) M[i] + h[i] M[i+1]
  //     = 6 ((y[i+1] - y[i]) / h[i] - (y[i] - y[i-1]) / h[i-1]),
  // with M[0] = M[n-1] = 0, solved by forward elimination.
  const std::size_t m = n - 2;
  std::vector<double> diag(m), upper(m), rhs(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t i = j + 1;
    const double h0 = times[i] - times[i - 1];
    const double h1 = times[i + 1] - times[i];
    diag[j] = 2.0 * (h0 + h1);
    upper[j] = h1;
    rhs[j] = 6.0 * ((values[i + 1] - values[i]) / h1 - (values[i] - values[i - 1]) / h0);
  }
  for (std::size_t j = 1; j < m; ++j) {
    const double lower = times[j + 1] - times[j];  // h[i-1] for row j
    const double w = lower / diag[j - 1];
    diag[j] -= w * upper[j - 1];
    rhs[j] -= w * rhs[j - 1];
  }
  s.m_[m] = rhs[m - 1] / diag[m - 1];
  for (std::size_t j = m - 1; j-- > 0;) s.m_[j + 1] = (rhs[j] - upper[j] * s.m_[j + 2]) / diag[j];
  return s;
}

std::size_t SplineModel::segment(double t) const {
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - knots_.begin());
  return std::clamp<std::size_t>(hi, 1, knots_.size() - 1) - 1;
}

double SplineModel::operator()(double t) const {
  if (t <= knots_.front()) return values_.front();
  if (t >= knots_.back()) return values_.back();
  const std::size_t i = segment(t);
  const double h = knots_[i + 1] - knots_[i];
  const double a = (knots_[i + 1] - t) / h;
  const double b = 1.0 - a;
  return a * values_[i] + b * values_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double SplineModel::second_derivative(double t) const {
  if (t <= knots_.front()) return m_.front();
  if (t >= knots_.back()) return m_.back();
  const std::size_t i = segment(t);
  const double a = (knots_[i + 1] - t) / (knots_[i + 1] - knots_[i]);
  return a * m_[i] + (1.0 - a) * m_[i + 1];
}

std::array<double, kGridSteps> resample(const SplineModel& spline) {
  std::array<double, kGridSteps> out{};
  for (std::size_t k = 1; k <= kGridSteps; ++k) out[k - 1] = spline(grid_time(k));
  return out;
}

SeqGrid build_seq_grid(const LabeledWindow& window, const NormStats& stats) {
  SeqGrid grid;
  for (std::size_t v = 0; v < kNumVitals; ++v) {
    const auto& series = window.raw_series[v];
    std::vector<double> times, raw;
    times.reserve(series.size());
    raw.reserve(series.size());
    for (const auto& o : series) {
      times.push_back(hours_between(window.window_end, o.time));
      raw.push_back(o.value);
    }
    const auto normalized = zscore(raw, stats.vitals[v]);
    const auto column = resample(spline_fit(times, normalized));
    for (std::size_t k = 0; k < kGridSteps; ++k) grid.at(k, v) = column[k];
  }
  return grid;
}

void renormalize(SeqGrid& grid, const NormStats& from, const NormStats& to) {
  for (std::size_t v = 0; v < kNumVitals; ++v) {
    const double from_sd = std::max(from.vitals[v].sd, kSdFloor);
    const double to_sd = std::max(to.vitals[v].sd, kSdFloor);
    const double scale = from_sd / to_sd;
    const double shift = (from.vitals[v].mean - to.vitals[v].mean) / to_sd;
    for (std::size_t k = 0; k < kGridSteps; ++k) grid.at(k, v) = grid.at(k, v) * scale + shift;
  }
}

}  // namespace vitalnet
