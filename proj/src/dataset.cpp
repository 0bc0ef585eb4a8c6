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

#include "vitalnet/dataset.hpp"

#include <algorithm>

#include "vitalnet/error.hpp"

namespace vitalnet {

std::size_t Dataset::positives() const {
  return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(),
                                                [](const Sample& s) { return s.label == 1; }));
}

Dataset build_dataset(std::span<const LabeledWindow> windows, int horizon_hours) {
  Dataset data;
  data.horizon_hours = horizon_hours;
  std::vector<WindowMoments> moments;
  moments.reserve(windows.size());
  for (const auto& w : windows) moments.push_back(observation_moments(w));
  data.stats = fit_normalizer(std::span<const WindowMoments>(moments));
  data.samples.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& w = windows[i];
    Sample s;
    s.window_id = w.encounter_id;
    s.horizon_hours = w.horizon_hours;
    s.label = w.label == Label::kPositive ? 1 : 0;
    s.nonseq = w.nonseq;
    s.grid = build_seq_grid(w, data.stats);
    s.moments = moments[i];
    data.samples.push_back(std::move(s));
  }
  return data;
}

NormStats fit_normalizer(const Dataset& data, std::span<const std::size_t> indices) {
  std::vector<WindowMoments> moments;
  moments.reserve(indices.size());
  for (std::size_t i : indices) moments.push_back(data.samples.at(i).moments);
  return fit_normalizer(std::span<const WindowMoments>(moments));
}

Dataset subset(const Dataset& data, std::span<const std::size_t> indices, const NormStats& stats) {
  Dataset out;
  out.horizon_hours = data.horizon_hours;
  out.stats = stats;
  out.samples.reserve(indices.size());
  for (std::size_t i : indices) {
    Sample s = data.samples.at(i);
    renormalize(s.grid, data.stats, stats);
    out.samples.push_back(std::move(s));
  }
  return out;
}

}  // namespace vitalnet
