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

#ifndef VITALNET_DATASET_HPP_
#define VITALNET_DATASET_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vitalnet/cohort.hpp"
#include "vitalnet/preprocess.hpp"

namespace vitalnet {

// One preprocessed window. `grid` is normalized with the owning dataset's
// statistics; `moments` summarize the raw observations so that statistics
// for any subset can be refitted without the raw series.
struct Sample {
  std::string window_id;
  int horizon_hours = 24;
  int label = 0;
  NonSeqVector nonseq{};
  SeqGrid grid;
  WindowMoments moments{};
};

struct Dataset {
  int horizon_hours = 24;
  NormStats stats;
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  std::size_t positives() const;
};

// Normalizes with statistics pooled over all `windows`.
Dataset build_dataset(std::span<const LabeledWindow> windows, int horizon_hours);

// Copies the samples at `indices`, re-expressed under `stats`.
Dataset subset(const Dataset& data, std::span<const std::size_t> indices, const NormStats& stats);

// Statistics pooled over the raw observations of the samples at `indices`.
NormStats fit_normalizer(const Dataset& data, std::span<const std::size_t> indices);

}  // namespace vitalnet

#endif  // VITALNET_DATASET_HPP_
