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

#ifndef VITALNET_ANALYSIS_HPP_
#define VITALNET_ANALYSIS_HPP_

// Occlusion sensitivity and the three-architecture ablation.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vitalnet/dataset.hpp"
#include "vitalnet/metrics.hpp"
#include "vitalnet/models.hpp"
#include "vitalnet/training.hpp"

namespace vitalnet {

enum class OcclusionKind { kNonSeq, kSeqChannel };

struct OcclusionTarget {
  std::string_view name;
  OcclusionKind kind;
  std::vector<std::size_t> slots;  // nonseq slots or a single grid column
};

// The ten targets in reporting order: sex, obesity, age, diabetes,
// hypertension, vac_time, vac_status, hr, spo2, temperature.
const std::vector<OcclusionTarget>& occlusion_targets();
// Throws ConfigError for an unknown name.
const OcclusionTarget& occlusion_target(std::string_view name);

// Copy of `sample` with the target's inputs set to zero. SEQ channels are
// zeroed in normalized units, i.e. pinned to the training mean.
Sample occlude(const Sample& sample, const OcclusionTarget& target);

struct OcclusionRow {
  std::string target;  // "None" for the unmodified input
  MetricTriple metrics;
};

// Row "None" followed by one row per target, evaluated on `data`.
std::vector<OcclusionRow> occlusion_report(const Model& model, const Dataset& data);

// Per-fold occlusion reports of a cross-validation run, averaged.
std::vector<OcclusionRow> occlusion_report(const CrossValidation& cv, const Dataset& data);

struct AblationResult {
  std::array<CrossValidation, 3> runs;  // svs, mlvs, nshs
};

inline constexpr std::array<Architecture, 3> kAblationOrder{Architecture::kSvs, Architecture::kMlvs,
                                                             Architecture::kNshs};

// Cross-validates the three architectures with the same configuration, and
// therefore the same fold assignment.
AblationResult ablation_run(const Dataset& data, const TrainConfig& cfg,
                            const ModelDims& dims = {}, int jobs = 1);

}  // namespace vitalnet

#endif  // VITALNET_ANALYSIS_HPP_
