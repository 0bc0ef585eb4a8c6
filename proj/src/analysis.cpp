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

#include "vitalnet/analysis.hpp"

#include <algorithm>

#include "vitalnet/error.hpp"

namespace vitalnet {

const std::vector<OcclusionTarget>& occlusion_targets() {
  static const std::vector<OcclusionTarget> targets{
      {"sex", OcclusionKind::kNonSeq, {NonSeqSlot::kSex}},
      {"obesity", OcclusionKind::kNonSeq, {NonSeqSlot::kObesity}},
      {"age", OcclusionKind::kNonSeq, {NonSeqSlot::kAgeGroup}},
      {"diabetes",
       OcclusionKind::kNonSeq,
       {NonSeqSlot::kDiabetesNone, NonSeqSlot::kDiabetesWithout, NonSeqSlot::kDiabetesWith}},
      {"hypertension", OcclusionKind::kNonSeq, {NonSeqSlot::kHypertension}},
      {"vac_time", OcclusionKind::kNonSeq, {NonSeqSlot::kVaccinationMonths}},
      {"vac_status", OcclusionKind::kNonSeq, {NonSeqSlot::kVaccinated}},
      {"hr", OcclusionKind::kSeqChannel, {static_cast<std::size_t>(VitalKind::kHr)}},
      {"spo2", OcclusionKind::kSeqChannel, {static_cast<std::size_t>(VitalKind::kSpo2)}},
      {"temperature", OcclusionKind::kSeqChannel, {static_cast<std::size_t>(VitalKind::kTemp)}},
  };
  return targets;
}

const OcclusionTarget& occlusion_target(std::string_view name) {
  for (const auto& t : occlusion_targets())
    if (t.name == name) return t;
  throw ConfigError("unknown occlusion target '" + std::string(name) + "'");
}

Sample occlude(const Sample& sample, const OcclusionTarget& target) {
  Sample out = sample;
  if (target.kind == OcclusionKind::kNonSeq) {
    for (std::size_t slot : target.slots) out.nonseq.at(slot) = 0.0;
  } else {
    const std::size_t column = target.slots.at(0);
    for (std::size_t k = 0; k < kGridSteps; ++k) out.grid.at(k, column) = 0.0;
  }
  return out;
}

namespace {

MetricTriple evaluate(const Model& model, const Dataset& data) {
  std::vector<int> labels;
  labels.reserve(data.size());
  for (const auto& s : data.samples) labels.push_back(s.label);
  return evaluate_scores(score_dataset(model, data), labels);
}

}  // namespace

std::vector<OcclusionRow> occlusion_report(const Model& model, const Dataset& data) {
  std::vector<OcclusionRow> rows;
  rows.push_back({"None", evaluate(model, data)});
  for (const auto& target : occlusion_targets()) {
    Dataset occluded;
    occluded.horizon_hours = data.horizon_hours;
    occluded.stats = data.stats;
    occluded.samples.reserve(data.size());
    for (const auto& s : data.samples) occluded.samples.push_back(occlude(s, target));
    rows.push_back({std::string(target.name), evaluate(model, occluded)});
  }
  return rows;
}

std::vector<OcclusionRow> occlusion_report(const CrossValidation& cv, const Dataset& data) {
  std::vector<OcclusionRow> mean_rows;
  const double k = static_cast<double>(cv.folds.size());
  for (const auto& fold : cv.folds) {
    const Dataset val = subset(data, fold.val_indices, fold.stats);
    const auto rows = occlusion_report(fold.model, val);
    if (mean_rows.empty()) {
      for (const auto& r : rows) mean_rows.push_back({r.target, {}});
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      mean_rows[i].metrics.accuracy += rows[i].metrics.accuracy / k;
      mean_rows[i].metrics.auroc += rows[i].metrics.auroc / k;
      mean_rows[i].metrics.auprc += rows[i].metrics.auprc / k;
    }
  }
  return mean_rows;
}

AblationResult ablation_run(const Dataset& data, const TrainConfig& cfg, const ModelDims& dims,
                            int jobs) {
  return AblationResult{{cross_validate(data, cfg, Architecture::kSvs, dims, jobs),
                         cross_validate(data, cfg, Architecture::kMlvs, dims, jobs),
                         cross_validate(data, cfg, Architecture::kNshs, dims, jobs)}};
}

}  // namespace vitalnet
