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

#ifndef VITALNET_IO_HPP_
#define VITALNET_IO_HPP_

// File formats: JSON-lines datasets, checkpoints, run configs and reports.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vitalnet/analysis.hpp"
#include "vitalnet/cohort.hpp"
#include "vitalnet/dataset.hpp"
#include "vitalnet/models.hpp"
#include "vitalnet/synth.hpp"
#include "vitalnet/training.hpp"

namespace vitalnet {

inline constexpr int kCheckpointFormatVersion = 1;

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary and renames, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

inline constexpr const char* kEncountersFile = "encounters.csv";
inline constexpr const char* kVitalsFile = "vitals.csv";
inline constexpr const char* kEventsFile = "events.csv";
inline constexpr const char* kRejectsFile = "rejects.csv";

void write_cohort(const std::filesystem::path& dir, const CohortFiles& files);

struct PreprocessResult {
  Dataset data;
  RejectionReport rejects;
  std::size_t encounters_included = 0;
};

PreprocessResult preprocess_cohort(std::string_view encounters_csv, std::string_view vitals_csv,
                                   std::string_view events_csv, int horizon_hours,
                                   const AgeBinning& bins = {});
PreprocessResult preprocess_directory(const std::filesystem::path& dir, int horizon_hours,
                                      const AgeBinning& bins = {});

// One object per line: window_id, horizon, label, nonseq, grid, obs_moments.
// Grids are normalized with the statistics pooled over the whole file.
std::string dataset_to_jsonl(const Dataset& data);
Dataset dataset_from_jsonl(std::string_view text);

struct Checkpoint {
  Model model;
  int horizon_hours = 24;
  NormStats stats;
};

std::string checkpoint_to_json(const Model& model, int horizon_hours, const NormStats& stats);
Checkpoint checkpoint_from_json(std::string_view text);

struct RunConfig {
  TrainConfig train;
  ModelDims dims;
  bool horizon_set = false;  // horizon_hours appeared in the file
};

// Keys are the TrainConfig field names plus optional `hidden` and
// `dilations`; unknown keys are rejected.
RunConfig run_config_from_json(std::string_view text);
std::string run_config_to_json(const RunConfig& cfg);

std::string metrics_to_json(const MetricsReport& report);

struct HorizonMetrics {
  int horizon_hours = 24;
  MetricTriple metrics;
};

// Rows are horizons; columns accuracy, auroc, auprc.
std::string horizon_summary_csv(std::span<const HorizonMetrics> rows);

struct OcclusionTable {
  int horizon_hours = 24;
  std::vector<OcclusionRow> rows;
};

// Rows are targets; columns are metric x horizon, metric-major.
std::string occlusion_csv(std::span<const OcclusionTable> tables);

struct AblationTable {
  int horizon_hours = 24;
  std::array<MetricTriple, 3> averages;  // kAblationOrder
};

// Rows are architectures; columns are metric x horizon, metric-major.
std::string ablation_csv(std::span<const AblationTable> tables);

}  // namespace vitalnet

#endif  // VITALNET_IO_HPP_
