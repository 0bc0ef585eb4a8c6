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

#ifndef VITALNET_TRAINING_HPP_
#define VITALNET_TRAINING_HPP_

// Focal loss, ADAM, the three-phase freeze/fine-tune protocol with early
// stopping, and stratified k-fold cross-validation.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vitalnet/dataset.hpp"
#include "vitalnet/metrics.hpp"
#include "vitalnet/models.hpp"
#include "vitalnet/numcore.hpp"

namespace vitalnet {

struct TrainConfig {
  int epochs = 200;  // per phase
  double lr_phase12 = 1e-4;
  double lr_phase3 = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int patience = 100;
  double focal_gamma = 2.0;
  double focal_alpha = 0.75;
  int batch_size = 64;
  int folds = 3;
  std::uint64_t seed = 0;
  int horizon_hours = 24;

  // Throws ConfigError on non-positive sizes, alpha outside (0, 1) or an
  // unknown horizon.
  void validate() const;
};

inline constexpr double kProbabilityClamp = 1e-7;

// Loss of one prediction after clamping p to [1e-7, 1 - 1e-7].
double focal_loss(double p, int y, double gamma, double alpha);

// Mean focal loss over a [batch x 1] probability tensor.
nc::Tensor focal_loss(nc::Graph& g, const nc::Tensor& probabilities, std::span<const double> labels,
                      double gamma, double alpha);

struct AdamSlot {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;
};

// Moments for every parameter of a ParamSet, zero-initialized.
struct AdamState {
  std::vector<std::pair<std::string, AdamSlot>> slots;

  static AdamState for_params(const ParamSet& params);
  const AdamSlot& at(std::string_view name) const;
  AdamSlot& at(std::string_view name);
};

struct AdamHyper {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// One bias-corrected ADAM update of every parameter that requires a
// gradient. Frozen parameters and their slots are left untouched. Throws
// ContractError when a trainable parameter has no gradient.
void adam_step(ParamSet& params, AdamState& state, const AdamHyper& hyper);

// Fold membership (sorted indices). Positives and negatives are shuffled
// separately and dealt round-robin; negatives continue where the positives
// stopped so fold sizes also differ by at most one.
std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const int> labels, int k,
                                                       std::uint64_t seed);

struct EpochRecord {
  int phase = 1;
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_auroc = 0.0;
  double val_auprc = 0.0;
  double val_accuracy = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::array<int, 3> best_epoch{0, 0, 0};  // per phase, 0 when the phase did not run

  std::string to_csv() const;
};

// Optional callbacks used by tests and tooling to inspect a run.
struct TrainHooks {
  std::function<void(int phase, const Model&, const AdamState&)> on_phase_start;
  std::function<void(int phase, int epoch, const Model&, const AdamState&)> on_epoch_end;
  std::function<void(int phase, const Model&, const AdamState&)> on_phase_end;
};

struct TrainResult {
  Model model;
  TrainHistory history;
};

// Three phases for SVS-Net and MLVS-Net (SEQ branch with auxiliary head;
// fusion layers with the SEQ branch frozen; everything at lr_phase3), a
// single phase for nSHS-Net. Each phase keeps its minimum-validation-loss
// weights. Both datasets must already share normalization statistics.
TrainResult train_three_phase(const Dataset& train, const Dataset& val, const TrainConfig& cfg,
                              Architecture arch, const ModelDims& dims = {},
                              const TrainHooks& hooks = {});

struct FoldResult {
  int fold = 0;
  std::vector<std::size_t> val_indices;
  NormStats stats;
  Model model;
  TrainHistory history;
  MetricTriple metrics;
  std::vector<double> val_scores;
};

struct MetricsReport {
  int horizon_hours = 24;
  Architecture architecture = Architecture::kSvs;
  std::vector<MetricTriple> per_fold;
  MetricTriple average;
};

struct CrossValidation {
  MetricsReport report;
  std::vector<FoldResult> folds;
};

// Trains one model per fold on the remaining folds (normalization fitted on
// those folds only) and scores it on the held-out fold. `jobs` > 1 runs
// folds on worker threads; results do not depend on it.
CrossValidation cross_validate(const Dataset& data, const TrainConfig& cfg, Architecture arch,
                               const ModelDims& dims = {}, int jobs = 1,
                               const TrainHooks& hooks = {});

// Scores `model` on every sample of `data`.
std::vector<double> score_dataset(const Model& model, const Dataset& data);

}  // namespace vitalnet

#endif  // VITALNET_TRAINING_HPP_
