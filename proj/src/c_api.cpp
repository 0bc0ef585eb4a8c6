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

#include "vitalnet/vitalnet.h"

#include <algorithm>
#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "vitalnet/analysis.hpp"
#include "vitalnet/error.hpp"
#include "vitalnet/io.hpp"
#include "vitalnet/metrics.hpp"
#include "vitalnet/synth.hpp"
#include "vitalnet/training.hpp"

struct vn_dataset {
  vitalnet::Dataset data;
};

struct vn_model {
  vitalnet::Checkpoint checkpoint;
};

namespace {

namespace fs = std::filesystem;
using namespace vitalnet;

thread_local std::string g_last_error;

vn_status fail(vn_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

vn_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return VN_ERR_CONFIG;
    case ErrorKind::kIo: return VN_ERR_IO;
    default: return VN_ERR_DATA;
  }
}

template <typename Fn>
vn_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return VN_OK;
  } catch (const Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(VN_ERR_INTERNAL, "out of memory");
  } catch (const fs::filesystem_error& e) {
    return fail(VN_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(VN_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(VN_ERR_INTERNAL, "unknown error");
  }
}

void require_arg(bool ok, const char* message) {
  if (!ok) throw ConfigError(message);
}

std::vector<std::string> path_list(const char* const* paths, std::size_t n, const char* what) {
  require_arg(paths != nullptr && n > 0, what);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    require_arg(paths[i] != nullptr, what);
    out.emplace_back(paths[i]);
  }
  return out;
}

RunConfig resolve_config(const vn_train_options* opts, const Dataset& data) {
  RunConfig cfg;
  if (opts->config_path != nullptr) cfg = run_config_from_json(read_file(opts->config_path));
  if (opts->override_seed) cfg.train.seed = opts->seed;
  if (opts->override_epochs) cfg.train.epochs = opts->epochs;
  if (cfg.horizon_set && cfg.train.horizon_hours != data.horizon_hours) {
    throw ConfigError("config horizon_hours " + std::to_string(cfg.train.horizon_hours) +
                      " does not match the dataset horizon " +
                      std::to_string(data.horizon_hours));
  }
  cfg.train.horizon_hours = data.horizon_hours;
  cfg.train.validate();
  return cfg;
}

Architecture resolve_architecture(const char* name) {
  require_arg(name != nullptr, "architecture is required");
  const auto arch = parse_architecture(name);
  if (!arch) throw ConfigError(std::string("unknown architecture '") + name + "'");
  return *arch;
}

void write_cross_validation(const fs::path& dir, const CrossValidation& cv) {
  for (const FoldResult& fold : cv.folds) {
    const fs::path fold_dir = dir / ("fold_" + std::to_string(fold.fold));
    write_file_atomic(fold_dir / "checkpoint.json",
                      checkpoint_to_json(fold.model, cv.report.horizon_hours, fold.stats));
    write_file_atomic(fold_dir / "history.csv", fold.history.to_csv());
  }
  write_file_atomic(dir / "metrics.json", metrics_to_json(cv.report));
}

// Expresses a dataset in the normalization a checkpoint was trained with.
Dataset aligned(const Dataset& data, const Checkpoint& ck) {
  if (ck.horizon_hours != data.horizon_hours) {
    throw ContractError("checkpoint horizon " + std::to_string(ck.horizon_hours) +
                        " does not match dataset horizon " + std::to_string(data.horizon_hours));
  }
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return subset(data, all, ck.stats);
}

std::vector<int> labels_of(const Dataset& data) {
  std::vector<int> labels;
  labels.reserve(data.size());
  for (const Sample& s : data.samples) labels.push_back(s.label);
  return labels;
}

}  // namespace

extern "C" {

const char* vn_version(void) { return "0.1.0"; }

const char* vn_last_error(void) { return g_last_error.c_str(); }

void vn_synth_options_default(vn_synth_options* opts) {
  if (opts == nullptr) return;
  const CohortSpec spec;
  opts->n_patients = spec.n_patients;
  opts->seed = spec.seed;
  opts->prevalence = spec.prevalence;
  opts->drift_hours = spec.drift_hours;
  opts->signature_scale = 1.0;
  opts->within_patient_variance = spec.within_patient_variance;
}

vn_status vn_synth(const vn_synth_options* opts, const char* out_dir) {
  return guarded([&] {
    require_arg(opts != nullptr && out_dir != nullptr, "synth needs options and an output directory");
    require_arg(opts->n_patients > 0, "n must be positive");
    require_arg(opts->signature_scale >= 0.0, "signature scale must be nonnegative");
    CohortSpec spec;
    spec.n_patients = opts->n_patients;
    spec.seed = opts->seed;
    spec.prevalence = opts->prevalence;
    spec.drift_hours = opts->drift_hours;
    spec.within_patient_variance = opts->within_patient_variance;
    for (double& w : spec.drift_weight) w *= opts->signature_scale;
    write_cohort(out_dir, generate_cohort(spec));
  });
}

vn_status vn_preprocess(const char* data_dir, int horizon_hours, const char* out_path,
                        const char* rejects_path) {
  return guarded([&] {
    require_arg(data_dir != nullptr && out_path != nullptr,
                "preprocess needs a data directory and an output path");
    const PreprocessResult result = preprocess_directory(data_dir, horizon_hours);
    const fs::path rejects = rejects_path != nullptr
                                 ? fs::path(rejects_path)
                                 : fs::path(out_path).parent_path() / kRejectsFile;
    write_file_atomic(out_path, dataset_to_jsonl(result.data));
    write_file_atomic(rejects, result.rejects.to_csv());
  });
}

vn_status vn_dataset_load(const char* path, vn_dataset** out) {
  return guarded([&] {
    require_arg(path != nullptr && out != nullptr, "dataset path and output handle are required");
    *out = nullptr;
    auto handle = std::make_unique<vn_dataset>();
    handle->data = dataset_from_jsonl(read_file(path));
    *out = handle.release();
  });
}

void vn_dataset_free(vn_dataset* data) { delete data; }

size_t vn_dataset_size(const vn_dataset* data) { return data ? data->data.size() : 0; }

size_t vn_dataset_positives(const vn_dataset* data) { return data ? data->data.positives() : 0; }

int vn_dataset_horizon(const vn_dataset* data) { return data ? data->data.horizon_hours : 0; }

void vn_train_options_default(vn_train_options* opts) {
  if (opts == nullptr) return;
  opts->config_path = nullptr;
  opts->architecture = "svs";
  opts->jobs = 1;
  opts->override_seed = 0;
  opts->seed = 0;
  opts->override_epochs = 0;
  opts->epochs = 0;
}

vn_status vn_train(const char* const* data_paths, size_t n_data, const vn_train_options* opts,
                   const char* out_dir) {
  return guarded([&] {
    require_arg(opts != nullptr && out_dir != nullptr, "train needs options and an output directory");
    const auto paths = path_list(data_paths, n_data, "train needs at least one dataset");
    const Architecture arch = resolve_architecture(opts->architecture);
    std::vector<HorizonMetrics> summary;
    for (const std::string& path : paths) {
      const Dataset data = dataset_from_jsonl(read_file(path));
      const RunConfig cfg = resolve_config(opts, data);
      const CrossValidation cv = cross_validate(data, cfg.train, arch, cfg.dims, opts->jobs);
      const fs::path dir = paths.size() == 1
                               ? fs::path(out_dir)
                               : fs::path(out_dir) / ("h" + std::to_string(data.horizon_hours));
      write_cross_validation(dir, cv);
      summary.push_back({data.horizon_hours, cv.report.average});
    }
    if (paths.size() > 1) {
      write_file_atomic(fs::path(out_dir) / "horizons.csv", horizon_summary_csv(summary));
    }
  });
}

vn_status vn_ablate(const char* const* data_paths, size_t n_data, const vn_train_options* opts,
                    const char* out_dir) {
  return guarded([&] {
    require_arg(opts != nullptr && out_dir != nullptr, "ablate needs options and an output directory");
    const auto paths = path_list(data_paths, n_data, "ablate needs at least one dataset");
    std::vector<AblationTable> tables;
    for (const std::string& path : paths) {
      const Dataset data = dataset_from_jsonl(read_file(path));
      const RunConfig cfg = resolve_config(opts, data);
      const AblationResult result = ablation_run(data, cfg.train, cfg.dims, opts->jobs);
      AblationTable table;
      table.horizon_hours = data.horizon_hours;
      for (std::size_t a = 0; a < kAblationOrder.size(); ++a) {
        table.averages[a] = result.runs[a].report.average;
      }
      tables.push_back(table);
    }
    write_file_atomic(fs::path(out_dir) / "ablation.csv", ablation_csv(tables));
  });
}

vn_status vn_model_load(const char* checkpoint_path, vn_model** out) {
  return guarded([&] {
    require_arg(checkpoint_path != nullptr && out != nullptr,
                "checkpoint path and output handle are required");
    *out = nullptr;
    *out = new vn_model{checkpoint_from_json(read_file(checkpoint_path))};
  });
}

void vn_model_free(vn_model* model) { delete model; }

const char* vn_model_architecture(const vn_model* model) {
  if (model == nullptr) return "";
  return architecture_name(model->checkpoint.model.architecture()).data();
}

int vn_model_horizon(const vn_model* model) { return model ? model->checkpoint.horizon_hours : 0; }

size_t vn_model_parameter_count(const vn_model* model) {
  return model ? model->checkpoint.model.params().scalar_count() : 0;
}

vn_status vn_model_predict(const vn_model* model, const vn_dataset* data, double* out,
                           size_t out_len) {
  return guarded([&] {
    require_arg(model != nullptr && data != nullptr, "model and dataset handles are required");
    if (out_len != data->data.size()) {
      throw ContractError("output buffer holds " + std::to_string(out_len) + " values, dataset has " +
                          std::to_string(data->data.size()));
    }
    const auto scores = score_dataset(model->checkpoint.model, aligned(data->data, model->checkpoint));
    std::copy(scores.begin(), scores.end(), out);
  });
}

vn_status vn_evaluate(const char* const* model_paths, size_t n_models, const char* data_path,
                      const char* out_path) {
  return guarded([&] {
    require_arg(data_path != nullptr && out_path != nullptr,
                "evaluate needs a dataset and an output path");
    const auto paths = path_list(model_paths, n_models, "evaluate needs at least one checkpoint");
    const Dataset data = dataset_from_jsonl(read_file(data_path));
    const std::vector<int> labels = labels_of(data);
    MetricsReport report;
    report.horizon_hours = data.horizon_hours;
    for (std::size_t i = 0; i < paths.size(); ++i) {
      const Checkpoint ck = checkpoint_from_json(read_file(paths[i]));
      if (i == 0) {
        report.architecture = ck.model.architecture();
      } else if (ck.model.architecture() != report.architecture) {
        throw ContractError("checkpoints mix architectures");
      }
      const auto scores = score_dataset(ck.model, aligned(data, ck));
      report.per_fold.push_back(evaluate_scores(scores, labels));
    }
    for (const MetricTriple& m : report.per_fold) {
      report.average.accuracy += m.accuracy / static_cast<double>(report.per_fold.size());
      report.average.auroc += m.auroc / static_cast<double>(report.per_fold.size());
      report.average.auprc += m.auprc / static_cast<double>(report.per_fold.size());
    }
    write_file_atomic(out_path, metrics_to_json(report));
  });
}

vn_status vn_occlude(const char* const* model_paths, const char* const* data_paths, size_t n_pairs,
                     const char* out_path) {
  return guarded([&] {
    require_arg(out_path != nullptr, "occlude needs an output path");
    const auto models = path_list(model_paths, n_pairs, "occlude needs at least one checkpoint");
    const auto datas = path_list(data_paths, n_pairs, "occlude needs one dataset per checkpoint");
    std::vector<OcclusionTable> tables;
    for (std::size_t i = 0; i < n_pairs; ++i) {
      const Checkpoint ck = checkpoint_from_json(read_file(models[i]));
      const Dataset data = dataset_from_jsonl(read_file(datas[i]));
      tables.push_back({data.horizon_hours, occlusion_report(ck.model, aligned(data, ck))});
    }
    write_file_atomic(out_path, occlusion_csv(tables));
  });
}

vn_status vn_accuracy(const double* scores, const int* labels, size_t n, double threshold,
                      double* out) {
  return guarded([&] {
    require_arg(out != nullptr && (n == 0 || (scores != nullptr && labels != nullptr)),
                "metric inputs must not be null");
    *out = accuracy(std::span(scores, n), std::span(labels, n), threshold);
  });
}

vn_status vn_auroc(const double* scores, const int* labels, size_t n, double* out) {
  return guarded([&] {
    require_arg(out != nullptr && (n == 0 || (scores != nullptr && labels != nullptr)),
                "metric inputs must not be null");
    *out = auroc(std::span(scores, n), std::span(labels, n));
  });
}

vn_status vn_auprc(const double* scores, const int* labels, size_t n, double* out) {
  return guarded([&] {
    require_arg(out != nullptr && (n == 0 || (scores != nullptr && labels != nullptr)),
                "metric inputs must not be null");
    *out = auprc(std::span(scores, n), std::span(labels, n));
  });
}

}  // extern "C"
