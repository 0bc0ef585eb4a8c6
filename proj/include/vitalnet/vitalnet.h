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

#ifndef VITALNET_VITALNET_H_
#define VITALNET_VITALNET_H_

/* C interface to the vitalnet deterioration pipeline.
 *
 * Every function returns a vn_status. On failure a one-line description is
 * available from vn_last_error() on the calling thread until the next call.
 * Handles are opaque and owned by the caller once returned.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(VITALNET_BUILDING_LIBRARY)
#define VN_API __declspec(dllexport)
#else
#define VN_API __declspec(dllimport)
#endif
#else
#define VN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vn_status {
  VN_OK = 0,
  VN_ERR_CONFIG = 1,    /* invalid argument, flag value or config file */
  VN_ERR_DATA = 2,      /* malformed input or violated data contract */
  VN_ERR_IO = 3,        /* file could not be read or written */
  VN_ERR_INTERNAL = 4
} vn_status;

typedef struct vn_dataset vn_dataset;
typedef struct vn_model vn_model;

VN_API const char* vn_version(void);
VN_API const char* vn_last_error(void);

/* --- Synthetic cohort --------------------------------------------------- */

typedef struct vn_synth_options {
  uint64_t n_patients;
  uint64_t seed;
  double prevalence;
  double drift_hours;
  /* Multiplies the per-vital drift weights (1, 1, 0.3). */
  double signature_scale;
  double within_patient_variance;
} vn_synth_options;

VN_API void vn_synth_options_default(vn_synth_options* opts);
/* Writes encounters.csv, vitals.csv and events.csv into out_dir. */
VN_API vn_status vn_synth(const vn_synth_options* opts, const char* out_dir);

/* --- Preprocessing and datasets ----------------------------------------- */

/* Reads the three cohort CSVs from data_dir and writes the JSON-lines
 * dataset to out_path. rejects_path may be NULL to place rejects.csv next
 * to out_path. */
VN_API vn_status vn_preprocess(const char* data_dir, int horizon_hours, const char* out_path,
                               const char* rejects_path);

VN_API vn_status vn_dataset_load(const char* path, vn_dataset** out);
VN_API void vn_dataset_free(vn_dataset* data);
VN_API size_t vn_dataset_size(const vn_dataset* data);
VN_API size_t vn_dataset_positives(const vn_dataset* data);
VN_API int vn_dataset_horizon(const vn_dataset* data);

/* --- Training ------------------------------------------------------------ */

typedef struct vn_train_options {
  const char* config_path; /* NULL for defaults */
  const char* architecture; /* "svs", "mlvs" or "nshs" */
  int jobs;
  int override_seed; /* nonzero: seed replaces the config value */
  uint64_t seed;
  int override_epochs;
  int epochs;
} vn_train_options;

VN_API void vn_train_options_default(vn_train_options* opts);

/* Cross-validates on each dataset. With one dataset, out_dir receives
 * metrics.json and fold_<k>/{checkpoint.json,history.csv}; with several,
 * each lands in out_dir/h<horizon>/ and out_dir/horizons.csv summarizes
 * the averages, one row per horizon. */
VN_API vn_status vn_train(const char* const* data_paths, size_t n_data,
                          const vn_train_options* opts, const char* out_dir);

/* Trains all three architectures on each dataset with shared folds and
 * writes out_dir/ablation.csv. */
VN_API vn_status vn_ablate(const char* const* data_paths, size_t n_data,
                           const vn_train_options* opts, const char* out_dir);

/* --- Models ------------------------------------------------------------- */

VN_API vn_status vn_model_load(const char* checkpoint_path, vn_model** out);
VN_API void vn_model_free(vn_model* model);
VN_API const char* vn_model_architecture(const vn_model* model);
VN_API int vn_model_horizon(const vn_model* model);
VN_API size_t vn_model_parameter_count(const vn_model* model);
/* Scores every window; out must hold vn_dataset_size(data) values. */
VN_API vn_status vn_model_predict(const vn_model* model, const vn_dataset* data, double* out,
                                  size_t out_len);

/* Scores data with each checkpoint and writes metrics.json with one
 * per_fold entry per checkpoint. */
VN_API vn_status vn_evaluate(const char* const* model_paths, size_t n_models,
                             const char* data_path, const char* out_path);

/* model_paths[i] is applied to data_paths[i]; each pair contributes one
 * horizon column group to occlusion.csv. */
VN_API vn_status vn_occlude(const char* const* model_paths, const char* const* data_paths,
                            size_t n_pairs, const char* out_path);

/* --- Metrics ------------------------------------------------------------ */

VN_API vn_status vn_accuracy(const double* scores, const int* labels, size_t n, double threshold,
                             double* out);
VN_API vn_status vn_auroc(const double* scores, const int* labels, size_t n, double* out);
VN_API vn_status vn_auprc(const double* scores, const int* labels, size_t n, double* out);

#ifdef __cplusplus
}
#endif

#endif /* VITALNET_VITALNET_H_ */
