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

// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vitalnet/vitalnet.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::vector<const char*> c_strings(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  out.reserve(v.size());
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

int report(vn_status status) {
  if (status == VN_OK) return 0;
  std::fprintf(stderr, "vitalnet: %s\n", vn_last_error());
  return status == VN_ERR_CONFIG ? kExitUsage : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clinical deterioration forecasting from routine vital signs", "vitalnet"};
  app.require_subcommand(1);
  app.set_version_flag("--version", vn_version());

  const auto horizon_check = CLI::IsMember({3, 6, 9, 12, 15, 18, 21, 24});
  const auto arch_check = CLI::IsMember({"svs", "mlvs", "nshs"});

  vn_synth_options synth;
  vn_synth_options_default(&synth);
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic cohort");
  synth_cmd->add_option("--n", synth.n_patients, "Number of patients")->required()
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--out-dir", synth_out, "Directory for the three CSV files")->required();
  synth_cmd->add_option("--prevalence", synth.prevalence, "Fraction of deteriorating patients")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--drift-hours", synth.drift_hours, "Length of the pre-event drift")
      ->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--signature-scale", synth.signature_scale,
                        "Multiplier on the deterioration drift")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--within-variance", synth.within_patient_variance,
                        "Share of vital variance that is within-patient noise")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));

  std::string pre_dir, pre_out, pre_rejects;
  int pre_horizon = 24;
  auto* pre_cmd = app.add_subcommand("preprocess", "Build the JSON-lines dataset for one horizon");
  pre_cmd->add_option("--data-dir", pre_dir, "Directory holding the cohort CSV files")->required();
  pre_cmd->add_option("--horizon", pre_horizon, "Prediction horizon in hours")->required()
      ->check(horizon_check);
  pre_cmd->add_option("--out", pre_out, "Output dataset path")->required();
  pre_cmd->add_option("--rejects", pre_rejects, "Rejection report path (default: next to --out)");

  vn_train_options train;
  vn_train_options_default(&train);
  std::vector<std::string> train_data;
  std::string train_config, train_arch = "svs", train_out;
  std::uint64_t seed = 0;
  int epochs = 0;
  auto add_train_flags = [&](CLI::App* cmd, bool with_arch) {
    cmd->add_option("--data", train_data, "Dataset path; repeat for several horizons")->required();
    cmd->add_option("--config", train_config, "Training config JSON");
    if (with_arch) cmd->add_option("--arch", train_arch, "Architecture")->check(arch_check)
        ->capture_default_str();
    cmd->add_option("--out-dir", train_out, "Output directory")->required();
    cmd->add_option("--jobs", train.jobs, "Concurrent folds")->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", seed, "Override the config seed");
    cmd->add_option("--epochs", epochs, "Override the config epochs per phase")
        ->check(CLI::PositiveNumber);
  };
  auto* train_cmd = app.add_subcommand("train", "Cross-validate one architecture");
  add_train_flags(train_cmd, true);
  auto* ablate_cmd = app.add_subcommand("ablate", "Cross-validate all three architectures");
  add_train_flags(ablate_cmd, false);

  std::vector<std::string> eval_models;
  std::string eval_data, eval_out = "metrics.json";
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a dataset with trained checkpoints");
  eval_cmd->add_option("--model", eval_models, "Checkpoint path; repeat to average")->required();
  eval_cmd->add_option("--data", eval_data, "Dataset path")->required();
  eval_cmd->add_option("--out", eval_out, "Metrics output path")->capture_default_str();

  std::vector<std::string> occ_models, occ_data;
  std::string occ_out;
  auto* occ_cmd = app.add_subcommand("occlude", "Occlusion analysis of a trained checkpoint");
  occ_cmd->add_option("--model", occ_models, "Checkpoint path; repeat once per horizon")
      ->required();
  occ_cmd->add_option("--data", occ_data, "Dataset path matching each --model")->required();
  occ_cmd->add_option("--out", occ_out, "occlusion.csv path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string message = e.what();
    for (char& c : message) if (c == '\n') c = ' ';
    std::fprintf(stderr, "vitalnet: %s (see vitalnet --help)\n", message.c_str());
    return kExitUsage;
  }

  if (synth_cmd->parsed()) return report(vn_synth(&synth, synth_out.c_str()));

  if (pre_cmd->parsed()) {
    return report(vn_preprocess(pre_dir.c_str(), pre_horizon, pre_out.c_str(),
                                pre_rejects.empty() ? nullptr : pre_rejects.c_str()));
  }

  if (train_cmd->parsed() || ablate_cmd->parsed()) {
    auto* cmd = train_cmd->parsed() ? train_cmd : ablate_cmd;
    train.config_path = train_config.empty() ? nullptr : train_config.c_str();
    train.architecture = train_arch.c_str();
    train.override_seed = cmd->count("--seed") > 0;
    train.seed = seed;
    train.override_epochs = cmd->count("--epochs") > 0;
    train.epochs = epochs;
    const auto paths = c_strings(train_data);
    return report(train_cmd->parsed()
                      ? vn_train(paths.data(), paths.size(), &train, train_out.c_str())
                      : vn_ablate(paths.data(), paths.size(), &train, train_out.c_str()));
  }

  if (eval_cmd->parsed()) {
    const auto paths = c_strings(eval_models);
    return report(vn_evaluate(paths.data(), paths.size(), eval_data.c_str(), eval_out.c_str()));
  }

  if (occ_cmd->parsed()) {
    if (occ_models.size() != occ_data.size()) {
      std::fprintf(stderr, "vitalnet: occlude needs exactly one --data per --model\n");
      return kExitUsage;
    }
    const auto models = c_strings(occ_models);
    const auto datas = c_strings(occ_data);
    return report(vn_occlude(models.data(), datas.data(), models.size(), occ_out.c_str()));
  }
  return kExitUsage;
}
