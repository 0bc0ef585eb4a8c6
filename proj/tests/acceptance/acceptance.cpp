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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. `--only 1,2,3` runs a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../support.hpp"
#include "vitalnet/analysis.hpp"
#include "vitalnet/io.hpp"
#include "vitalnet/metrics.hpp"
#include "vitalnet/models.hpp"
#include "vitalnet/preprocess.hpp"
#include "vitalnet/synth.hpp"
#include "vitalnet/training.hpp"
#include "vitalnet/vitalnet.h"

namespace fs = std::filesystem;
using namespace vitalnet;
using vitalnet::testing::gradient_check;
using vitalnet::testing::random_parameter;
using vitalnet::testing::random_vector;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("vitalnet_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// --- 1. gradients -----------------------------------------------------------

Outcome gradients() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<std::size_t> dim(1, 5);
  double worst = 0.0;
  std::map<std::string, double> per_check;
  auto record = [&](const std::string& name, double err) {
    per_check[name] = std::max(per_check[name], err);
    worst = std::max(worst, err);
  };

  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = dim(rng), k = dim(rng), n = dim(rng);
    const nc::Tensor a = random_parameter(rng, {m, k});
    const nc::Tensor b = random_parameter(rng, {k, n});
    const nc::Tensor c = random_parameter(rng, {m, n});
    const nc::Tensor c2 = random_parameter(rng, {m, n});
    const nc::Tensor bias = random_parameter(rng, {n});
    const nc::Tensor w = random_parameter(rng, {k, n});
    const nc::Tensor pre = random_parameter(rng, {m, 4 * n});
    const nc::Tensor cell = random_parameter(rng, {m, n});
    // Projects a tensor onto a fixed random direction so every output
    // element contributes to the scalar.
    auto weighted = [&](nc::Graph& g, const nc::Tensor& t) {
      std::mt19937_64 dir_rng(t.size() * 7 + 3);
      const nc::Tensor dir = nc::Tensor::from(t.shape(), random_vector(dir_rng, t.size()));
      return nc::sum(g, nc::mul(g, t, dir));
    };
    using nc::Graph;
    record("matmul", gradient_check([&](Graph& g) { return weighted(g, nc::matmul(g, a, b)); }, {a, b}));
    record("transpose", gradient_check([&](Graph& g) { return weighted(g, nc::transpose(g, a)); }, {a}));
    record("add", gradient_check([&](Graph& g) { return weighted(g, nc::add(g, c, c2)); }, {c, c2}));
    record("add_bias", gradient_check([&](Graph& g) { return weighted(g, nc::add(g, c, bias)); }, {c, bias}));
    record("sub", gradient_check([&](Graph& g) { return weighted(g, nc::sub(g, c, bias)); }, {c, bias}));
    record("mul", gradient_check([&](Graph& g) { return weighted(g, nc::mul(g, c, c2)); }, {c, c2}));
    record("mul_bias", gradient_check([&](Graph& g) { return weighted(g, nc::mul(g, c, bias)); }, {c, bias}));
    record("tanh", gradient_check([&](Graph& g) { return weighted(g, nc::tanh(g, c)); }, {c}));
    record("sigmoid", gradient_check([&](Graph& g) { return weighted(g, nc::sigmoid(g, c)); }, {c}));
    record("concat", gradient_check([&](Graph& g) { return weighted(g, nc::concat(g, c, a)); }, {c, a}));
    record("slice_last",
           gradient_check([&](Graph& g) { return weighted(g, nc::slice_last(g, c, n / 2, n - n / 2)); }, {c}));
    record("sum", gradient_check([&](Graph& g) { return nc::sum(g, nc::mul(g, c, c)); }, {c}));
    record("mean", gradient_check([&](Graph& g) { return nc::mean(g, nc::mul(g, c, c)); }, {c}));
    record("linear", gradient_check(
                         [&](Graph& g) { return weighted(g, nc::linear(g, a, nc::transpose(g, w), bias)); },
                         {a, w, bias}));
    record("lstm_gates", gradient_check([&](Graph& g) { return weighted(g, lstm_gates(g, pre, cell)); }, {pre, cell}));
  }

  ModelDims dims;
  dims.hidden = 4;
  dims.seq_len = 8;
  dims.dilations = {1, 2, 4};
  for (auto arch : {Architecture::kSvs, Architecture::kMlvs, Architecture::kNshs}) {
    const std::string name(architecture_name(arch));
    for (int trial = 0; trial < 20; ++trial) {
      Model model = Model::init(arch, dims, static_cast<std::uint64_t>(trial));
      for (auto& [pname, t] : model.params()) {
        const auto v = random_vector(rng, t.size(), -0.8, 0.8);
        std::copy(v.begin(), v.end(), t.mutable_data().begin());
      }
      Batch batch;
      batch.size = 3;
      batch.seq_len = dims.seq_len;
      batch.seq = random_vector(rng, 3 * dims.seq_len * dims.inputs, -2.0, 2.0);
      batch.nonseq = random_vector(rng, 3 * dims.nonseq, -2.0, 2.0);
      batch.labels = {1.0, 0.0, static_cast<double>(trial % 2)};
      std::vector<nc::Tensor> fused, aux;
      for (auto& [pname, t] : model.params()) {
        if (!pname.starts_with("aux_head.")) fused.push_back(t);
        if (pname.starts_with("aux_head.") || pname.starts_with("lstm.") || pname.starts_with("fc_seq.") ||
            pname.starts_with("mlp."))
          aux.push_back(t);
      }
      auto loss = [&](Mode mode) {
        return [&, mode](nc::Graph& g) {
          return focal_loss(g, model.forward(g, batch, mode), batch.labels, 2.0, 0.75);
        };
      };
      record(name, gradient_check(loss(Mode::kFused), fused));
      if (arch != Architecture::kNshs) record(name + "_aux", gradient_check(loss(Mode::kPhase1Aux), aux));
    }
  }
  const double elapsed = seconds_since(start);
  std::string worst_name;
  for (const auto& [n, e] : per_check)
    if (e == worst) worst_name = n;
  return {worst < 1e-4 && elapsed < 60.0,
          fmt("max rel err %.2e (%s) over %zu checks x 20, %.1fs", worst, worst_name.c_str(),
              per_check.size(), elapsed)};
}

// --- 2. metrics -------------------------------------------------------------

Outcome metric_oracles() {
  std::mt19937_64 rng(2002);
  std::uniform_int_distribution<int> level(0, 12);
  double worst_roc = 0.0, worst_pr = 0.0;
  int accuracy_mismatch = 0;
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 2 + rng() % 49;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = k % 2 ? level(rng) / 12.0 : std::uniform_real_distribution<double>(0, 1)(rng);
      y[i] = static_cast<int>(rng() % 2);
    }
    y[0] = 1;
    y[1] = 0;
    worst_roc = std::max(worst_roc, std::abs(auroc(s, y) - testing::brute_auroc(s, y)));
    worst_pr = std::max(worst_pr, std::abs(auprc(s, y) - testing::brute_auprc(s, y)));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += (s[i] >= 0.5) == (y[i] == 1);
    if (accuracy(s, y) != static_cast<double>(hits) / static_cast<double>(n)) ++accuracy_mismatch;
  }
  return {worst_roc < 1e-9 && worst_pr < 1e-9 && accuracy_mismatch == 0,
          fmt("auroc err %.1e, auprc err %.1e, accuracy mismatches %d over 200 sets", worst_roc,
              worst_pr, accuracy_mismatch)};
}

// --- 3. spline ---------------------------------------------------------------

Outcome spline() {
  std::mt19937_64 rng(3003);
  std::uniform_real_distribution<double> step(0.1, 5.0), val(-50.0, 50.0), coef(-3.0, 3.0);
  double knot_err = 0.0, boundary = 0.0, affine_err = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + rng() % 30;
    std::vector<double> t{-30.0 + val(rng) / 10.0}, y, line;
    for (std::size_t i = 1; i < n; ++i) t.push_back(t.back() + step(rng));
    const double a = coef(rng) * 10.0, b = coef(rng);
    for (double x : t) {
      y.push_back(val(rng));
      line.push_back(a + b * x);
    }
    const SplineModel s = spline_fit(t, y);
    for (std::size_t i = 0; i < n; ++i) knot_err = std::max(knot_err, std::abs(s(t[i]) - y[i]));
    boundary = std::max({boundary, std::abs(s.second_derivative(t.front())),
                         std::abs(s.second_derivative(t.back()))});
    const SplineModel l = spline_fit(t, line);
    for (int q = 0; q <= 50; ++q) {
      const double x = t.front() + (t.back() - t.front()) * q / 50.0;
      affine_err = std::max(affine_err, std::abs(l(x) - (a + b * x)));
    }
  }
  return {knot_err < 1e-9 && boundary < 1e-9 && affine_err < 1e-9,
          fmt("knot err %.1e, boundary |S''| %.1e, affine err %.1e over 100 sets", knot_err, boundary,
              affine_err)};
}

// --- 4-6. desk-scale learning, ablation, occlusion ---------------------------

// Synthetic cohort with a strong temporal signature in the vitals; obesity
// is drawn at the same rate in both classes so it carries no label signal.
Dataset acceptance_cohort() {
  CohortSpec spec;
  spec.n_patients = 2000;
  spec.seed = 7;
  spec.prevalence = 0.165;
  spec.drift_hours = 48.0;
  spec.within_patient_variance = 0.1;
  for (double& w : spec.drift_weight) w *= 4.0;
  spec.deteriorated.obesity = spec.stable.obesity;
  const CohortFiles f = generate_cohort(spec);
  return preprocess_cohort(f.encounters_csv, f.vitals_csv, f.events_csv, 24).data;
}

TrainConfig acceptance_config() {
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.patience = 20;
  cfg.lr_phase12 = 3e-3;
  cfg.lr_phase3 = 3e-4;
  cfg.seed = 1;
  cfg.horizon_hours = 24;
  return cfg;
}

struct DeskRun {
  bool ran = false;
  AblationResult ablation;
  std::vector<OcclusionRow> occlusion;
  double seconds = 0.0;
  std::size_t windows = 0;
  std::size_t positives = 0;
};

DeskRun& desk_run() {
  static DeskRun run;
  if (!run.ran) {
    const Dataset data = acceptance_cohort();
    run.windows = data.size();
    run.positives = data.positives();
    const auto start = Clock::now();
    run.ablation = ablation_run(data, acceptance_config());
    run.seconds = seconds_since(start);
    run.occlusion = occlusion_report(run.ablation.runs[0], data);
    run.ran = true;
  }
  return run;
}

Outcome learning() {
  const DeskRun& r = desk_run();
  const double auc = r.ablation.runs[0].report.average.auroc;
  return {auc >= 0.85 && r.seconds < 600.0,
          fmt("svs average AUROC %.3f on %zu windows (%zu positive); ablation wall time %.0fs", auc,
              r.windows, r.positives, r.seconds)};
}

Outcome ablation_order() {
  const DeskRun& r = desk_run();
  const double svs = r.ablation.runs[0].report.average.auroc;
  const double mlvs = r.ablation.runs[1].report.average.auroc;
  const double nshs = r.ablation.runs[2].report.average.auroc;
  return {svs - mlvs >= 0.02 && mlvs - nshs >= 0.02,
          fmt("AUROC svs %.3f > mlvs %.3f > nshs %.3f", svs, mlvs, nshs)};
}

Outcome occlusion_ranking() {
  const DeskRun& r = desk_run();
  std::map<std::string, double> delta;
  const double base = r.occlusion.at(0).metrics.auroc;
  for (const auto& row : r.occlusion) delta[row.target] = row.metrics.auroc - base;
  const double hr = delta.at("hr");
  const bool hr_largest = hr < delta.at("spo2") && hr < delta.at("temperature");
  const double null_feature = delta.at("obesity");
  return {hr_largest && -hr >= 0.05 && std::abs(null_feature) < 0.02,
          fmt("dAUROC hr %+.3f, spo2 %+.3f, temperature %+.3f; obesity (label-independent) %+.4f", hr,
              delta.at("spo2"), delta.at("temperature"), null_feature)};
}

// --- 7. three-phase contracts -------------------------------------------------

Outcome phase_contracts() {
  CohortSpec spec;
  spec.n_patients = 120;
  spec.seed = 70;
  const CohortFiles f = generate_cohort(spec);
  const Dataset data = preprocess_cohort(f.encounters_csv, f.vitals_csv, f.events_csv, 24).data;
  std::vector<std::size_t> train_idx, val_idx;
  for (std::size_t i = 0; i < data.size(); ++i) (i % 3 == 0 ? val_idx : train_idx).push_back(i);
  const NormStats stats = fit_normalizer(data, train_idx);
  const Dataset train = subset(data, train_idx, stats);
  const Dataset val = subset(data, val_idx, stats);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.patience = 3;
  cfg.lr_phase12 = 3e-3;
  cfg.lr_phase3 = 3e-4;

  int violations = 0, checks = 0;
  auto expect = [&](bool ok) {
    ++checks;
    if (!ok) ++violations;
  };
  for (auto arch : {Architecture::kSvs, Architecture::kMlvs}) {
    std::map<std::string, std::vector<double>> frozen;
    std::map<std::string, AdamSlot> frozen_slots;
    auto snapshot = [](const nc::Tensor& t) { return std::vector<double>(t.data().begin(), t.data().end()); };
    TrainHooks hooks;
    hooks.on_phase_start = [&](int phase, const Model& m, const AdamState& adam) {
      if (phase >= 2) expect(!m.has_aux_head());
      if (phase == 2) {
        for (const auto& n : m.seq_module_names()) {
          expect(snapshot(m.params().at(n)) == frozen.at(n));
          frozen_slots[n] = adam.at(n);
        }
      }
    };
    hooks.on_epoch_end = [&](int phase, int, const Model& m, const AdamState& adam) {
      if (phase == 1) expect(m.has_aux_head());
      if (phase >= 2) expect(!m.has_aux_head());
      if (phase == 2) {
        for (const auto& n : m.seq_module_names()) {
          expect(snapshot(m.params().at(n)) == frozen.at(n));
          const AdamSlot& s = adam.at(n);
          expect(s.m == frozen_slots.at(n).m && s.v == frozen_slots.at(n).v && s.t == frozen_slots.at(n).t);
        }
      }
    };
    hooks.on_phase_end = [&](int phase, const Model& m, const AdamState& adam) {
      if (phase == 1) {
        for (const auto& n : m.seq_module_names()) frozen[n] = snapshot(m.params().at(n));
      }
      if (phase == 2) {
        for (const auto& n : m.seq_module_names()) {
          expect(snapshot(m.params().at(n)) == frozen.at(n));
          const AdamSlot& s = adam.at(n);
          expect(s.m == frozen_slots.at(n).m && s.v == frozen_slots.at(n).v && s.t == frozen_slots.at(n).t);
        }
      }
      if (phase >= 2) expect(!m.has_aux_head());
    };
    const TrainResult r = train_three_phase(train, val, cfg, arch, {}, hooks);
    expect(!r.model.has_aux_head());
    // Phase 3 did move the SEQ branch, so the checks above are not vacuous.
    bool moved = false;
    for (const auto& n : r.model.seq_module_names()) moved |= snapshot(r.model.params().at(n)) != frozen.at(n);
    expect(moved);
  }
  return {violations == 0 && checks > 0,
          fmt("%d of %d freeze/aux-head/optimizer-state checks violated (svs, mlvs)", violations, checks)};
}

// --- 8. determinism -------------------------------------------------------------

// synth -> preprocess -> train -> evaluate -> occlude through the C API.
bool pipeline(const fs::path& dir, int jobs, std::string& error) {
  vn_synth_options so;
  vn_synth_options_default(&so);
  so.n_patients = 300;
  so.seed = 88;
  const std::string data = (dir / "d24.jsonl").string();
  std::ofstream(dir / "cfg.json") << R"({"epochs": 2, "patience": 2, "lr_phase12": 0.003, "seed": 5})";
  const std::string cfg = (dir / "cfg.json").string();
  vn_train_options to;
  vn_train_options_default(&to);
  to.config_path = cfg.c_str();
  to.architecture = "svs";
  to.jobs = jobs;
  const char* paths[] = {data.c_str()};
  const std::string ck0 = (dir / "run" / "fold_0" / "checkpoint.json").string();
  const std::string ck1 = (dir / "run" / "fold_1" / "checkpoint.json").string();
  const std::string ck2 = (dir / "run" / "fold_2" / "checkpoint.json").string();
  const char* models[] = {ck0.c_str(), ck1.c_str(), ck2.c_str()};
  const bool ok = vn_synth(&so, (dir / "cohort").c_str()) == VN_OK &&
                  vn_preprocess((dir / "cohort").c_str(), 24, data.c_str(), nullptr) == VN_OK &&
                  vn_train(paths, 1, &to, (dir / "run").c_str()) == VN_OK &&
                  vn_evaluate(models, 3, data.c_str(), (dir / "eval" / "metrics.json").c_str()) == VN_OK &&
                  vn_occlude(models, paths, 1, (dir / "occlusion.csv").c_str()) == VN_OK;
  if (!ok) error = vn_last_error();
  return ok;
}

Outcome determinism() {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  std::string error;
  if (!pipeline(a, 1, error) || !pipeline(b, 3, error)) return {false, "pipeline failed: " + error};
  const std::vector<fs::path> files{"run/fold_0/checkpoint.json", "run/fold_1/checkpoint.json",
                                    "run/fold_2/checkpoint.json", "run/metrics.json",
                                    "eval/metrics.json",          "occlusion.csv",
                                    "d24.jsonl",                  "cohort/vitals.csv"};
  std::vector<std::string> differing;
  for (const auto& f : files) {
    const std::string x = slurp(a / f);
    if (x.empty() || x != slurp(b / f)) differing.push_back(f.string());
  }
  std::string detail = fmt("%zu artifacts compared byte for byte (serial vs 3 worker threads)", files.size());
  for (const auto& d : differing) detail += "; differs: " + d;
  return {differing.empty(), detail};
}

// --- 9. horizon sweep -------------------------------------------------------------

Outcome horizon_sweep() {
  const fs::path dir = scratch("sweep");
  vn_synth_options so;
  vn_synth_options_default(&so);
  so.n_patients = 400;
  so.seed = 99;
  if (vn_synth(&so, (dir / "cohort").c_str()) != VN_OK) return {false, vn_last_error()};
  std::vector<std::string> data;
  for (int h : kHorizons) {
    data.push_back((dir / ("h" + std::to_string(h) + ".jsonl")).string());
    if (vn_preprocess((dir / "cohort").c_str(), h, data.back().c_str(), nullptr) != VN_OK)
      return {false, vn_last_error()};
  }
  std::vector<const char*> paths;
  for (const auto& d : data) paths.push_back(d.c_str());
  std::ofstream(dir / "cfg.json") << R"({"epochs": 1, "patience": 1, "lr_phase12": 0.003})";
  const std::string cfg = (dir / "cfg.json").string();
  vn_train_options to;
  vn_train_options_default(&to);
  to.config_path = cfg.c_str();
  to.architecture = "svs";
  if (vn_train(paths.data(), paths.size(), &to, (dir / "run").c_str()) != VN_OK)
    return {false, vn_last_error()};

  std::istringstream csv(slurp(dir / "run" / "horizons.csv"));
  std::string line;
  std::getline(csv, line);
  bool ok = line == "horizon,accuracy,auroc,auprc";
  std::vector<int> horizons;
  while (std::getline(csv, line)) {
    horizons.push_back(std::stoi(line.substr(0, line.find(','))));
    ok &= std::count(line.begin(), line.end(), ',') == 3;
  }
  ok &= horizons == std::vector<int>(kHorizons.begin(), kHorizons.end());
  return {ok, fmt("horizons.csv holds %zu rows (%s)", horizons.size(),
                  ok ? "3,6,...,24 with accuracy, auroc, auprc" : "unexpected layout")};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0) {
      std::istringstream list(argv[i + 1]);
      for (std::string item; std::getline(list, item, ',');) only.insert(std::stoi(item));
    }
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient correctness", gradients},
      {"metric oracles", metric_oracles},
      {"spline correctness", spline},
      {"learning at desk scale", learning},
      {"ablation ordering", ablation_order},
      {"occlusion ranking", occlusion_ranking},
      {"three-phase contracts", phase_contracts},
      {"determinism", determinism},
      {"horizon sweep", horizon_sweep},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && !only.contains(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
