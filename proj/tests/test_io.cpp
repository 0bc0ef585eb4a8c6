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


#include <filesystem>
#include <string>
#include <vector>

#include <doctest.h>

#include "support.hpp"
#include "vitalnet/error.hpp"
#include "vitalnet/io.hpp"
#include "vitalnet/synth.hpp"

using namespace vitalnet;

namespace {

const PreprocessResult& small_result() {
  static const PreprocessResult r = [] {
    CohortSpec spec;
    spec.n_patients = 40;
    spec.seed = 17;
    const CohortFiles f = generate_cohort(spec);
    return preprocess_cohort(f.encounters_csv, f.vitals_csv, f.events_csv, 12);
  }();
  return r;
}

std::vector<double> values(const nc::Tensor& t) { return {t.data().begin(), t.data().end()}; }

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("dataset survives a JSON-lines round trip") {
    const Dataset& d = small_result().data;
    const std::string text = dataset_to_jsonl(d);
    const Dataset back = dataset_from_jsonl(text);
    REQUIRE(back.size() == d.size());
    CHECK(back.horizon_hours == 12);
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(back.samples[i].window_id == d.samples[i].window_id);
      CHECK(back.samples[i].label == d.samples[i].label);
      CHECK(back.samples[i].nonseq == d.samples[i].nonseq);
      for (std::size_t k = 0; k < d.samples[i].grid.values.size(); ++k)
        CHECK(back.samples[i].grid.values[k] == doctest::Approx(d.samples[i].grid.values[k]).epsilon(1e-12));
    }
    for (std::size_t v = 0; v < kNumVitals; ++v) {
      CHECK(back.stats.vitals[v].mean == doctest::Approx(d.stats.vitals[v].mean).epsilon(1e-12));
      CHECK(back.stats.vitals[v].sd == doctest::Approx(d.stats.vitals[v].sd).epsilon(1e-12));
    }
    CHECK(dataset_to_jsonl(back) == text);
  }

  TEST_CASE("malformed dataset lines report their line number") {
    const std::string text = dataset_to_jsonl(small_result().data);
    const auto first_break = text.find('\n');
    const std::string broken = text.substr(0, first_break + 1) + "{\"window_id\": 3}\n";
    try {
      dataset_from_jsonl(broken);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.row() == 2);
      CHECK(std::string(e.what()).starts_with("row 2: "));
    }
    CHECK_THROWS_AS(dataset_from_jsonl(""), ParseError);
  }

  TEST_CASE("checkpoint round trip preserves predictions") {
    const Dataset& d = small_result().data;
    ModelDims dims;
    dims.hidden = 5;
    dims.dilations = {1, 3};
    Model m = Model::init(Architecture::kSvs, dims, 3);
    m.drop_aux_head();
    const std::string json = checkpoint_to_json(m, 12, d.stats);
    const Checkpoint ck = checkpoint_from_json(json);
    CHECK(ck.horizon_hours == 12);
    CHECK(ck.model.architecture() == Architecture::kSvs);
    CHECK(ck.model.dims().dilations == dims.dilations);
    for (const auto& [name, t] : m.params()) CHECK(values(ck.model.params().at(name)) == values(t));
    std::vector<std::size_t> idx{0, 1, 2};
    const Batch b = Batch::from_samples(d.samples, idx);
    CHECK(ck.model.predict(b) == m.predict(b));
    CHECK(checkpoint_to_json(ck.model, ck.horizon_hours, ck.stats) == json);
    CHECK_THROWS_AS(checkpoint_from_json("{\"format_version\": 99}"), Error);
  }

  TEST_CASE("run configuration") {
    const RunConfig cfg = run_config_from_json(
        R"({"epochs": 7, "lr_phase12": 0.003, "seed": 5, "hidden": 8, "dilations": [1, 2]})");
    CHECK(cfg.train.epochs == 7);
    CHECK(cfg.train.lr_phase12 == 0.003);
    CHECK(cfg.train.seed == 5);
    CHECK(cfg.train.lr_phase3 == 1e-5);
    CHECK(cfg.dims.hidden == 8);
    CHECK(cfg.dims.dilations == std::vector<std::size_t>{1, 2});
    CHECK_FALSE(cfg.horizon_set);
    const RunConfig back = run_config_from_json(run_config_to_json(cfg));
    CHECK(back.train.epochs == 7);
    CHECK(back.dims.hidden == 8);
    CHECK(run_config_from_json(R"({"horizon_hours": 6})").horizon_set);
    CHECK_THROWS_AS(run_config_from_json(R"({"epocs": 3})"), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(R"({"epochs": "many"})"), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(R"({"focal_alpha": 2})"), ConfigError);
  }

  TEST_CASE("report layouts") {
    MetricsReport r;
    r.horizon_hours = 9;
    r.per_fold = {{0.8, 0.7, 0.4}, {0.9, 0.8, 0.5}};
    r.average = {0.85, 0.75, 0.45};
    const std::string json = metrics_to_json(r);
    CHECK(json.find("\"horizon\"") != std::string::npos);
    CHECK(json.find("\"per_fold\"") != std::string::npos);
    CHECK(json.find("\"average\"") != std::string::npos);

    const std::vector<HorizonMetrics> rows{{3, {0.8, 0.7, 0.6}}, {6, {0.7, 0.6, 0.5}}};
    const std::string csv = horizon_summary_csv(rows);
    CHECK(csv.starts_with("horizon,accuracy,auroc,auprc\n3,"));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

    const std::vector<OcclusionTable> occ{{3, {{"None", {0.5, 0.6, 0.7}}}}, {24, {{"None", {0.1, 0.2, 0.3}}}}};
    CHECK(occlusion_csv(occ) ==
          "target,accuracy_3,accuracy_24,auroc_3,auroc_24,auprc_3,auprc_24\n"
          "None,0.500000,0.100000,0.600000,0.200000,0.700000,0.300000\n");
    const std::vector<AblationTable> abl{{24, {{{0.9, 0.9, 0.9}, {0.8, 0.8, 0.8}, {0.7, 0.7, 0.7}}}}};
    const std::string a = ablation_csv(abl);
    CHECK(a.starts_with("architecture"));
    CHECK(a.find("\nsvs,") != std::string::npos);
    CHECK(a.find("\nnshs,") != std::string::npos);
  }

  TEST_CASE("cohort directory helpers") {
    const auto dir = testing::scratch_dir("io_cohort");
    CohortSpec spec;
    spec.n_patients = 20;
    write_cohort(dir / "nested", generate_cohort(spec));
    CHECK(std::filesystem::exists(dir / "nested" / kVitalsFile));
    const PreprocessResult r = preprocess_directory(dir / "nested", 24);
    CHECK(r.data.size() == 20);
    CHECK(r.encounters_included == 20);
    CHECK_THROWS_AS(preprocess_directory(dir / "missing", 24), IoError);
    CHECK_THROWS_AS(preprocess_directory(dir / "nested", 4), ConfigError);
  }
}
