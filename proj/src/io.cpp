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

#include "vitalnet/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vitalnet/error.hpp"

namespace vitalnet {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::string fixed(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

Json stats_to_json(const NormStats& stats) {
  Json j = Json::object();
  for (VitalKind k : kAllVitals) {
    j[std::string(vital_name(k))] = {{"mean", stats[k].mean}, {"sd", stats[k].sd}};
  }
  return j;
}

NormStats stats_from_json(const Json& j) {
  NormStats stats;
  for (VitalKind k : kAllVitals) {
    const Json& v = j.at(std::string(vital_name(k)));
    stats[k].mean = v.at("mean").get<double>();
    stats[k].sd = v.at("sd").get<double>();
  }
  return stats;
}

Json metric_json(const MetricTriple& m) {
  return {{"accuracy", m.accuracy}, {"auroc", m.auroc}, {"auprc", m.auprc}};
}

std::string metric_header(std::span<const int> horizons) {
  std::string header;
  for (const char* metric : {"accuracy", "auroc", "auprc"}) {
    for (int h : horizons) header += "," + std::string(metric) + "_" + std::to_string(h);
  }
  return header;
}

void append_metric_row(std::string& out, std::span<const MetricTriple> per_horizon) {
  for (auto field : {&MetricTriple::accuracy, &MetricTriple::auroc, &MetricTriple::auprc}) {
    for (const MetricTriple& m : per_horizon) out += "," + fixed(m.*field);
  }
  out += "\n";
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename onto " + path.string() + ": " + ec.message());
}

void write_cohort(const fs::path& dir, const CohortFiles& files) {
  write_file_atomic(dir / kEncountersFile, files.encounters_csv);
  write_file_atomic(dir / kVitalsFile, files.vitals_csv);
  write_file_atomic(dir / kEventsFile, files.events_csv);
}

PreprocessResult preprocess_cohort(std::string_view encounters_csv, std::string_view vitals_csv,
                                   std::string_view events_csv, int horizon_hours,
                                   const AgeBinning& bins) {
  if (!is_valid_horizon(horizon_hours)) {
    throw ConfigError("horizon must be one of 3, 6, ..., 24 hours, got " +
                      std::to_string(horizon_hours));
  }
  ParsedCohort parsed = parse_encounters(encounters_csv, vitals_csv, events_csv);
  const std::vector<Encounter> included = apply_inclusion_criteria(parsed.encounters);
  std::vector<LabeledWindow> windows;
  for (const Encounter& enc : included) {
    if (auto w = extract_window(enc, horizon_hours, bins)) windows.push_back(std::move(*w));
  }
  if (windows.empty()) throw ContractError("no encounter yields a valid input window");
  PreprocessResult result;
  result.data = build_dataset(windows, horizon_hours);
  result.rejects = std::move(parsed.rejects);
  result.encounters_included = included.size();
  return result;
}

PreprocessResult preprocess_directory(const fs::path& dir, int horizon_hours,
                                      const AgeBinning& bins) {
  return preprocess_cohort(read_file(dir / kEncountersFile), read_file(dir / kVitalsFile),
                           read_file(dir / kEventsFile), horizon_hours, bins);
}

std::string dataset_to_jsonl(const Dataset& data) {
  std::string out;
  for (const Sample& s : data.samples) {
    Json moments = Json::array();
    for (const Moments& m : s.moments) moments.push_back({m.count, m.mean, m.m2});
    Json j;
    j["window_id"] = s.window_id;
    j["horizon"] = s.horizon_hours;
    j["label"] = s.label;
    j["nonseq"] = s.nonseq;
    j["grid"] = s.grid.values;
    j["obs_moments"] = std::move(moments);
    out += j.dump();
    out += '\n';
  }
  return out;
}

Dataset dataset_from_jsonl(std::string_view text) {
  Dataset data;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    Sample s;
    try {
      const Json j = Json::parse(line);
      s.window_id = j.at("window_id").get<std::string>();
      s.horizon_hours = j.at("horizon").get<int>();
      s.label = j.at("label").get<int>();
      const auto nonseq = j.at("nonseq").get<std::vector<double>>();
      const auto grid = j.at("grid").get<std::vector<double>>();
      const Json& moments = j.at("obs_moments");
      if (nonseq.size() != kNonSeqSize) throw ParseError(line_no, "nonseq must have 9 entries");
      if (grid.size() != kGridSteps * kNumVitals) {
        throw ParseError(line_no, "grid must have 96x3 entries");
      }
      if (!moments.is_array() || moments.size() != kNumVitals) {
        throw ParseError(line_no, "obs_moments must have one entry per vital");
      }
      if (s.label != 0 && s.label != 1) throw ParseError(line_no, "label must be 0 or 1");
      std::copy(nonseq.begin(), nonseq.end(), s.nonseq.begin());
      s.grid.values = grid;
      for (std::size_t k = 0; k < kNumVitals; ++k) {
        const auto m = moments[k].get<std::vector<double>>();
        if (m.size() != 3) throw ParseError(line_no, "obs_moments entries are [count, mean, m2]");
        s.moments[k] = Moments{m[0], m[1], m[2]};
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, e.what());
    }
    if (first) {
      data.horizon_hours = s.horizon_hours;
      first = false;
    } else if (s.horizon_hours != data.horizon_hours) {
      throw ParseError(line_no, "mixed horizons in one dataset file");
    }
    data.samples.push_back(std::move(s));
  }
  if (data.samples.empty()) throw ParseError(line_no, "dataset file holds no windows");
  std::vector<WindowMoments> moments;
  moments.reserve(data.samples.size());
  for (const Sample& s : data.samples) moments.push_back(s.moments);
  data.stats = fit_normalizer(std::span<const WindowMoments>(moments));
  return data;
}

std::string checkpoint_to_json(const Model& model, int horizon_hours, const NormStats& stats) {
  Json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["architecture"] = std::string(architecture_name(model.architecture()));
  j["dilations"] = model.dims().dilations;
  j["horizon"] = horizon_hours;
  j["norm_stats"] = stats_to_json(stats);
  const ModelDims& d = model.dims();
  j["dims"] = {{"hidden", d.hidden},     {"seq_len", d.seq_len},   {"inputs", d.inputs},
               {"nonseq", d.nonseq},     {"seq_repr", d.seq_repr}, {"fusion", d.fusion}};
  Json params = Json::object();
  for (const auto& [name, t] : model.params()) {
    params[name] = {{"shape", t.shape()},
                    {"data", std::vector<double>(t.data().begin(), t.data().end())}};
  }
  j["params"] = std::move(params);
  return j.dump(1) + "\n";
}

Checkpoint checkpoint_from_json(std::string_view text) {
  try {
    const Json j = Json::parse(text);
    const int version = j.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion) {
      throw ContractError("unsupported checkpoint format_version " + std::to_string(version));
    }
    const auto arch = parse_architecture(j.at("architecture").get<std::string>());
    if (!arch) throw ContractError("unknown architecture in checkpoint");
    ModelDims dims;
    dims.dilations = j.at("dilations").get<std::vector<std::size_t>>();
    if (j.contains("dims")) {
      const Json& d = j.at("dims");
      dims.hidden = d.at("hidden").get<std::size_t>();
      dims.seq_len = d.at("seq_len").get<std::size_t>();
      dims.inputs = d.at("inputs").get<std::size_t>();
      dims.nonseq = d.at("nonseq").get<std::size_t>();
      dims.seq_repr = d.at("seq_repr").get<std::size_t>();
      dims.fusion = d.at("fusion").get<std::size_t>();
    }
    const Json& params = j.at("params");
    const bool aux = params.contains("aux_head.weight");
    ParamSet set;
    for (const auto& [name, shape] : parameter_layout(*arch, dims, aux)) {
      if (!params.contains(name)) throw ContractError("checkpoint lacks parameter '" + name + "'");
      const Json& p = params.at(name);
      const auto stored_shape = p.at("shape").get<nc::Shape>();
      if (stored_shape != shape) {
        throw DimensionError("parameter '" + name + "' has shape " +
                             nc::shape_string(stored_shape) + ", expected " +
                             nc::shape_string(shape));
      }
      set.add(name, nc::Tensor::parameter(shape, p.at("data").get<std::vector<double>>()));
    }
    if (set.size() != params.size()) throw ContractError("checkpoint has unexpected parameters");
    Checkpoint ck{Model::from_params(*arch, dims, std::move(set)), j.at("horizon").get<int>(),
                  stats_from_json(j.at("norm_stats"))};
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(std::string("malformed checkpoint: ") + e.what());
  }
}

RunConfig run_config_from_json(std::string_view text) {
  RunConfig cfg;
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  TrainConfig& t = cfg.train;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "epochs") t.epochs = value.get<int>();
      else if (key == "lr_phase12") t.lr_phase12 = value.get<double>();
      else if (key == "lr_phase3") t.lr_phase3 = value.get<double>();
      else if (key == "beta1") t.beta1 = value.get<double>();
      else if (key == "beta2") t.beta2 = value.get<double>();
      else if (key == "epsilon") t.epsilon = value.get<double>();
      else if (key == "patience") t.patience = value.get<int>();
      else if (key == "focal_gamma") t.focal_gamma = value.get<double>();
      else if (key == "focal_alpha") t.focal_alpha = value.get<double>();
      else if (key == "batch_size") t.batch_size = value.get<int>();
      else if (key == "folds") t.folds = value.get<int>();
      else if (key == "seed") t.seed = value.get<std::uint64_t>();
      else if (key == "horizon_hours") {
        t.horizon_hours = value.get<int>();
        cfg.horizon_set = true;
      }
      else if (key == "hidden") cfg.dims.hidden = value.get<std::size_t>();
      else if (key == "dilations") cfg.dims.dilations = value.get<std::vector<std::size_t>>();
      else throw ConfigError("unknown config key '" + key + "'");
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config key '" + key + "' has the wrong type");
    }
  }
  cfg.train.validate();
  cfg.dims.validate();
  return cfg;
}

std::string run_config_to_json(const RunConfig& cfg) {
  const TrainConfig& t = cfg.train;
  Json j;
  j["epochs"] = t.epochs;
  j["lr_phase12"] = t.lr_phase12;
  j["lr_phase3"] = t.lr_phase3;
  j["beta1"] = t.beta1;
  j["beta2"] = t.beta2;
  j["epsilon"] = t.epsilon;
  j["patience"] = t.patience;
  j["focal_gamma"] = t.focal_gamma;
  j["focal_alpha"] = t.focal_alpha;
  j["batch_size"] = t.batch_size;
  j["folds"] = t.folds;
  j["seed"] = t.seed;
  j["horizon_hours"] = t.horizon_hours;
  j["hidden"] = cfg.dims.hidden;
  j["dilations"] = cfg.dims.dilations;
  return j.dump(2) + "\n";
}

std::string metrics_to_json(const MetricsReport& report) {
  Json j;
  j["horizon"] = report.horizon_hours;
  j["architecture"] = std::string(architecture_name(report.architecture));
  Json folds = Json::array();
  for (const MetricTriple& m : report.per_fold) folds.push_back(metric_json(m));
  j["per_fold"] = std::move(folds);
  j["average"] = metric_json(report.average);
  return j.dump(2) + "\n";
}

std::string horizon_summary_csv(std::span<const HorizonMetrics> rows) {
  std::string out = "horizon,accuracy,auroc,auprc\n";
  for (const HorizonMetrics& r : rows) {
    out += std::to_string(r.horizon_hours) + "," + fixed(r.metrics.accuracy) + "," +
           fixed(r.metrics.auroc) + "," + fixed(r.metrics.auprc) + "\n";
  }
  return out;
}

std::string occlusion_csv(std::span<const OcclusionTable> tables) {
  if (tables.empty()) throw ContractError("occlusion table needs at least one horizon");
  std::vector<int> horizons;
  for (const auto& t : tables) {
    if (t.rows.size() != tables.front().rows.size()) {
      throw ContractError("occlusion tables disagree on their targets");
    }
    horizons.push_back(t.horizon_hours);
  }
  std::string out = "target" + metric_header(horizons) + "\n";
  for (std::size_t r = 0; r < tables.front().rows.size(); ++r) {
    std::vector<MetricTriple> row;
    for (const auto& t : tables) {
      if (t.rows[r].target != tables.front().rows[r].target) {
        throw ContractError("occlusion tables disagree on their targets");
      }
      row.push_back(t.rows[r].metrics);
    }
    out += tables.front().rows[r].target;
    append_metric_row(out, row);
  }
  return out;
}

std::string ablation_csv(std::span<const AblationTable> tables) {
  if (tables.empty()) throw ContractError("ablation table needs at least one horizon");
  std::vector<int> horizons;
  for (const auto& t : tables) horizons.push_back(t.horizon_hours);
  std::string out = "architecture" + metric_header(horizons) + "\n";
  for (std::size_t a = 0; a < kAblationOrder.size(); ++a) {
    std::vector<MetricTriple> row;
    for (const auto& t : tables) row.push_back(t.averages[a]);
    out += std::string(architecture_name(kAblationOrder[a]));
    append_metric_row(out, row);
  }
  return out;
}

}  // namespace vitalnet
