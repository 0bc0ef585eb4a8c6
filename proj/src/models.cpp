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

#include "vitalnet/models.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <Eigen/Core>

#include "vitalnet/error.hpp"
#include "vitalnet/random.hpp"

namespace vitalnet {

namespace {

constexpr const char* kGates[] = {"i", "f", "g", "o"};

std::string lstm_name(std::size_t layer, const char* kind, const char* gate) {
  return "lstm." + std::to_string(layer) + "." + kind + "_" + gate;
}

nc::Tensor fc(nc::Graph& g, const ParamSet& p, const std::string& name, const nc::Tensor& x) {
  return nc::linear(g, x, p.at(name + ".weight"), p.at(name + ".bias"));
}

void add_fc_layout(std::vector<std::pair<std::string, nc::Shape>>& out, const std::string& name,
                   std::size_t in, std::size_t outputs) {
  out.emplace_back(name + ".weight", nc::Shape{outputs, in});
  out.emplace_back(name + ".bias", nc::Shape{outputs});
}

}  // namespace

std::string_view architecture_name(Architecture arch) {
  switch (arch) {
    case Architecture::kSvs: return "svs";
    case Architecture::kMlvs: return "mlvs";
    case Architecture::kNshs: return "nshs";
  }
  return "?";
}

std::optional<Architecture> parse_architecture(std::string_view name) {
  for (Architecture a : {Architecture::kSvs, Architecture::kMlvs, Architecture::kNshs})
    if (architecture_name(a) == name) return a;
  return std::nullopt;
}

void ModelDims::validate() const {
  if (hidden == 0 || seq_len == 0 || inputs == 0 || nonseq == 0 || seq_repr == 0 || fusion == 0) {
    throw ConfigError("model dimensions must be positive");
  }
  if (dilations.empty()) throw ConfigError("at least one LSTM layer is required");
  for (std::size_t d : dilations) {
    if (d == 0 || d >= seq_len) {
      throw ConfigError("dilation " + std::to_string(d) + " must be in [1, " +
                        std::to_string(seq_len) + ")");
    }
  }
}

// --- ParamSet ---------------------------------------------------------------

void ParamSet::add(std::string name, nc::Tensor tensor) {
  if (contains(name)) throw ContractError("duplicate parameter '" + name + "'");
  entries_.emplace_back(std::move(name), std::move(tensor));
}

bool ParamSet::contains(std::string_view name) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const auto& e) { return e.first == name; });
}

const nc::Tensor& ParamSet::at(std::string_view name) const {
  for (const auto& e : entries_)
    if (e.first == name) return e.second;
  throw ContractError("unknown parameter '" + std::string(name) + "'");
}

nc::Tensor& ParamSet::at(std::string_view name) {
  return const_cast<nc::Tensor&>(std::as_const(*this).at(name));
}

void ParamSet::erase(std::string_view name) {
  std::erase_if(entries_, [&](const auto& e) { return e.first == name; });
}

std::size_t ParamSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.second.size();
  return n;
}

ParamSet ParamSet::clone() const {
  ParamSet out;
  for (const auto& [name, t] : entries_) {
    nc::Tensor copy = t.clone();
    copy.set_requires_grad(t.requires_grad());
    out.entries_.emplace_back(name, std::move(copy));
  }
  return out;
}

void ParamSet::copy_values_from(const ParamSet& other) {
  for (auto& [name, t] : entries_) {
    if (!other.contains(name)) continue;
    const auto src = other.at(name).data();
    if (src.size() != t.size()) throw DimensionError("parameter '" + name + "' changed size");
    std::copy(src.begin(), src.end(), t.mutable_data().begin());
  }
}

// --- Batch ------------------------------------------------------------------

Batch Batch::from_samples(std::span<const Sample* const> samples) {
  Batch b;
  b.size = samples.size();
  b.seq.reserve(b.size * kGridSteps * kNumVitals);
  b.nonseq.reserve(b.size * kNonSeqSize);
  for (const Sample* s : samples) {
    b.seq.insert(b.seq.end(), s->grid.values.begin(), s->grid.values.end());
    b.nonseq.insert(b.nonseq.end(), s->nonseq.begin(), s->nonseq.end());
    b.labels.push_back(static_cast<double>(s->label));
  }
  return b;
}

Batch Batch::from_samples(const std::vector<Sample>& samples, std::span<const std::size_t> idx) {
  std::vector<const Sample*> ptrs;
  ptrs.reserve(idx.size());
  for (std::size_t i : idx) ptrs.push_back(&samples.at(i));
  return from_samples(ptrs);
}

nc::Tensor Batch::step(std::size_t t) const {
  std::vector<double> x(size * inputs);
  for (std::size_t b = 0; b < size; ++b)
    std::copy_n(seq.begin() + (b * seq_len + t) * inputs, inputs, x.begin() + b * inputs);
  return nc::Tensor::from({size, inputs}, std::move(x));
}

nc::Tensor Batch::nonseq_tensor(std::size_t width) const {
  if (nonseq.size() != size * width) {
    throw DimensionError("batch holds " + std::to_string(nonseq.size()) +
                         " static values, expected " + std::to_string(size * width));
  }
  return nc::Tensor::from({size, width}, nonseq);
}

// --- LSTM -------------------------------------------------------------------

LstmCellParams stack_lstm_layer(nc::Graph& g, const ParamSet& params, std::size_t layer) {
  auto stack = [&](const char* kind, bool transpose) {
    nc::Tensor acc;
    for (const char* gate : kGates) {
      nc::Tensor t = params.at(lstm_name(layer, kind, gate));
      if (transpose) t = nc::transpose(g, t);
      acc = acc.defined() ? nc::concat(g, acc, t) : t;
    }
    return acc;
  };
  LstmCellParams p;
  p.input = stack("W", true);
  p.recurrent = stack("U", true);
  p.bias = stack("b", false);
  p.hidden = params.at(lstm_name(layer, "b", "i")).size();
  return p;
}

// Gate nonlinearities and state update as one tape node. `pre` holds the
// i, f, g, o pre-activations side by side; the result is [h | c].
nc::Tensor lstm_gates(nc::Graph& g, const nc::Tensor& pre, const nc::Tensor& c_prev) {
  const std::size_t rows = c_prev.rows();
  const std::size_t h = c_prev.cols();
  if (pre.rank() != 2 || c_prev.rank() != 2 || pre.rows() != rows || pre.cols() != 4 * h) {
    throw DimensionError("lstm_gates: pre-activations " + nc::shape_string(pre.shape()) +
                         " do not match cell state " + nc::shape_string(c_prev.shape()));
  }
  const auto pd = pre.data();
  const auto cd = c_prev.data();
  // Cache i, f, g, o, tanh(c) for the backward pass. tanh(x) is taken as
  // 2 * sigmoid(2x) - 1 so every nonlinearity is one vectorized exp.
  auto cache = std::make_shared<std::vector<double>>(rows * 5 * h);
  Eigen::ArrayXXd z = Eigen::Map<const Eigen::ArrayXXd>(pd.data(), Eigen::Index(4 * h),
                                                        Eigen::Index(rows));
  z.middleRows(Eigen::Index(2 * h), Eigen::Index(h)) *= 2.0;
  const Eigen::ArrayXXd s = 1.0 / (1.0 + (-z).exp());
  const auto ig = s.topRows(Eigen::Index(h));
  const auto fg = s.middleRows(Eigen::Index(h), Eigen::Index(h));
  const Eigen::ArrayXXd gg = 2.0 * s.middleRows(Eigen::Index(2 * h), Eigen::Index(h)) - 1.0;
  const auto og = s.bottomRows(Eigen::Index(h));
  const Eigen::ArrayXXd c = fg * Eigen::Map<const Eigen::ArrayXXd>(cd.data(), Eigen::Index(h), Eigen::Index(rows)) +
      ig * gg;
  const Eigen::ArrayXXd tc = 2.0 / (1.0 + (-2.0 * c).exp()) - 1.0;
  std::vector<double> out(rows * 2 * h);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto col = Eigen::Index(r);
    double* k = cache->data() + r * 5 * h;
    double* o = out.data() + r * 2 * h;
    for (std::size_t j = 0; j < h; ++j) {
      const auto jj = Eigen::Index(j);
      k[j] = ig(jj, col);
      k[h + j] = fg(jj, col);
      k[2 * h + j] = gg(jj, col);
      k[3 * h + j] = og(jj, col);
      k[4 * h + j] = tc(jj, col);
      o[j] = og(jj, col) * tc(jj, col);
      o[h + j] = c(jj, col);
    }
  }
  nc::Tensor result = nc::Tensor::from({rows, 2 * h}, std::move(out));
  return g.record(result, {pre, c_prev}, [pre, c_prev, cache, rows, h](std::span<const double> go) {
    std::vector<double> dpre(rows * 4 * h);
    std::vector<double> dc_prev(rows * h);
    const auto cd = c_prev.data();
    for (std::size_t r = 0; r < rows; ++r) {
      const double* k = cache->data() + r * 5 * h;
      const double* gr = go.data() + r * 2 * h;
      double* dz = dpre.data() + r * 4 * h;
      for (std::size_t j = 0; j < h; ++j) {
        const double ig = k[j], fg = k[h + j], gg = k[2 * h + j], og = k[3 * h + j];
        const double tc = k[4 * h + j];
        const double dh = gr[j];
        const double dc = gr[h + j] + dh * og * (1.0 - tc * tc);
        dz[j] = dc * gg * ig * (1.0 - ig);
        dz[h + j] = dc * cd[r * h + j] * fg * (1.0 - fg);
        dz[2 * h + j] = dc * ig * (1.0 - gg * gg);
        dz[3 * h + j] = dh * tc * og * (1.0 - og);
        dc_prev[r * h + j] = dc * fg;
      }
    }
    nc::Graph::accumulate(pre, dpre);
    nc::Graph::accumulate(c_prev, dc_prev);
  });
}

LstmState lstm_cell_step(nc::Graph& g, const nc::Tensor& x, const LstmState& prev,
                         const LstmCellParams& p) {
  const std::size_t h = p.hidden;
  if (x.rank() != 2 || x.cols() != p.input.dim(0) || prev.h.cols() != h || prev.c.cols() != h) {
    throw DimensionError("lstm_cell_step: input " + nc::shape_string(x.shape()) + ", state " +
                         nc::shape_string(prev.h.shape()) + " incompatible with weights " +
                         nc::shape_string(p.input.shape()));
  }
  const nc::Tensor pre = nc::add(
      g, nc::add(g, nc::matmul(g, x, p.input), nc::matmul(g, prev.h, p.recurrent)), p.bias);
  const nc::Tensor hc = lstm_gates(g, pre, prev.c);
  return LstmState{nc::slice_last(g, hc, 0, h), nc::slice_last(g, hc, h, h)};
}

nc::Tensor dilated_lstm_forward(nc::Graph& g, const Batch& batch, const ParamSet& params,
                                const ModelDims& dims) {
  dims.validate();
  if (batch.seq_len != dims.seq_len || batch.inputs != dims.inputs ||
      batch.seq.size() != batch.size * dims.seq_len * dims.inputs) {
    throw DimensionError("sequence batch does not match model dimensions " +
                         std::to_string(dims.seq_len) + "x" + std::to_string(dims.inputs));
  }
  const std::size_t steps = dims.seq_len;
  const LstmState zero{nc::Tensor::zeros({batch.size, dims.hidden}),
                       nc::Tensor::zeros({batch.size, dims.hidden})};
  std::vector<nc::Tensor> inputs(steps);
  for (std::size_t t = 0; t < steps; ++t) inputs[t] = batch.step(t);

  for (std::size_t layer = 0; layer < dims.dilations.size(); ++layer) {
    const LstmCellParams p = stack_lstm_layer(g, params, layer);
    const std::size_t d = dims.dilations[layer];
    std::vector<LstmState> states;
    states.reserve(steps);
    for (std::size_t t = 0; t < steps; ++t) {
      const LstmState& prev = t >= d ? states[t - d] : zero;
      states.push_back(lstm_cell_step(g, inputs[t], prev, p));
    }
    for (std::size_t t = 0; t < steps; ++t) inputs[t] = states[t].h;
  }
  return inputs.back();
}

// --- Architectures ----------------------------------------------------------

std::vector<std::pair<std::string, nc::Shape>> parameter_layout(Architecture arch,
                                                                const ModelDims& dims,
                                                                bool with_aux_head) {
  std::vector<std::pair<std::string, nc::Shape>> out;
  if (arch == Architecture::kSvs) {
    for (std::size_t layer = 0; layer < dims.dilations.size(); ++layer) {
      const std::size_t in = layer == 0 ? dims.inputs : dims.hidden;
      for (const char* gate : kGates) out.emplace_back(lstm_name(layer, "W", gate), nc::Shape{dims.hidden, in});
      for (const char* gate : kGates)
        out.emplace_back(lstm_name(layer, "U", gate), nc::Shape{dims.hidden, dims.hidden});
      for (const char* gate : kGates) out.emplace_back(lstm_name(layer, "b", gate), nc::Shape{dims.hidden});
    }
    add_fc_layout(out, "fc_seq", dims.hidden, dims.seq_repr);
  } else if (arch == Architecture::kMlvs) {
    add_fc_layout(out, "mlp.0", dims.inputs, dims.seq_repr);
    add_fc_layout(out, "mlp.1", dims.seq_repr, dims.seq_repr);
  }
  add_fc_layout(out, "fc_nonseq", dims.nonseq, dims.seq_repr);
  if (arch == Architecture::kNshs) {
    add_fc_layout(out, "fc_out2", dims.seq_repr, 1);
    return out;
  }
  add_fc_layout(out, "fc_fusion", 2 * dims.seq_repr, dims.fusion);
  add_fc_layout(out, "fc_out", dims.fusion, 1);
  if (with_aux_head) add_fc_layout(out, "aux_head", dims.seq_repr, 1);
  return out;
}

Model Model::init(Architecture arch, const ModelDims& dims, std::uint64_t seed) {
  dims.validate();
  Rng rng(seed);
  ParamSet params;
  for (auto& [name, shape] : parameter_layout(arch, dims, arch != Architecture::kNshs)) {
    std::vector<double> data(nc::shape_size(shape), 0.0);
    if (shape.size() == 2) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(shape[1]));
      for (double& w : data) w = rng.uniform(-bound, bound);
    } else if (name.starts_with("lstm.") && name.ends_with(".b_f")) {
      std::fill(data.begin(), data.end(), 1.0);
    }
    params.add(name, nc::Tensor::parameter(std::move(shape), std::move(data)));
  }
  return Model(arch, dims, std::move(params));
}

Model Model::from_params(Architecture arch, const ModelDims& dims, ParamSet params) {
  dims.validate();
  const bool aux = params.contains("aux_head.weight");
  const auto layout = parameter_layout(arch, dims, aux && arch != Architecture::kNshs);
  if (layout.size() != params.size()) {
    throw ContractError("parameter set has " + std::to_string(params.size()) + " tensors, " +
                        std::string(architecture_name(arch)) + " expects " +
                        std::to_string(layout.size()));
  }
  for (const auto& [name, shape] : layout) {
    if (!params.contains(name)) throw ContractError("missing parameter '" + name + "'");
    if (params.at(name).shape() != shape) {
      throw DimensionError("parameter '" + name + "' has shape " +
                           nc::shape_string(params.at(name).shape()) + ", expected " +
                           nc::shape_string(shape));
    }
  }
  return Model(arch, dims, std::move(params));
}

void Model::drop_aux_head() {
  params_.erase("aux_head.weight");
  params_.erase("aux_head.bias");
}

std::vector<std::string> Model::seq_module_names() const {
  std::vector<std::string> names;
  for (const auto& [name, t] : params_) {
    if (name.starts_with("lstm.") || name.starts_with("fc_seq.") || name.starts_with("mlp.")) {
      names.push_back(name);
    }
  }
  return names;
}

nc::Tensor Model::seq_representation(nc::Graph& g, const Batch& batch) const {
  switch (arch_) {
    case Architecture::kSvs:
      return nc::tanh(g, fc(g, params_, "fc_seq", dilated_lstm_forward(g, batch, params_, dims_)));
    case Architecture::kMlvs: {
      // Memory-less: only the vitals at the prediction time.
      const nc::Tensor last = batch.step(batch.seq_len - 1);
      return nc::tanh(g, fc(g, params_, "mlp.1", nc::tanh(g, fc(g, params_, "mlp.0", last))));
    }
    case Architecture::kNshs:
      break;
  }
  throw ContractError("nshs has no SEQ branch");
}

nc::Tensor Model::fused_head(nc::Graph& g, const nc::Tensor& seq_repr, const Batch& batch) const {
  const nc::Tensor ns = nc::tanh(g, fc(g, params_, "fc_nonseq", batch.nonseq_tensor(dims_.nonseq)));
  const nc::Tensor fused = nc::tanh(g, fc(g, params_, "fc_fusion", nc::concat(g, seq_repr, ns)));
  return nc::sigmoid(g, fc(g, params_, "fc_out", fused));
}

nc::Tensor Model::forward(nc::Graph& g, const Batch& batch, Mode mode) const {
  if (arch_ == Architecture::kNshs) {
    if (mode != Mode::kFused) throw ContractError("nshs supports only the fused mode");
    const nc::Tensor ns =
        nc::tanh(g, fc(g, params_, "fc_nonseq", batch.nonseq_tensor(dims_.nonseq)));
    return nc::sigmoid(g, fc(g, params_, "fc_out2", ns));
  }
  const nc::Tensor repr = seq_representation(g, batch);
  if (mode == Mode::kPhase1Aux) {
    if (!has_aux_head()) throw ContractError("phase-1 mode requires the auxiliary head");
    return nc::sigmoid(g, fc(g, params_, "aux_head", repr));
  }
  return fused_head(g, repr, batch);
}

std::vector<double> Model::predict(const Batch& batch) const {
  nc::Graph g(false);
  const nc::Tensor p = forward(g, batch, Mode::kFused);
  return {p.data().begin(), p.data().end()};
}

}  // namespace vitalnet
