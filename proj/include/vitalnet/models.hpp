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

#ifndef VITALNET_MODELS_HPP_
#define VITALNET_MODELS_HPP_

// SVS-Net (dilated LSTM + static features), MLVS-Net (last vitals only) and
// nSHS-Net (static features only), built from numcore operations.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vitalnet/dataset.hpp"
#include "vitalnet/numcore.hpp"

namespace vitalnet {

enum class Architecture { kSvs, kMlvs, kNshs };

std::string_view architecture_name(Architecture arch);
std::optional<Architecture> parse_architecture(std::string_view name);

struct ModelDims {
  std::size_t hidden = 32;
  std::vector<std::size_t> dilations{1, 2, 4};  // one entry per LSTM layer
  std::size_t seq_len = kGridSteps;
  std::size_t inputs = kNumVitals;
  std::size_t nonseq = kNonSeqSize;
  std::size_t seq_repr = 16;
  std::size_t fusion = 8;

  // Throws ConfigError for zero sizes or a dilation not below seq_len.
  void validate() const;
};

// Named parameter tensors in insertion order.
class ParamSet {
 public:
  void add(std::string name, nc::Tensor tensor);
  bool contains(std::string_view name) const;
  const nc::Tensor& at(std::string_view name) const;
  nc::Tensor& at(std::string_view name);
  void erase(std::string_view name);

  std::size_t size() const { return entries_.size(); }
  std::size_t scalar_count() const;
  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  // Deep copy; parameters keep their requires_grad flags.
  ParamSet clone() const;
  // Copies values for every name present in both sets.
  void copy_values_from(const ParamSet& other);

 private:
  std::vector<std::pair<std::string, nc::Tensor>> entries_;
};

// A mini-batch in row-major layout: seq is [size][seq_len][inputs], nonseq
// is [size][nonseq].
struct Batch {
  std::size_t size = 0;
  std::size_t seq_len = kGridSteps;
  std::size_t inputs = kNumVitals;
  std::vector<double> seq;
  std::vector<double> nonseq;
  std::vector<double> labels;

  static Batch from_samples(std::span<const Sample* const> samples);
  static Batch from_samples(const std::vector<Sample>& samples, std::span<const std::size_t> idx);

  // [size x inputs] constant holding step t (0-based).
  nc::Tensor step(std::size_t t) const;
  nc::Tensor nonseq_tensor(std::size_t width) const;
};

enum class Mode { kPhase1Aux, kFused };

// The four gates' weights of one LSTM layer stacked along the output axis:
// input [in x 4H], recurrent [H x 4H], bias [4H], in gate order i, f, g, o.
struct LstmCellParams {
  nc::Tensor input;
  nc::Tensor recurrent;
  nc::Tensor bias;
  std::size_t hidden = 0;
};

// Stacks lstm.<layer>.{W,U,b}_{i,f,g,o} from `params` on the graph so the
// stacked tensors stay differentiable w.r.t. the named parameters.
LstmCellParams stack_lstm_layer(nc::Graph& g, const ParamSet& params, std::size_t layer);

struct LstmState {
  nc::Tensor h;
  nc::Tensor c;
};

// Gate nonlinearities and cell update fused into one node; `pre` is
// [B x 4H] in i, f, g, o order, the result is [h | c] as [B x 2H].
nc::Tensor lstm_gates(nc::Graph& g, const nc::Tensor& pre, const nc::Tensor& c_prev);

LstmState lstm_cell_step(nc::Graph& g, const nc::Tensor& x, const LstmState& prev,
                         const LstmCellParams& p);

// Top-layer hidden state at the last step, [batch x hidden]. Layer l reads
// its recurrent state from step t - dilation[l]; earlier states are zero.
nc::Tensor dilated_lstm_forward(nc::Graph& g, const Batch& batch, const ParamSet& params,
                                const ModelDims& dims);

class Model {
 public:
  static Model init(Architecture arch, const ModelDims& dims, std::uint64_t seed);
  // Wraps existing parameters; validates names and shapes.
  static Model from_params(Architecture arch, const ModelDims& dims, ParamSet params);

  Architecture architecture() const { return arch_; }
  const ModelDims& dims() const { return dims_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }

  bool has_aux_head() const { return params_.contains("aux_head.weight"); }
  void drop_aux_head();

  // Names of the temporal (or memory-less) branch: the part pre-trained in
  // phase 1 and frozen in phase 2. Empty for nSHS-Net.
  std::vector<std::string> seq_module_names() const;

  // [batch x 1] probabilities.
  nc::Tensor forward(nc::Graph& g, const Batch& batch, Mode mode) const;
  // Output of the SEQ branch, [batch x seq_repr].
  nc::Tensor seq_representation(nc::Graph& g, const Batch& batch) const;
  // Fused prediction from a precomputed SEQ representation.
  nc::Tensor fused_head(nc::Graph& g, const nc::Tensor& seq_repr, const Batch& batch) const;

  std::vector<double> predict(const Batch& batch) const;

 private:
  Model(Architecture arch, ModelDims dims, ParamSet params)
      : arch_(arch), dims_(std::move(dims)), params_(std::move(params)) {}

  Architecture arch_;
  ModelDims dims_;
  ParamSet params_;
};

// Expected parameter names and shapes for an architecture, in canonical order.
std::vector<std::pair<std::string, nc::Shape>> parameter_layout(Architecture arch,
                                                                const ModelDims& dims,
                                                                bool with_aux_head);

}  // namespace vitalnet

#endif  // VITALNET_MODELS_HPP_
