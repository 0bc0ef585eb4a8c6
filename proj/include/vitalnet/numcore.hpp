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

#ifndef VITALNET_NUMCORE_HPP_
#define VITALNET_NUMCORE_HPP_

// Dense double-precision tensors with tape-style reverse-mode
// differentiation. A Graph records every operation whose result depends on
// a tensor that requires a gradient; operations on constants are evaluated
// eagerly and leave no trace on the tape.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vitalnet::nc {

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape& shape);
std::size_t shape_size(const Shape& shape);

class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape);
  static Tensor filled(Shape shape, double value);
  static Tensor from(Shape shape, std::vector<double> data);
  static Tensor scalar(double value);
  // A leaf that participates in differentiation.
  static Tensor parameter(Shape shape, std::vector<double> data);

  bool defined() const { return static_cast<bool>(storage_); }
  const Shape& shape() const;
  std::size_t size() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const { return shape().at(axis); }
  // Size of the trailing axis; leading axes are flattened into rows().
  std::size_t cols() const;
  std::size_t rows() const;

  std::span<const double> data() const;
  // Mutable access is reserved for optimizers and test fixtures.
  std::span<double> mutable_data();
  double item() const;
  double at(std::size_t flat_index) const { return data()[flat_index]; }

  bool requires_grad() const;
  // Detaching a parameter excludes it (and anything computed only from it)
  // from the tape; its grad stays absent.
  void set_requires_grad(bool value);

  bool has_grad() const;
  std::span<const double> grad() const;
  void clear_grad();

  // Deep copy of shape and data; the copy carries no grad.
  Tensor clone() const;

  // Identity of the underlying storage.
  bool same_storage(const Tensor& other) const { return storage_ == other.storage_; }

 private:
  struct Storage;
  explicit Tensor(std::shared_ptr<Storage> s) : storage_(std::move(s)) {}
  std::vector<double>& grad_buffer() const;

  std::shared_ptr<Storage> storage_;

  friend class Graph;
};

// Gradient propagation callback of one recorded operation. `out_grad` is
// d loss / d output; implementations add their contribution to each input
// via Graph::accumulate.
using BackwardFn = std::function<void(std::span<const double> out_grad)>;

class Graph {
 public:
  Graph() = default;
  // A graph constructed with recording disabled evaluates operations
  // without keeping a tape, for inference on trainable parameters.
  explicit Graph(bool recording) : recording_(recording) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Records `output` as computed from `inputs`. When no input requires a
  // gradient the output is returned as a constant and nothing is recorded.
  Tensor record(Tensor output, std::vector<Tensor> inputs, BackwardFn backward);

  // Reverse sweep from a scalar loss. Each recorded node is visited once,
  // in reverse recording order; parameter grads accumulate across calls
  // until cleared.
  void backward(const Tensor& loss);

  std::size_t size() const { return nodes_.size(); }

  // Adds `delta` into `target`'s grad when it requires one.
  static void accumulate(const Tensor& target, std::span<const double> delta);

 private:
  struct Node {
    Tensor output;
    std::vector<Tensor> inputs;
    BackwardFn backward;
  };
  std::vector<Node> nodes_;
  bool recording_ = true;
};

enum class BinaryOp { kAdd, kSub, kMul };
enum class Activation { kTanh, kSigmoid };

// a[m x k] * b[k x n]; rank-2 operands only.
Tensor matmul(Graph& g, const Tensor& a, const Tensor& b);
// Rank-2 transpose.
Tensor transpose(Graph& g, const Tensor& a);
// Pointwise op on equal shapes, or with `b` a bias vector broadcast over the
// last axis of `a`.
Tensor elementwise(Graph& g, BinaryOp op, const Tensor& a, const Tensor& b);
inline Tensor add(Graph& g, const Tensor& a, const Tensor& b) {
  return elementwise(g, BinaryOp::kAdd, a, b);
}
inline Tensor sub(Graph& g, const Tensor& a, const Tensor& b) {
  return elementwise(g, BinaryOp::kSub, a, b);
}
inline Tensor mul(Graph& g, const Tensor& a, const Tensor& b) {
  return elementwise(g, BinaryOp::kMul, a, b);
}
Tensor activation(Graph& g, Activation kind, const Tensor& x);
inline Tensor tanh(Graph& g, const Tensor& x) { return activation(g, Activation::kTanh, x); }
inline Tensor sigmoid(Graph& g, const Tensor& x) {
  return activation(g, Activation::kSigmoid, x);
}
// Concatenation along the last axis.
Tensor concat(Graph& g, const Tensor& a, const Tensor& b);
// Columns [begin, begin + count) of the last axis.
Tensor slice_last(Graph& g, const Tensor& a, std::size_t begin, std::size_t count);
Tensor sum(Graph& g, const Tensor& x);
Tensor mean(Graph& g, const Tensor& x);
// x * W^T + b for W stored as [out x in] and b of length out.
Tensor linear(Graph& g, const Tensor& x, const Tensor& weight, const Tensor& bias);

double logistic(double x);

}  // namespace vitalnet::nc

#endif  // VITALNET_NUMCORE_HPP_
