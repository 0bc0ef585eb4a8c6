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

#include "vitalnet/numcore.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "vitalnet/error.hpp"

namespace vitalnet::nc {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;
using MutMap = Eigen::Map<RowMatrix>;

ConstMap as_matrix(std::span<const double> d, std::size_t rows, std::size_t cols) {
  return ConstMap(d.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

MutMap as_matrix(std::vector<double>& d, std::size_t rows, std::size_t cols) {
  return MutMap(d.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

void check_defined(const Tensor& t, const char* op) {
  if (!t.defined()) throw ContractError(std::string(op) + ": undefined tensor operand");
}

}  // namespace

struct Tensor::Storage {
  Shape shape;
  std::vector<double> data;
  std::optional<std::vector<double>> grad;
  bool requires_grad = false;
};

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<std::size_t>());
}

Tensor Tensor::zeros(Shape shape) { return filled(std::move(shape), 0.0); }

Tensor Tensor::filled(Shape shape, double value) {
  const std::size_t n = shape_size(shape);
  return from(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::from(Shape shape, std::vector<double> data) {
  if (shape.empty()) shape = {1};
  for (std::size_t i = 0; i + 1 < shape.size(); ++i) {
    // Only the last axis may be empty, which gives concat a neutral element.
    if (shape[i] == 0) {
      throw DimensionError("tensor shape " + shape_string(shape) + " has an empty leading axis");
    }
  }
  if (shape_size(shape) != data.size()) {
    throw DimensionError("tensor shape " + shape_string(shape) + " does not match " +
                         std::to_string(data.size()) + " values");
  }
  auto s = std::make_shared<Storage>();
  s->shape = std::move(shape);
  s->data = std::move(data);
  return Tensor(std::move(s));
}

Tensor Tensor::scalar(double value) { return from({1}, {value}); }

Tensor Tensor::parameter(Shape shape, std::vector<double> data) {
  Tensor t = from(std::move(shape), std::move(data));
  t.storage_->requires_grad = true;
  return t;
}

const Shape& Tensor::shape() const {
  check_defined(*this, "shape");
  return storage_->shape;
}

std::size_t Tensor::size() const { return data().size(); }

std::size_t Tensor::cols() const { return shape().back(); }

std::size_t Tensor::rows() const {
  const std::size_t c = cols();
  return c == 0 ? shape_size(Shape(shape().begin(), shape().end() - 1)) : size() / c;
}

std::span<const double> Tensor::data() const {
  check_defined(*this, "data");
  return storage_->data;
}

std::span<double> Tensor::mutable_data() {
  check_defined(*this, "mutable_data");
  return storage_->data;
}

double Tensor::item() const {
  if (size() != 1) {
    throw ContractError("item() on non-scalar tensor " + shape_string(shape()));
  }
  return storage_->data[0];
}

bool Tensor::requires_grad() const { return defined() && storage_->requires_grad; }

void Tensor::set_requires_grad(bool value) {
  check_defined(*this, "set_requires_grad");
  storage_->requires_grad = value;
  if (!value) storage_->grad.reset();
}

bool Tensor::has_grad() const { return defined() && storage_->grad.has_value(); }

std::span<const double> Tensor::grad() const {
  if (!has_grad()) throw ContractError("tensor has no gradient");
  return *storage_->grad;
}

void Tensor::clear_grad() {
  if (defined()) storage_->grad.reset();
}

std::vector<double>& Tensor::grad_buffer() const {
  if (!storage_->grad) storage_->grad.emplace(storage_->data.size(), 0.0);
  return *storage_->grad;
}

Tensor Tensor::clone() const { return from(shape(), std::vector<double>(data().begin(), data().end())); }

Tensor Graph::record(Tensor output, std::vector<Tensor> inputs, BackwardFn backward) {
  const bool needed = recording_ && std::any_of(inputs.begin(), inputs.end(),
                                  [](const Tensor& t) { return t.requires_grad(); });
  if (!needed) return output;
  output.storage_->requires_grad = true;
  nodes_.push_back(Node{output, std::move(inputs), std::move(backward)});
  return output;
}

void Graph::accumulate(const Tensor& target, std::span<const double> delta) {
  if (!target.requires_grad()) return;
  auto& buf = target.grad_buffer();
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] += delta[i];
}

void Graph::backward(const Tensor& loss) {
  check_defined(loss, "backward");
  if (loss.size() != 1) {
    throw ContractError("backward requires a scalar loss, got shape " +
                        shape_string(loss.shape()));
  }
  if (!loss.requires_grad()) return;
  const double one = 1.0;
  accumulate(loss, std::span<const double>(&one, 1));
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    if (!it->output.has_grad()) continue;
    it->backward(it->output.grad());
  }
}

Tensor matmul(Graph& g, const Tensor& a, const Tensor& b) {
  check_defined(a, "matmul");
  check_defined(b, "matmul");
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw DimensionError("matmul: incompatible shapes " + shape_string(a.shape()) + " and " +
                         shape_string(b.shape()));
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<double> out(m * n);
  as_matrix(out, m, n).noalias() = as_matrix(a.data(), m, k) * as_matrix(b.data(), k, n);
  Tensor result = Tensor::from({m, n}, std::move(out));
  return g.record(result, {a, b}, [a, b, m, k, n](std::span<const double> go) {
    const auto dc = as_matrix(go, m, n);
    if (a.requires_grad()) {
      std::vector<double> da(m * k);
      as_matrix(da, m, k).noalias() = dc * as_matrix(b.data(), k, n).transpose();
      Graph::accumulate(a, da);
    }
    if (b.requires_grad()) {
      std::vector<double> db(k * n);
      as_matrix(db, k, n).noalias() = as_matrix(a.data(), m, k).transpose() * dc;
      Graph::accumulate(b, db);
    }
  });
}

Tensor transpose(Graph& g, const Tensor& a) {
  check_defined(a, "transpose");
  if (a.rank() != 2) {
    throw DimensionError("transpose: expected rank-2 tensor, got " + shape_string(a.shape()));
  }
  const std::size_t r = a.dim(0), c = a.dim(1);
  std::vector<double> out(r * c);
  as_matrix(out, c, r) = as_matrix(a.data(), r, c).transpose();
  Tensor result = Tensor::from({c, r}, std::move(out));
  return g.record(result, {a}, [a, r, c](std::span<const double> go) {
    std::vector<double> da(r * c);
    as_matrix(da, r, c) = as_matrix(go, c, r).transpose();
    Graph::accumulate(a, da);
  });
}

Tensor elementwise(Graph& g, BinaryOp op, const Tensor& a, const Tensor& b) {
  check_defined(a, "elementwise");
  check_defined(b, "elementwise");
  const bool same = a.shape() == b.shape();
  const bool bias = !same && b.rank() == 1 && b.dim(0) == a.cols();
  if (!same && !bias) {
    throw DimensionError("elementwise: shapes " + shape_string(a.shape()) + " and " +
                         shape_string(b.shape()) + " are not broadcastable");
  }
  const std::size_t n = a.size();
  const std::size_t width = b.size();
  const std::size_t rows = width == 0 ? 0 : n / width;
  const auto ad = a.data();
  const auto bd = b.data();
  std::vector<double> out(n);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = ad.data() + r * width;
    double* o = out.data() + r * width;
    switch (op) {
      case BinaryOp::kAdd: for (std::size_t j = 0; j < width; ++j) o[j] = x[j] + bd[j]; break;
      case BinaryOp::kSub: for (std::size_t j = 0; j < width; ++j) o[j] = x[j] - bd[j]; break;
      case BinaryOp::kMul: for (std::size_t j = 0; j < width; ++j) o[j] = x[j] * bd[j]; break;
    }
  }
  Tensor result = Tensor::from(a.shape(), std::move(out));
  return g.record(result, {a, b}, [a, b, op, n, width, rows](std::span<const double> go) {
    if (a.requires_grad()) {
      if (op == BinaryOp::kMul) {
        std::vector<double> da(n);
        const auto bd = b.data();
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t j = 0; j < width; ++j) da[r * width + j] = go[r * width + j] * bd[j];
        Graph::accumulate(a, da);
      } else {
        Graph::accumulate(a, go);
      }
    }
    if (b.requires_grad()) {
      std::vector<double> db(width, 0.0);
      const auto ad = a.data();
      for (std::size_t r = 0; r < rows; ++r) {
        const double* gr = go.data() + r * width;
        const double* x = ad.data() + r * width;
        switch (op) {
          case BinaryOp::kAdd: for (std::size_t j = 0; j < width; ++j) db[j] += gr[j]; break;
          case BinaryOp::kSub: for (std::size_t j = 0; j < width; ++j) db[j] -= gr[j]; break;
          case BinaryOp::kMul: for (std::size_t j = 0; j < width; ++j) db[j] += gr[j] * x[j]; break;
        }
      }
      Graph::accumulate(b, db);
    }
  });
}

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor activation(Graph& g, Activation kind, const Tensor& x) {
  check_defined(x, "activation");
  const std::size_t n = x.size();
  const auto xd = x.data();
  std::vector<double> out(n);
  if (kind == Activation::kTanh) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::tanh(xd[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = logistic(xd[i]);
  }
  Tensor result = Tensor::from(x.shape(), std::move(out));
  // The derivative is expressed through the output, so capture it by storage.
  return g.record(result, {x}, [x, result, kind, n](std::span<const double> go) {
    const auto y = result.data();
    std::vector<double> dx(n);
    if (kind == Activation::kTanh) {
      for (std::size_t i = 0; i < n; ++i) dx[i] = go[i] * (1.0 - y[i] * y[i]);
    } else {
      for (std::size_t i = 0; i < n; ++i) dx[i] = go[i] * y[i] * (1.0 - y[i]);
    }
    Graph::accumulate(x, dx);
  });
}

Tensor concat(Graph& g, const Tensor& a, const Tensor& b) {
  check_defined(a, "concat");
  check_defined(b, "concat");
  const Shape lead_a(a.shape().begin(), a.shape().end() - 1);
  const Shape lead_b(b.shape().begin(), b.shape().end() - 1);
  if (a.rank() != b.rank() || lead_a != lead_b) {
    throw DimensionError("concat: leading axes differ between " + shape_string(a.shape()) +
                         " and " + shape_string(b.shape()));
  }
  const std::size_t p = a.cols(), q = b.cols(), rows = a.rows();
  std::vector<double> out(rows * (p + q));
  const auto ad = a.data();
  const auto bd = b.data();
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(ad.begin() + r * p, p, out.begin() + r * (p + q));
    std::copy_n(bd.begin() + r * q, q, out.begin() + r * (p + q) + p);
  }
  Shape shape = lead_a;
  shape.push_back(p + q);
  Tensor result = Tensor::from(std::move(shape), std::move(out));
  return g.record(result, {a, b}, [a, b, p, q, rows](std::span<const double> go) {
    if (a.requires_grad()) {
      std::vector<double> da(rows * p);
      for (std::size_t r = 0; r < rows; ++r)
        std::copy_n(go.begin() + r * (p + q), p, da.begin() + r * p);
      Graph::accumulate(a, da);
    }
    if (b.requires_grad()) {
      std::vector<double> db(rows * q);
      for (std::size_t r = 0; r < rows; ++r)
        std::copy_n(go.begin() + r * (p + q) + p, q, db.begin() + r * q);
      Graph::accumulate(b, db);
    }
  });
}

Tensor slice_last(Graph& g, const Tensor& a, std::size_t begin, std::size_t count) {
  check_defined(a, "slice_last");
  const std::size_t width = a.cols();
  if (begin + count > width) {
    throw DimensionError("slice_last: columns [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") out of range for " +
                         shape_string(a.shape()));
  }
  const std::size_t rows = a.rows();
  const auto ad = a.data();
  std::vector<double> out(rows * count);
  for (std::size_t r = 0; r < rows; ++r)
    std::copy_n(ad.begin() + r * width + begin, count, out.begin() + r * count);
  Shape shape = a.shape();
  shape.back() = count;
  Tensor result = Tensor::from(std::move(shape), std::move(out));
  return g.record(result, {a}, [a, begin, count, width, rows](std::span<const double> go) {
    std::vector<double> da(rows * width, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
      std::copy_n(go.begin() + r * count, count, da.begin() + r * width + begin);
    Graph::accumulate(a, da);
  });
}

Tensor sum(Graph& g, const Tensor& x) {
  check_defined(x, "sum");
  if (x.size() == 0) throw ContractError("sum of an empty tensor");
  const auto xd = x.data();
  const double total = std::accumulate(xd.begin(), xd.end(), 0.0);
  const std::size_t n = x.size();
  return g.record(Tensor::scalar(total), {x}, [x, n](std::span<const double> go) {
    Graph::accumulate(x, std::vector<double>(n, go[0]));
  });
}

Tensor mean(Graph& g, const Tensor& x) {
  check_defined(x, "mean");
  if (x.size() == 0) throw ContractError("mean of an empty tensor");
  const auto xd = x.data();
  const std::size_t n = x.size();
  const double avg = std::accumulate(xd.begin(), xd.end(), 0.0) / static_cast<double>(n);
  return g.record(Tensor::scalar(avg), {x}, [x, n](std::span<const double> go) {
    Graph::accumulate(x, std::vector<double>(n, go[0] / static_cast<double>(n)));
  });
}

Tensor linear(Graph& g, const Tensor& x, const Tensor& weight, const Tensor& bias) {
  return add(g, matmul(g, x, transpose(g, weight)), bias);
}

}  // namespace vitalnet::nc
