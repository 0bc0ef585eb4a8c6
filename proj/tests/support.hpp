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

#ifndef VITALNET_TESTS_SUPPORT_HPP_
#define VITALNET_TESTS_SUPPORT_HPP_

// Shared oracles for the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "vitalnet/numcore.hpp"
#include "vitalnet/preprocess.hpp"

namespace vitalnet::testing {

// Denominator floor for relative gradient errors, so entries whose true
// gradient is essentially zero are compared absolutely.
inline constexpr double kGradFloor = 1e-6;

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), kGradFloor});
}

// Max relative error between backprop and central differences over every
// entry of every tensor in `wrt`. `loss` must build a fresh graph each call.
inline double gradient_check(const std::function<nc::Tensor(nc::Graph&)>& loss,
                             std::vector<nc::Tensor> wrt, double step = 1e-5) {
  for (auto& t : wrt) t.clear_grad();
  {
    nc::Graph g;
    g.backward(loss(g));
  }
  double worst = 0.0;
  for (auto& t : wrt) {
    const std::vector<double> analytic(t.grad().begin(), t.grad().end());
    auto data = t.mutable_data();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double saved = data[i];
      data[i] = saved + step;
      double up;
      {
        nc::Graph g(false);
        up = loss(g).item();
      }
      data[i] = saved - step;
      double down;
      {
        nc::Graph g(false);
        down = loss(g).item();
      }
      data[i] = saved;
      worst = std::max(worst, relative_error(analytic[i], (up - down) / (2.0 * step)));
    }
  }
  return worst;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

inline nc::Tensor random_parameter(std::mt19937_64& rng, nc::Shape shape) {
  const std::size_t n = nc::shape_size(shape);
  return nc::Tensor::parameter(std::move(shape), random_vector(rng, n));
}

// Natural cubic spline by assembling the full (n x n) system for the second
// derivatives and solving it with partial-pivot Gaussian elimination.
inline std::vector<double> dense_spline_second_derivatives(const std::vector<double>& x,
                                                           const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  a[0][0] = 1.0;
  a[n - 1][n - 1] = 1.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x[i] - x[i - 1];
    const double h1 = x[i + 1] - x[i];
    a[i][i - 1] = h0 / 6.0;
    a[i][i] = (h0 + h1) / 3.0;
    a[i][i + 1] = h1 / 6.0;
    a[i][n] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[pivot][c])) pivot = r;
    std::swap(a[c], a[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0.0) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = a[i][n] / a[i][i];
  return m;
}

// Evaluates the cubic defined by knots and second derivatives; clamps to
// the end values outside the knot range.
inline double dense_spline_eval(const std::vector<double>& x, const std::vector<double>& y,
                                const std::vector<double>& m, double t) {
  if (t <= x.front()) return y.front();
  if (t >= x.back()) return y.back();
  std::size_t i = 0;
  while (t > x[i + 1]) ++i;
  const double h = x[i + 1] - x[i];
  const double a = (x[i + 1] - t) / h;
  const double b = (t - x[i]) / h;
  return a * y[i] + b * y[i + 1] +
         ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0;
}

// Pairwise AUROC: every positive-negative pair scored 1, 0.5 or 0.
inline double brute_auroc(const std::vector<double>& s, const std::vector<int>& y) {
  double credit = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1.0;
      credit += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return credit / pairs;
}

// Average precision: for each distinct score threshold, from high to low,
// precision of {s >= threshold} times the recall gained at that threshold.
inline double brute_auprc(const std::vector<double>& s, const std::vector<int>& y) {
  std::vector<double> thresholds = s;
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  double total_pos = 0.0;
  for (int v : y) total_pos += v;
  double ap = 0.0, prev_recall = 0.0;
  for (double t : thresholds) {
    double tp = 0.0, n = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= t) {
        n += 1.0;
        tp += y[i];
      }
    }
    const double recall = tp / total_pos;
    ap += (recall - prev_recall) * (tp / n);
    prev_recall = recall;
  }
  return ap;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("vitalnet_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace vitalnet::testing

#endif  // VITALNET_TESTS_SUPPORT_HPP_
