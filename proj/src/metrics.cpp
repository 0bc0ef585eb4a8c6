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

#include "vitalnet/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "vitalnet/error.hpp"

namespace vitalnet {

namespace {

void check_lengths(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw ContractError("scores and labels differ in length (" + std::to_string(scores.size()) +
                        " vs " + std::to_string(labels.size()) + ")");
  }
  if (scores.empty()) throw ContractError("empty scored set");
  for (int y : labels)
    if (y != 0 && y != 1) throw ContractError("labels must be 0 or 1");
}

// Indices ordered by descending score; equal scores keep input order.
std::vector<std::size_t> by_descending_score(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

double accuracy(std::span<const double> scores, std::span<const int> labels, double threshold) {
  check_lengths(scores, labels);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if ((scores[i] >= threshold ? 1 : 0) == labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

double auroc(std::span<const double> scores, std::span<const int> labels) {
  check_lengths(scores, labels);
  const auto order = by_descending_score(scores);
  // Walk tie groups from the top; each positive in a group beats every
  // negative below it and splits credit with negatives inside the group.
  double positives = 0.0, negatives = 0.0, wins = 0.0;
  std::size_t i = 0;
  double negatives_below_total = 0.0;
  for (int y : labels) negatives_below_total += y == 0 ? 1.0 : 0.0;
  double negatives_seen = 0.0;
  while (i < order.size()) {
    std::size_t j = i;
    double group_pos = 0.0, group_neg = 0.0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == 1 ? group_pos : group_neg) += 1.0;
      ++j;
    }
    const double below = negatives_below_total - negatives_seen - group_neg;
    wins += group_pos * (below + 0.5 * group_neg);
    negatives_seen += group_neg;
    positives += group_pos;
    negatives += group_neg;
    i = j;
  }
  if (positives == 0.0 || negatives == 0.0) {
    throw UndefinedMetricError("AUROC needs at least one positive and one negative sample");
  }
  return wins / (positives * negatives);
}

double auprc(std::span<const double> scores, std::span<const int> labels) {
  check_lengths(scores, labels);
  const double total_pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  if (total_pos == 0.0) throw UndefinedMetricError("AUPRC needs at least one positive sample");
  const auto order = by_descending_score(scores);
  double tp = 0.0, fp = 0.0, ap = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    double group_pos = 0.0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] == 1) {
        group_pos += 1.0;
      } else {
        fp += 1.0;
      }
      ++j;
    }
    tp += group_pos;
    if (group_pos > 0.0) ap += (group_pos / total_pos) * (tp / (tp + fp));
    i = j;
  }
  return ap;
}

MetricTriple evaluate_scores(std::span<const double> scores, std::span<const int> labels) {
  return {accuracy(scores, labels), auroc(scores, labels), auprc(scores, labels)};
}

}  // namespace vitalnet
