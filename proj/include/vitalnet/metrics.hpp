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

#ifndef VITALNET_METRICS_HPP_
#define VITALNET_METRICS_HPP_

#include <span>

namespace vitalnet {

// Fraction of samples where (score >= threshold) agrees with the label.
double accuracy(std::span<const double> scores, std::span<const int> labels,
                double threshold = 0.5);

// Probability that a random positive outscores a random negative, ties
// counting one half. Throws UndefinedMetricError for a single-class set.
double auroc(std::span<const double> scores, std::span<const int> labels);

// Average precision over descending score cuts; tied scores form a single
// cut. Throws UndefinedMetricError without positives.
double auprc(std::span<const double> scores, std::span<const int> labels);

struct MetricTriple {
  double accuracy = 0.0;
  double auroc = 0.0;
  double auprc = 0.0;
};

MetricTriple evaluate_scores(std::span<const double> scores, std::span<const int> labels);

}  // namespace vitalnet

#endif  // VITALNET_METRICS_HPP_
