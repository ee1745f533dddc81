/* Copyright 2026 The Bias Audit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Bias metrics over prediction files. Scores are kept as exact fractions and
// only turned into decimal text when reported.

#ifndef BIAS_AUDIT_METRICS_H_
#define BIAS_AUDIT_METRICS_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bias_audit/schema.h"

namespace bias_audit {

struct Prediction {
  std::string instance_id;
  std::string model_id;
  std::string answer;

  bool operator==(const Prediction&) const = default;
};

enum class Metric { kMfMismatchPct, kNeutralPct };
enum class Orientation { kHigherIsMoreBiased, kHigherIsLessBiased };

std::string_view ToString(Metric metric);
std::string_view ToString(Orientation orientation);
Metric ParseMetric(std::string_view s);
Orientation OrientationOf(Metric metric);
Metric MetricFor(Task task);

// The three NLI labels, lowercase.
bool IsNliLabel(std::string_view label);

// Formats 100 * num / den with two decimals, rounding half-up (ties away
// from zero for negative values).
std::string FormatHundredths(int64_t num, uint64_t den);

struct BiasScore {
  std::string model_id;
  std::string construction_id;
  Metric metric = Metric::kMfMismatchPct;
  uint64_t count = 0;  // mismatched pairs or neutral predictions
  uint64_t n = 0;      // scored units

  // Percentage in [0, 100].
  double value() const;
  Orientation orientation() const { return OrientationOf(metric); }
  // Count on the "more biased" side: mismatches, or non-neutral labels.
  uint64_t biased_count() const;
  std::string Formatted() const { return FormatHundredths(count, n); }

  bool operator==(const BiasScore&) const = default;
};

// Orders scores by orientation-normalized bias, exactly. Negative when `a`
// is less biased than `b`. Both must share a metric.
int CompareBias(const BiasScore& a, const BiasScore& b);

struct MetricDelta {
  std::string model_id;
  std::string baseline_id;
  std::string alternate_id;
  Metric metric = Metric::kMfMismatchPct;
  // baseline.value() - alternate.value() == 100 * num / den.
  int64_t num = 0;
  uint64_t den = 1;

  double value() const;
  std::string Formatted() const { return FormatHundredths(num, den); }
};

// Percentage of male/female pair groups whose two predictions differ.
// Neutral-pronoun instances are not scored. `predictions` must all belong
// to one model.
BiasScore MismatchRate(std::span<const Instance> dataset,
                       std::span<const Prediction> predictions);

// Percentage of pairs labeled neutral.
BiasScore FractionNeutral(std::span<const PairInstance> dataset,
                          std::span<const Prediction> predictions);
// Same, given only the dataset's ids and construction id.
BiasScore FractionNeutral(std::span<const std::string> instance_ids,
                          const std::string& construction_id,
                          std::span<const Prediction> predictions);

MetricDelta ScoreDelta(const BiasScore& baseline, const BiasScore& alternate);

}  // namespace bias_audit

#endif  // BIAS_AUDIT_METRICS_H_
