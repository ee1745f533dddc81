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

// Rankings, rank inversions and subsampling distributions of bias scores.

#ifndef BIAS_AUDIT_STABILITY_H_
#define BIAS_AUDIT_STABILITY_H_

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bias_audit/construction.h"
#include "bias_audit/metrics.h"
#include "bias_audit/schema.h"

namespace bias_audit {

struct RankedModel {
  std::string model_id;
  BiasScore score;
  // 1-based; tied models share the smallest rank of their group.
  int rank = 0;
};

// Least biased first after orientation normalization. Ties are listed by
// model id.
struct Ranking {
  std::string construction_id;
  Metric metric = Metric::kMfMismatchPct;
  std::vector<RankedModel> entries;

  const RankedModel* Find(const std::string& model_id) const;
};

Ranking RankModels(std::span<const BiasScore> scores);

// Unordered model pair, stored with first < second.
struct ModelPair {
  std::string first;
  std::string second;

  static ModelPair Of(std::string a, std::string b);
  auto operator<=>(const ModelPair&) const = default;
};

struct InversionReport {
  std::string a_id;
  std::string b_id;
  // Pairs strictly ordered one way in `a` and the other way in `b`.
  std::vector<ModelPair> inversions;
  std::size_t kendall_distance = 0;
};

InversionReport RankInversions(const Ranking& a, const Ranking& b);

struct DistributionSummary {
  std::size_t n = 0;
  double mean = 0;
  double stddev = 0;  // sample (n - 1) standard deviation; 0 when n == 1
  double min = 0;
  double q1 = 0;
  double median = 0;
  double q3 = 0;
  double max = 0;
};

// Inclusive quantile: linear interpolation at position (n - 1) * p of the
// sorted values.
double Quantile(std::span<const double> sorted, double p);
DistributionSummary Summarize(std::span<const double> values);

struct TrialDistribution {
  std::string model_id;
  Metric metric = Metric::kNeutralPct;
  double proportion = 1.0;
  std::vector<uint64_t> seeds;    // per-trial derived seeds
  std::vector<BiasScore> scores;  // one per trial, in trial order
  DistributionSummary summary;

  std::vector<double> values() const;
};

// Predictions of every model on one trial's dataset.
using TrialPredictor = std::function<std::vector<Prediction>(
    const ConstructionDescriptor&, std::span<const PairInstance>)>;

// Runs `trials` subsampling trials over a baseline BiasNLI dataset. Trial t
// keeps the occupations selected by the seed derived from (base_seed, t);
// every model is scored on the same trial dataset. Trials may run on up to
// `jobs` threads; results are in trial order regardless. Returns one
// distribution per model, sorted by model id.
std::vector<TrialDistribution> SubsamplingDistribution(
    std::span<const PairInstance> baseline, const TrialPredictor& predictor,
    double proportion, std::size_t trials, uint64_t base_seed,
    std::size_t jobs = 1);

// Fraction of paired trials whose strict order of the two models is the
// opposite of their order on the full dataset. Full-dataset ties are broken
// by model id; a tie within a trial never counts.
double DistributionOverlap(const TrialDistribution& a,
                           const TrialDistribution& b, const BiasScore& full_a,
                           const BiasScore& full_b);

}  // namespace bias_audit

#endif  // BIAS_AUDIT_STABILITY_H_
