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

#include "bias_audit/stability.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "bias_audit/error.h"
#include "bias_audit/parallel.h"
#include "bias_audit/perturbation.h"

namespace bias_audit {
namespace {

std::set<std::string> ModelSet(const Ranking& r) {
  std::set<std::string> out;
  for (const auto& e : r.entries) out.insert(e.model_id);
  return out;
}

const PerturbationPools kNoPools;

}  // namespace

const RankedModel* Ranking::Find(const std::string& model_id) const {
  for (const auto& e : entries) {
    if (e.model_id == model_id) return &e;
  }
  return nullptr;
}

Ranking RankModels(std::span<const BiasScore> scores) {
  if (scores.empty()) throw ValidationError("nothing to rank");
  Ranking r;
  r.construction_id = scores.front().construction_id;
  r.metric = scores.front().metric;
  std::set<std::string> seen;
  for (const auto& s : scores) {
    if (s.metric != r.metric) {
      throw ValidationError("cannot rank mixed metrics " +
                            std::string(ToString(r.metric)) + " and " +
                            std::string(ToString(s.metric)));
    }
    if (s.construction_id != r.construction_id) {
      throw ValidationError("cannot rank across constructions '" +
                            r.construction_id + "' and '" + s.construction_id +
                            "'");
    }
    if (!seen.insert(s.model_id).second) {
      throw ValidationError("model '" + s.model_id + "' ranked twice");
    }
    r.entries.push_back({s.model_id, s, 0});
  }
  std::sort(r.entries.begin(), r.entries.end(),
            [](const RankedModel& a, const RankedModel& b) {
              const int c = CompareBias(a.score, b.score);
              return c != 0 ? c < 0 : a.model_id < b.model_id;
            });
  for (std::size_t i = 0; i < r.entries.size(); ++i) {
    const bool tied =
        i > 0 && CompareBias(r.entries[i - 1].score, r.entries[i].score) == 0;
    r.entries[i].rank = tied ? r.entries[i - 1].rank : static_cast<int>(i) + 1;
  }
  return r;
}

ModelPair ModelPair::Of(std::string a, std::string b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

InversionReport RankInversions(const Ranking& a, const Ranking& b) {
  if (a.metric != b.metric) {
    throw ValidationError("rankings '" + a.construction_id + "' and '" +
                          b.construction_id + "' use different metrics");
  }
  if (ModelSet(a) != ModelSet(b)) {
    throw ValidationError("rankings '" + a.construction_id + "' and '" +
                          b.construction_id + "' cover different models");
  }
  InversionReport out;
  out.a_id = a.construction_id;
  out.b_id = b.construction_id;
  const auto& ea = a.entries;
  for (std::size_t i = 0; i < ea.size(); ++i) {
    for (std::size_t j = i + 1; j < ea.size(); ++j) {
      const int in_a = CompareBias(ea[i].score, ea[j].score);
      const int in_b = CompareBias(b.Find(ea[i].model_id)->score,
                                   b.Find(ea[j].model_id)->score);
      if (in_a * in_b < 0) {
        out.inversions.push_back(ModelPair::Of(ea[i].model_id, ea[j].model_id));
      }
    }
  }
  std::sort(out.inversions.begin(), out.inversions.end());
  out.kendall_distance = out.inversions.size();
  return out;
}

double Quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ValidationError("quantile of an empty sample");
  const double pos = (sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

DistributionSummary Summarize(std::span<const double> values) {
  if (values.empty()) throw ValidationError("summary of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  DistributionSummary s;
  s.n = v.size();
  double sum = 0;
  for (double x : v) sum += x;
  s.mean = sum / s.n;
  if (s.n > 1) {
    double ss = 0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / (s.n - 1));
  }
  s.min = v.front();
  s.max = v.back();
  s.q1 = Quantile(v, 0.25);
  s.median = Quantile(v, 0.5);
  s.q3 = Quantile(v, 0.75);
  return s;
}

std::vector<double> TrialDistribution::values() const {
  std::vector<double> out;
  out.reserve(scores.size());
  for (const auto& s : scores) out.push_back(s.value());
  return out;
}

std::vector<TrialDistribution> SubsamplingDistribution(
    std::span<const PairInstance> baseline, const TrialPredictor& predictor,
    double proportion, std::size_t trials, uint64_t base_seed,
    std::size_t jobs) {
  if (trials == 0) throw ValidationError("trials must be at least 1");
  std::vector<ConstructionDescriptor> descs;
  descs.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    descs.push_back(ConstructionDescriptor::Subsample(
        Benchmark::kBiasNli, proportion, base_seed, t));
  }
  std::vector<std::map<std::string, BiasScore>> results(trials);
  ParallelFor(trials, jobs, [&](std::size_t t) {
    const auto data = ApplyConstruction(baseline, descs[t], kNoPools);
    std::map<std::string, std::vector<Prediction>> by_model;
    for (auto& p : predictor(descs[t], data)) {
      by_model[p.model_id].push_back(std::move(p));
    }
    for (const auto& [model, preds] : by_model) {
      results[t].emplace(model, FractionNeutral(data, preds));
    }
  });

  std::vector<TrialDistribution> out;
  for (const auto& [model, score] : results.front()) {
    TrialDistribution d;
    d.model_id = model;
    d.metric = score.metric;
    d.proportion = proportion;
    out.push_back(std::move(d));
  }
  for (std::size_t t = 0; t < trials; ++t) {
    if (results[t].size() != out.size()) {
      throw ValidationError("trial " + descs[t].id +
                            " has predictions from a different model set");
    }
    for (auto& d : out) {
      auto it = results[t].find(d.model_id);
      if (it == results[t].end()) {
        throw ValidationError("trial " + descs[t].id + " has no predictions " +
                              "from model '" + d.model_id + "'");
      }
      d.seeds.push_back(descs[t].seed());
      d.scores.push_back(it->second);
    }
  }
  for (auto& d : out) {
    const auto v = d.values();
    d.summary = Summarize(v);
  }
  return out;
}

double DistributionOverlap(const TrialDistribution& a,
                           const TrialDistribution& b, const BiasScore& full_a,
                           const BiasScore& full_b) {
  if (a.scores.size() != b.scores.size() || a.seeds != b.seeds) {
    throw ValidationError("distributions of '" + a.model_id + "' and '" +
                          b.model_id + "' are not paired by trial");
  }
  if (a.scores.empty()) throw ValidationError("distributions have no trials");
  int full = CompareBias(full_a, full_b);
  if (full == 0) full = a.model_id < b.model_id ? -1 : 1;
  std::size_t flipped = 0;
  for (std::size_t t = 0; t < a.scores.size(); ++t) {
    if (CompareBias(a.scores[t], b.scores[t]) * full < 0) ++flipped;
  }
  return static_cast<double>(flipped) / a.scores.size();
}

}  // namespace bias_audit
