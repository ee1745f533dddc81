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

// End-to-end runs behind the command-line subcommands. Every run writes its
// files through one ordered writer, so outputs are byte-identical for equal
// configs regardless of `jobs`.

#ifndef BIAS_AUDIT_AUDIT_H_
#define BIAS_AUDIT_AUDIT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bias_audit/construction.h"
#include "bias_audit/metrics.h"
#include "bias_audit/stability.h"
#include "bias_audit/wire.h"

namespace bias_audit {

inline constexpr double kDefaultProportions[] = {0.10, 0.25, 0.50};
inline constexpr std::size_t kDefaultTrials = 100;

// Flag > BIAS_AUDIT_DATA_DIR > the build's default.
std::filesystem::path ResolveDataDir(
    const std::optional<std::filesystem::path>& flag);

struct AuditConfig {
  Benchmark benchmark = Benchmark::kWinogender;
  // Operator names, or "all" for every non-subsample operator. Empty means
  // "all" where a run needs a default.
  std::vector<std::string> constructions;
  bool constructions_given = false;
  std::vector<double> proportions;  // empty -> kDefaultProportions
  std::size_t trials = kDefaultTrials;
  uint64_t seed = 0;

  std::filesystem::path data_dir;
  // Empty paths resolve under data_dir.
  std::filesystem::path templates;
  std::filesystem::path lexicon;
  std::filesystem::path pools;
  std::filesystem::path synonyms;
  std::filesystem::path models_config;

  // Predictor sources: reference model names and prediction files.
  std::vector<std::string> models;
  std::vector<std::filesystem::path> prediction_files;
  // Directory holding manifest.json and datasets (score/stability/predict).
  std::filesystem::path datasets;
  // A scores.json from an earlier score run (stability).
  std::filesystem::path scores;
  std::filesystem::path out;
  std::size_t jobs = 1;

  // Fills empty paths from data_dir.
  void ResolvePaths();
  std::vector<double> EffectiveProportions() const;
  // Descriptors in run order. Throws before any work on invalid input.
  std::vector<ConstructionDescriptor> Descriptors(bool include_default) const;
};

// Scores of every (construction, model) cell plus table order.
struct ScoreTable {
  Metric metric = Metric::kMfMismatchPct;
  std::vector<std::string> constructions;  // non-subsample, row order
  std::vector<std::string> models;         // column order
  std::map<std::pair<std::string, std::string>, BiasScore> cells;
  // Subsample trial datasets; their scores are in `cells` as well.
  std::vector<ConstructionDescriptor> trial_descriptors;

  const BiasScore& At(const std::string& construction,
                      const std::string& model) const;
  bool Has(const std::string& construction, const std::string& model) const;
};

Manifest RunGenerate(const AuditConfig& config);
// Applies each configured construction to the baseline dataset file and
// records the result in the output manifest.
Manifest RunPerturb(const AuditConfig& config,
                    const std::filesystem::path& baseline_file);
ScoreTable RunScore(const AuditConfig& config);

struct StabilityResult {
  ScoreTable table;
  std::vector<Ranking> rankings;
  std::vector<InversionReport> inversions;  // each construction vs baseline
  // (proportion, model) -> distribution, proportions ascending.
  std::vector<TrialDistribution> distributions;
};

StabilityResult RunStability(const AuditConfig& config);
// Writes predictions of reference models for every dataset in a manifest.
void RunPredict(const AuditConfig& config);
// Plain-text rendering of the reports found in a directory.
std::string RenderReport(const std::filesystem::path& dir);

// Report files, shared by the runs and tests.
std::string ScoresCsv(const ScoreTable& table);
std::string DeltasCsv(const ScoreTable& table);
std::string ScoresJson(const ScoreTable& table);
ScoreTable ParseScoresJson(std::string_view json, const std::string& where);

}  // namespace bias_audit

#endif  // BIAS_AUDIT_AUDIT_H_
