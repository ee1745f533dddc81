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

// Deterministic toy predictors. They stand in for real models when checking
// the metric pipeline and show how a non-social quirk (preferring nearby
// antecedents, reacting to "not") moves the measured social bias.

#ifndef BIAS_AUDIT_REFERENCE_MODELS_H_
#define BIAS_AUDIT_REFERENCE_MODELS_H_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bias_audit/metrics.h"
#include "bias_audit/schema.h"
#include "bias_audit/sectioned_config.h"

namespace bias_audit {

// occupation -> associated gender (male or female only).
using StereotypeMap = std::map<std::string, Gender>;

// Reads `occupation = male|female` lines from a config section.
StereotypeMap LoadStereotypeMap(const SectionedConfig& config,
                                std::string_view section);

struct BlendWeights {
  double w_stereotype = 0;
  double w_proximity = 1;

  // Nonnegative, finite, not both zero.
  void Validate() const;
};

// Token distance from the closest token of a candidate's first mention to
// the first occurrence of the pronoun, over ContentTokens.
std::size_t MentionDistance(const Instance& instance,
                            std::string_view candidate);

// The candidate closest to the pronoun; ties go to the earlier mention.
std::string PositionalResolve(const Instance& instance);
// The occupation when its mapped gender equals the pronoun gender, else the
// participant. Throws if the occupation is unmapped.
std::string StereotypeResolve(const Instance& instance,
                              const StereotypeMap& map);
// argmax over candidates of
//   w_stereotype * [candidate is the stereotyped answer]
//   + w_proximity / (1 + distance)
// with ties to the earlier mention. Unmapped occupations give no candidate
// the stereotype term.
std::string BlendedResolve(const Instance& instance, const StereotypeMap& map,
                           const BlendWeights& weights);
// "entailment" when the map associates the premise occupation with the
// hypothesis subject's gender and neither text contains "not"; otherwise
// "neutral".
std::string OverlapNli(const PairInstance& pair, const StereotypeMap& map);

enum class ModelKind { kPositional, kStereotype, kBlended, kOverlapNli };

std::string_view ToString(ModelKind kind);
ModelKind ParseModelKind(std::string_view s);

class ReferenceModel {
 public:
  ReferenceModel(std::string name, ModelKind kind, StereotypeMap map,
                 BlendWeights weights);

  const std::string& name() const { return name_; }
  ModelKind kind() const { return kind_; }
  Task task() const;
  const StereotypeMap& stereotypes() const { return map_; }
  const BlendWeights& weights() const { return weights_; }

  std::string Answer(const Instance& instance) const;
  std::string Answer(const PairInstance& pair) const;
  std::vector<Prediction> Predict(std::span<const Instance> dataset) const;
  std::vector<Prediction> Predict(std::span<const PairInstance> dataset) const;

 private:
  std::string name_;
  ModelKind kind_;
  StereotypeMap map_;
  BlendWeights weights_;
};

// Models declared in a config as
//   [model.NAME]  kind = ..., stereotypes = MAP, w_stereotype, w_proximity
//   [stereotypes.MAP]  occupation = gender
class ModelRegistry {
 public:
  static ModelRegistry Parse(const SectionedConfig& config);
  static ModelRegistry Load(const std::filesystem::path& path);

  // Model names in file order.
  std::vector<std::string> names() const;
  bool Has(std::string_view name) const;
  const ReferenceModel& Get(std::string_view name) const;

 private:
  std::vector<ReferenceModel> models_;
};

}  // namespace bias_audit

#endif  // BIAS_AUDIT_REFERENCE_MODELS_H_
