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

#include "bias_audit/reference_models.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>

#include "bias_audit/error.h"
#include "bias_audit/text.h"

namespace bias_audit {
namespace {

constexpr std::string_view kModelPrefix = "model.";
constexpr std::string_view kStereotypePrefix = "stereotypes.";

const std::string& MetaOrThrow(const std::map<std::string, std::string>& md,
                               std::string_view key, const std::string& id) {
  auto it = md.find(std::string(key));
  if (it == md.end()) {
    throw ValidationError("item " + id + " has no '" + std::string(key) +
                          "' metadata");
  }
  return it->second;
}

// Candidate the stereotype points at, or nullptr for unmapped occupations.
const std::string* StereotypedAnswer(const Instance& instance,
                                     const StereotypeMap& map) {
  const std::string& occ =
      MetaOrThrow(instance.metadata, meta::kOccupation, instance.id);
  const std::string& part =
      MetaOrThrow(instance.metadata, meta::kParticipant, instance.id);
  auto it = map.find(occ);
  if (it == map.end()) return nullptr;
  const std::string& want = it->second == instance.pronoun_gender ? occ : part;
  for (const auto& c : instance.candidates) {
    if (c == want) return &c;
  }
  throw ValidationError("instance " + instance.id + " lacks candidate '" +
                        want + "'");
}

double ParseWeight(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw ValidationError(where + ": invalid weight '" + s + "'");
  }
  return v;
}

}  // namespace

StereotypeMap LoadStereotypeMap(const SectionedConfig& config,
                                std::string_view section) {
  const std::string where = config.source_name() + " [" +
                            std::string(section) + "]";
  if (!config.HasSection(section)) {
    throw ValidationError(config.source_name() + ": no section [" +
                          std::string(section) + "]");
  }
  StereotypeMap out;
  for (const auto& [occ, g] : config.Pairs(section)) {
    const Gender gender = ParseGender(g);
    if (gender == Gender::kNeutral) {
      throw ValidationError(where + ": '" + occ +
                            "' must map to male or female");
    }
    out.emplace(occ, gender);
  }
  return out;
}

void BlendWeights::Validate() const {
  if (!std::isfinite(w_stereotype) || !std::isfinite(w_proximity) ||
      w_stereotype < 0 || w_proximity < 0) {
    throw ValidationError("blend weights must be finite and nonnegative");
  }
  if (w_stereotype == 0 && w_proximity == 0) {
    throw ValidationError("blend weights must not both be zero");
  }
}

std::size_t MentionDistance(const Instance& instance,
                            std::string_view candidate) {
  const auto tokens = text::ContentTokens(instance.text);
  const auto cand = text::ContentTokens(candidate);
  const std::string pronoun = text::ToLower(instance.pronoun);
  const auto p = std::find(tokens.begin(), tokens.end(), pronoun);
  if (p == tokens.end()) {
    throw ValidationError("instance " + instance.id + " does not contain '" +
                          instance.pronoun + "'");
  }
  const std::size_t pi = p - tokens.begin();
  if (cand.empty() || cand.size() > tokens.size()) {
    throw ValidationError("instance " + instance.id + " does not mention '" +
                          std::string(candidate) + "'");
  }
  for (std::size_t i = 0; i + cand.size() <= tokens.size(); ++i) {
    if (!std::equal(cand.begin(), cand.end(), tokens.begin() + i)) continue;
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (std::size_t j = i; j < i + cand.size(); ++j) {
      best = std::min(best, j > pi ? j - pi : pi - j);
    }
    return best;
  }
  throw ValidationError("instance " + instance.id + " does not mention '" +
                        std::string(candidate) + "'");
}

std::string PositionalResolve(const Instance& instance) {
  if (instance.candidates.empty()) {
    throw ValidationError("instance " + instance.id + " has no candidates");
  }
  const std::string* best = nullptr;
  std::size_t best_d = 0;
  for (const auto& c : instance.candidates) {
    const std::size_t d = MentionDistance(instance, c);
    if (!best || d < best_d) {
      best = &c;
      best_d = d;
    }
  }
  return *best;
}

std::string StereotypeResolve(const Instance& instance,
                              const StereotypeMap& map) {
  const std::string* answer = StereotypedAnswer(instance, map);
  if (!answer) {
    throw ValidationError(
        "occupation '" +
        MetaOrThrow(instance.metadata, meta::kOccupation, instance.id) +
        "' is not in the stereotype map");
  }
  return *answer;
}

std::string BlendedResolve(const Instance& instance, const StereotypeMap& map,
                           const BlendWeights& weights) {
  if (instance.candidates.empty()) {
    throw ValidationError("instance " + instance.id + " has no candidates");
  }
  const std::string* stereo = StereotypedAnswer(instance, map);
  const std::string* best = nullptr;
  double best_score = 0;
  for (const auto& c : instance.candidates) {
    double s = weights.w_proximity / (1.0 + MentionDistance(instance, c));
    if (stereo && *stereo == c) s += weights.w_stereotype;
    if (!best || s > best_score) {
      best = &c;
      best_score = s;
    }
  }
  return *best;
}

std::string OverlapNli(const PairInstance& pair, const StereotypeMap& map) {
  const std::string& occ = MetaOrThrow(pair.metadata, meta::kOccupation,
                                       pair.id);
  const Gender subject =
      ParseGender(MetaOrThrow(pair.metadata, meta::kSubjectGender, pair.id));
  auto it = map.find(occ);
  if (it == map.end() || it->second != subject) {
    return std::string(kNeutralLabel);
  }
  if (text::HasContentToken(pair.premise, "not") ||
      text::HasContentToken(pair.hypothesis, "not")) {
    return std::string(kNeutralLabel);
  }
  return "entailment";
}

std::string_view ToString(ModelKind kind) {
  switch (kind) {
    case ModelKind::kPositional:
      return "positional";
    case ModelKind::kStereotype:
      return "stereotype";
    case ModelKind::kBlended:
      return "blended";
    case ModelKind::kOverlapNli:
      return "overlap_nli";
  }
  return "positional";
}

ModelKind ParseModelKind(std::string_view s) {
  if (s == "positional") return ModelKind::kPositional;
  if (s == "stereotype") return ModelKind::kStereotype;
  if (s == "blended") return ModelKind::kBlended;
  if (s == "overlap_nli") return ModelKind::kOverlapNli;
  throw ValidationError("unknown reference model kind '" + std::string(s) +
                        "'");
}

ReferenceModel::ReferenceModel(std::string name, ModelKind kind,
                               StereotypeMap map, BlendWeights weights)
    : name_(std::move(name)),
      kind_(kind),
      map_(std::move(map)),
      weights_(weights) {
  if (name_.empty()) throw ValidationError("reference model without a name");
  if (kind_ == ModelKind::kBlended) weights_.Validate();
}

Task ReferenceModel::task() const {
  return kind_ == ModelKind::kOverlapNli ? Task::kNli : Task::kCoref;
}

std::string ReferenceModel::Answer(const Instance& instance) const {
  switch (kind_) {
    case ModelKind::kPositional:
      return PositionalResolve(instance);
    case ModelKind::kStereotype:
      return StereotypeResolve(instance, map_);
    case ModelKind::kBlended:
      return BlendedResolve(instance, map_, weights_);
    case ModelKind::kOverlapNli:
      break;
  }
  throw ValidationError("model '" + name_ + "' does not answer coref items");
}

std::string ReferenceModel::Answer(const PairInstance& pair) const {
  if (kind_ != ModelKind::kOverlapNli) {
    throw ValidationError("model '" + name_ + "' does not answer nli items");
  }
  return OverlapNli(pair, map_);
}

std::vector<Prediction> ReferenceModel::Predict(
    std::span<const Instance> dataset) const {
  std::vector<Prediction> out;
  out.reserve(dataset.size());
  for (const auto& inst : dataset) out.push_back({inst.id, name_, Answer(inst)});
  return out;
}

std::vector<Prediction> ReferenceModel::Predict(
    std::span<const PairInstance> dataset) const {
  std::vector<Prediction> out;
  out.reserve(dataset.size());
  for (const auto& p : dataset) out.push_back({p.id, name_, Answer(p)});
  return out;
}

ModelRegistry ModelRegistry::Parse(const SectionedConfig& config) {
  ModelRegistry reg;
  for (const auto& section : config.section_names()) {
    if (section.rfind(kStereotypePrefix, 0) == 0) continue;
    if (section.rfind(kModelPrefix, 0) != 0) {
      throw ValidationError(config.source_name() + ": unknown section [" +
                            section + "]");
    }
    const std::string name = section.substr(kModelPrefix.size());
    const std::string where = config.source_name() + " [" + section + "]";
    std::map<std::string, std::string> kv;
    for (auto& [k, v] : config.Pairs(section)) kv.emplace(k, v);
    static const std::set<std::string> kKeys = {"kind", "stereotypes",
                                                "w_stereotype", "w_proximity"};
    for (const auto& [k, v] : kv) {
      if (!kKeys.count(k)) {
        throw ValidationError(where + ": unknown key '" + k + "'");
      }
    }
    if (!kv.count("kind")) throw ValidationError(where + ": missing kind");
    const ModelKind kind = ParseModelKind(kv["kind"]);
    StereotypeMap map;
    if (kind != ModelKind::kPositional) {
      if (!kv.count("stereotypes")) {
        throw ValidationError(where + ": missing stereotypes");
      }
      map = LoadStereotypeMap(
          config, std::string(kStereotypePrefix) + kv["stereotypes"]);
    }
    BlendWeights w;
    if (kind == ModelKind::kBlended) {
      if (!kv.count("w_stereotype") || !kv.count("w_proximity")) {
        throw ValidationError(where + ": blended models need w_stereotype "
                                      "and w_proximity");
      }
      w.w_stereotype = ParseWeight(kv["w_stereotype"], where);
      w.w_proximity = ParseWeight(kv["w_proximity"], where);
    }
    if (reg.Has(name)) {
      throw ValidationError(where + ": duplicate model '" + name + "'");
    }
    reg.models_.emplace_back(name, kind, std::move(map), w);
  }
  return reg;
}

ModelRegistry ModelRegistry::Load(const std::filesystem::path& path) {
  return Parse(SectionedConfig::Load(path));
}

std::vector<std::string> ModelRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& m : models_) out.push_back(m.name());
  return out;
}

bool ModelRegistry::Has(std::string_view name) const {
  return std::any_of(models_.begin(), models_.end(),
                     [&](const ReferenceModel& m) { return m.name() == name; });
}

const ReferenceModel& ModelRegistry::Get(std::string_view name) const {
  for (const auto& m : models_) {
    if (m.name() == name) return m;
  }
  throw ValidationError("unknown reference model '" + std::string(name) + "'");
}

}  // namespace bias_audit
