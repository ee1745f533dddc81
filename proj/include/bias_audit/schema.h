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

// Core domain types of the benchmarks and loaders for their source files.

#ifndef BIAS_AUDIT_SCHEMA_H_
#define BIAS_AUDIT_SCHEMA_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bias_audit {

enum class Task { kCoref, kNli };
enum class AnswerRole { kOccupation, kParticipant };
enum class Gender { kMale, kFemale, kNeutral };
enum class PronounCase { kNominative, kAccusative, kPossessive };

std::string_view ToString(Task task);
std::string_view ToString(AnswerRole role);
std::string_view ToString(Gender gender);
std::string_view ToString(PronounCase pcase);
Task ParseTask(std::string_view s);
AnswerRole ParseAnswerRole(std::string_view s);
Gender ParseGender(std::string_view s);
PronounCase ParsePronounCase(std::string_view s);

inline constexpr Gender kAllGenders[] = {Gender::kMale, Gender::kFemale,
                                         Gender::kNeutral};

// Placeholder names (written `$NAME` in template text).
namespace slot {
inline constexpr std::string_view kOccupation = "OCCUPATION";
inline constexpr std::string_view kParticipant = "PARTICIPANT";
inline constexpr std::string_view kSubject = "SUBJECT";
inline constexpr std::string_view kVerb = "VERB";
inline constexpr std::string_view kObject = "OBJECT";
inline constexpr std::string_view kNomPronoun = "NOM_PRONOUN";
inline constexpr std::string_view kAccPronoun = "ACC_PRONOUN";
inline constexpr std::string_view kPossPronoun = "POSS_PRONOUN";

bool IsKnown(std::string_view name);
// Case of a pronoun slot, or nullopt for non-pronoun slots.
std::optional<PronounCase> PronounCaseOf(std::string_view name);
}  // namespace slot

inline constexpr std::string_view kNeutralLabel = "neutral";

struct Template {
  std::string id;
  Task task = Task::kCoref;
  std::string text;
  // Placeholder names in order of first appearance.
  std::vector<std::string> slots;
  std::optional<AnswerRole> answer_role;  // coref
  std::optional<std::string> gold_label;  // nli
  // Entities bound to a coref template.
  std::string occupation;
  std::string participant;

  bool operator==(const Template&) const = default;
};

// Placeholder names appearing in `text`, in order of first appearance.
// Throws on unknown placeholders.
std::vector<std::string> ExtractSlots(std::string_view text);

// Checks the per-task invariants of a template. `where` prefixes messages.
void ValidateTemplate(const Template& t, const std::string& where);

struct Lexicon {
  std::vector<std::string> occupations;
  std::vector<std::string> participants;
  // Generic participant realizations ("someone") used in addition to each
  // template's own participant.
  std::vector<std::string> generic_participants;
  std::map<Gender, std::vector<std::string>> gendered_nouns;
  std::vector<std::string> verbs;
  std::vector<std::string> objects;
  std::map<std::pair<Gender, PronounCase>, std::string> pronoun_forms;

  bool operator==(const Lexicon&) const = default;

  // Throws unless every list the task references is non-empty and (coref)
  // pronoun forms cover all genders and cases.
  void Validate(Task task) const;

  const std::string& Pronoun(Gender g, PronounCase c) const;
};

struct Instance {
  std::string id;
  std::string construction_id;
  Task task = Task::kCoref;
  std::string text;
  std::vector<std::string> candidates;
  std::string pronoun;
  Gender pronoun_gender = Gender::kMale;
  std::string gold;
  std::map<std::string, std::string> metadata;

  bool operator==(const Instance&) const = default;
};

struct PairInstance {
  std::string id;
  std::string construction_id;
  std::string premise;
  std::string hypothesis;
  std::string gold_label = std::string(kNeutralLabel);
  std::map<std::string, std::string> metadata;

  bool operator==(const PairInstance&) const = default;
};

// Metadata keys written by the generators.
namespace meta {
inline constexpr std::string_view kTemplateId = "template_id";
inline constexpr std::string_view kOccupation = "occupation";
inline constexpr std::string_view kParticipant = "participant";
inline constexpr std::string_view kParticipantKind = "participant_kind";
inline constexpr std::string_view kAnswerRole = "answer_role";
inline constexpr std::string_view kPairGroup = "pair_group";
inline constexpr std::string_view kSubject = "subject";
inline constexpr std::string_view kSubjectGender = "subject_gender";
inline constexpr std::string_view kVerb = "verb";
inline constexpr std::string_view kObject = "object";
inline constexpr std::string_view kPerturbation = "perturbation";
inline constexpr std::string_view kPerturbationValue = "perturbation_value";
// Slot fillers are stored under "slot.<NAME>" so ids can be re-derived.
inline constexpr std::string_view kSlotPrefix = "slot.";
}  // namespace meta

using Fillers = std::map<std::string, std::string>;

// Content-derived id: 64-bit FNV-1a over a canonical serialization of
// (template id, construction id, sorted fillers), as 16 hex digits.
// Throws when a template slot has no filler.
std::string InstanceId(const Template& t, const Fillers& fillers,
                       std::string_view construction_id);

// Same hash without the slot-coverage check; used when re-deriving ids from
// stored metadata.
uint64_t InstanceHash(std::string_view template_id, const Fillers& fillers,
                      std::string_view construction_id);
std::string InstanceIdUnchecked(std::string_view template_id,
                                const Fillers& fillers,
                                std::string_view construction_id);

// Id of a generated item from its stored template id and slot fillers;
// equals InstanceIdUnchecked(template id, StoredFillers(metadata), cid).
std::string StoredInstanceId(const std::map<std::string, std::string>& metadata,
                             std::string_view construction_id);

// Fillers recorded in an item's metadata.
Fillers StoredFillers(const std::map<std::string, std::string>& metadata);

// Template files. Two layouts are accepted:
//   canonical: id, task, answer_role|gold_label, text[, occupation,
//              participant]  (the last two required for coref)
//   upstream:  header "occupation(0) other-participant(1) answer sentence"
// Comment lines start with '#'.
std::vector<Template> ParseTemplates(std::string_view content, Task task,
                                     const std::string& source_name);
std::vector<Template> LoadTemplates(const std::filesystem::path& path,
                                    Task task);
// Canonical layout.
std::string SerializeTemplates(const std::vector<Template>& templates);

Lexicon ParseLexicon(std::string_view content, const std::string& source_name);
Lexicon LoadLexicon(const std::filesystem::path& path);
std::string SerializeLexicon(const Lexicon& lexicon);

}  // namespace bias_audit

#endif  // BIAS_AUDIT_SCHEMA_H_
