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

#include "bias_audit/schema.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "bias_audit/error.h"
#include "bias_audit/fnv.h"
#include "bias_audit/sectioned_config.h"
#include "bias_audit/text.h"

namespace bias_audit {
namespace {

bool IsSlotChar(char c) { return (c >= 'A' && c <= 'Z') || c == '_'; }

std::size_t CountPlaceholder(std::string_view text, std::string_view name) {
  const std::string token = "$" + std::string(name);
  std::size_t count = 0;
  std::size_t pos = text.find(token);
  while (pos != std::string_view::npos) {
    const std::size_t end = pos + token.size();
    if (end == text.size() || !IsSlotChar(text[end])) ++count;
    pos = text.find(token, pos + 1);
  }
  return count;
}

bool HasDeterminerBefore(std::string_view text, std::string_view name) {
  const std::string token = "$" + std::string(name);
  const std::size_t pos = text.find(token);
  if (pos == std::string_view::npos || pos == 0) return false;
  std::size_t e = pos;
  while (e > 0 && text[e - 1] == ' ') --e;
  std::size_t b = e;
  while (b > 0 && text[b - 1] != ' ') --b;
  const std::string det = text::ToLower(text.substr(b, e - b));
  return det == "the" || det == "a" || det == "an";
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

constexpr std::string_view kUpstreamHeader = "occupation(0)";

}  // namespace

std::string_view ToString(Task task) {
  return task == Task::kCoref ? "coref" : "nli";
}

std::string_view ToString(AnswerRole role) {
  return role == AnswerRole::kOccupation ? "occupation" : "participant";
}

std::string_view ToString(Gender gender) {
  switch (gender) {
    case Gender::kMale:
      return "male";
    case Gender::kFemale:
      return "female";
    case Gender::kNeutral:
      return "neutral";
  }
  return "neutral";
}

std::string_view ToString(PronounCase pcase) {
  switch (pcase) {
    case PronounCase::kNominative:
      return "nominative";
    case PronounCase::kAccusative:
      return "accusative";
    case PronounCase::kPossessive:
      return "possessive";
  }
  return "nominative";
}

Task ParseTask(std::string_view s) {
  if (s == "coref") return Task::kCoref;
  if (s == "nli") return Task::kNli;
  throw ValidationError("unknown task '" + std::string(s) + "'");
}

AnswerRole ParseAnswerRole(std::string_view s) {
  if (s == "occupation") return AnswerRole::kOccupation;
  if (s == "participant") return AnswerRole::kParticipant;
  throw ValidationError("unknown answer role '" + std::string(s) + "'");
}

Gender ParseGender(std::string_view s) {
  if (s == "male") return Gender::kMale;
  if (s == "female") return Gender::kFemale;
  if (s == "neutral") return Gender::kNeutral;
  throw ValidationError("unknown gender '" + std::string(s) + "'");
}

PronounCase ParsePronounCase(std::string_view s) {
  if (s == "nominative") return PronounCase::kNominative;
  if (s == "accusative") return PronounCase::kAccusative;
  if (s == "possessive") return PronounCase::kPossessive;
  throw ValidationError("unknown pronoun case '" + std::string(s) + "'");
}

namespace slot {

bool IsKnown(std::string_view name) {
  return name == kOccupation || name == kParticipant || name == kSubject ||
         name == kVerb || name == kObject || PronounCaseOf(name).has_value();
}

std::optional<PronounCase> PronounCaseOf(std::string_view name) {
  if (name == kNomPronoun) return PronounCase::kNominative;
  if (name == kAccPronoun) return PronounCase::kAccusative;
  if (name == kPossPronoun) return PronounCase::kPossessive;
  return std::nullopt;
}

}  // namespace slot

std::vector<std::string> ExtractSlots(std::string_view text) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '$') continue;
    std::size_t j = i + 1;
    while (j < text.size() && IsSlotChar(text[j])) ++j;
    if (j == i + 1) continue;
    std::string name(text.substr(i + 1, j - i - 1));
    if (!slot::IsKnown(name)) {
      throw ValidationError("unknown placeholder $" + name);
    }
    if (std::find(out.begin(), out.end(), name) == out.end()) {
      out.push_back(std::move(name));
    }
    i = j - 1;
  }
  return out;
}

void ValidateTemplate(const Template& t, const std::string& where) {
  const std::string ctx = where + " (template '" + t.id + "')";
  if (t.id.empty()) throw ValidationError(where + ": empty template id");
  std::vector<std::string> found;
  try {
    found = ExtractSlots(t.text);
  } catch (const ValidationError& e) {
    throw ValidationError(ctx + ": " + e.what());
  }
  for (const auto& s : found) {
    if (std::find(t.slots.begin(), t.slots.end(), s) == t.slots.end()) {
      throw ValidationError(ctx + ": placeholder $" + s +
                            " is not a declared slot");
    }
  }
  for (const auto& s : t.slots) {
    if (std::find(found.begin(), found.end(), s) == found.end()) {
      throw ValidationError(ctx + ": text lacks declared slot $" + s);
    }
  }
  auto has = [&](std::string_view name) {
    return std::find(t.slots.begin(), t.slots.end(), name) != t.slots.end();
  };
  if (t.task == Task::kCoref) {
    if (CountPlaceholder(t.text, slot::kOccupation) != 1) {
      throw ValidationError(ctx +
                            ": coref template needs exactly one $OCCUPATION");
    }
    if (CountPlaceholder(t.text, slot::kParticipant) != 1) {
      throw ValidationError(ctx +
                            ": coref template needs exactly one $PARTICIPANT");
    }
    const bool any_pronoun = has(slot::kNomPronoun) ||
                             has(slot::kAccPronoun) || has(slot::kPossPronoun);
    if (!any_pronoun) {
      throw ValidationError(ctx + ": coref template has no pronoun slot");
    }
    if (has(slot::kSubject) || has(slot::kVerb) || has(slot::kObject)) {
      throw ValidationError(ctx + ": coref template uses an nli slot");
    }
    if (!HasDeterminerBefore(t.text, slot::kOccupation) ||
        !HasDeterminerBefore(t.text, slot::kParticipant)) {
      throw ValidationError(
          ctx + ": entity placeholders must follow 'the', 'a' or 'an'");
    }
    if (!t.answer_role) {
      throw ValidationError(ctx + ": coref template lacks an answer role");
    }
    if (t.occupation.empty() || t.participant.empty()) {
      throw ValidationError(ctx +
                            ": coref template lacks occupation/participant");
    }
  } else {
    if (CountPlaceholder(t.text, slot::kSubject) != 1) {
      throw ValidationError(ctx + ": nli template needs exactly one $SUBJECT");
    }
    for (const auto& s : t.slots) {
      if (s != slot::kSubject && s != slot::kVerb && s != slot::kObject) {
        throw ValidationError(ctx + ": nli template uses coref slot $" + s);
      }
    }
    if (t.gold_label != std::string(kNeutralLabel)) {
      throw ValidationError(ctx + ": nli gold label must be 'neutral'");
    }
  }
}

void Lexicon::Validate(Task task) const {
  auto require = [](const std::vector<std::string>& list,
                    std::string_view name) {
    if (list.empty()) {
      throw ValidationError("lexicon list [" + std::string(name) +
                            "] is empty");
    }
  };
  require(occupations, "occupations");
  if (task == Task::kCoref) {
    require(participants, "participants");
    for (Gender g : kAllGenders) {
      for (PronounCase c : {PronounCase::kNominative, PronounCase::kAccusative,
                            PronounCase::kPossessive}) {
        auto it = pronoun_forms.find({g, c});
        if (it == pronoun_forms.end() || it->second.empty()) {
          throw ValidationError("lexicon lacks pronoun form (" +
                                std::string(ToString(g)) + ", " +
                                std::string(ToString(c)) + ")");
        }
      }
    }
  } else {
    for (Gender g : {Gender::kMale, Gender::kFemale}) {
      auto it = gendered_nouns.find(g);
      if (it == gendered_nouns.end() || it->second.empty()) {
        throw ValidationError("lexicon list [gendered_nouns." +
                              std::string(ToString(g)) + "] is empty");
      }
    }
    require(verbs, "verbs");
    require(objects, "objects");
  }
}

const std::string& Lexicon::Pronoun(Gender g, PronounCase c) const {
  auto it = pronoun_forms.find({g, c});
  if (it == pronoun_forms.end()) {
    throw ValidationError("lexicon lacks pronoun form (" +
                          std::string(ToString(g)) + ", " +
                          std::string(ToString(c)) + ")");
  }
  return it->second;
}

namespace {

// Canonical id serialization over (name, value) pairs sorted by name.
// `skip` bytes of every name are dropped (the stored "slot." prefix).
template <typename It>
uint64_t HashFillers(std::string_view template_id,
                     std::string_view construction_id, It begin, It end,
                     std::size_t skip) {
  Fnv1a64 h;
  h.Update("bias-audit/v1\x1f");
  h.Update(template_id);
  h.Update("\x1f");
  h.Update(construction_id);
  h.Update("\x1f");
  for (It it = begin; it != end; ++it) {
    h.Update(std::string_view(it->first).substr(skip));
    h.Update("\x1e");
    h.Update(it->second);
    h.Update("\x1f");
  }
  return h.digest();
}

}  // namespace

uint64_t InstanceHash(std::string_view template_id, const Fillers& fillers,
                      std::string_view construction_id) {
  return HashFillers(template_id, construction_id, fillers.begin(),
                     fillers.end(), 0);
}

std::string StoredInstanceId(const std::map<std::string, std::string>& metadata,
                             std::string_view construction_id) {
  const auto tid = metadata.find(std::string(meta::kTemplateId));
  if (tid == metadata.end()) {
    throw ValidationError("item metadata lacks a template id");
  }
  const std::string prefix(meta::kSlotPrefix);
  auto end = metadata.lower_bound(prefix);
  const auto begin = end;
  while (end != metadata.end() &&
         end->first.compare(0, prefix.size(), prefix) == 0) {
    ++end;
  }
  return ToHex64(
      HashFillers(tid->second, construction_id, begin, end, prefix.size()));
}

std::string InstanceIdUnchecked(std::string_view template_id,
                                const Fillers& fillers,
                                std::string_view construction_id) {
  return ToHex64(InstanceHash(template_id, fillers, construction_id));
}

std::string InstanceId(const Template& t, const Fillers& fillers,
                       std::string_view construction_id) {
  for (const auto& s : t.slots) {
    if (fillers.find(s) == fillers.end()) {
      throw ValidationError("template '" + t.id + "': no filler for slot $" +
                            s);
    }
  }
  return InstanceIdUnchecked(t.id, fillers, construction_id);
}

Fillers StoredFillers(const std::map<std::string, std::string>& metadata) {
  Fillers out;
  const std::string prefix(meta::kSlotPrefix);
  for (auto it = metadata.lower_bound(prefix);
       it != metadata.end() && it->first.compare(0, prefix.size(), prefix) == 0;
       ++it) {
    out.emplace(it->first.substr(prefix.size()), it->second);
  }
  return out;
}

std::vector<Template> ParseTemplates(std::string_view content, Task task,
                                     const std::string& source_name) {
  std::vector<Template> out;
  std::set<std::string> ids;
  bool upstream = false;
  int line_no = 0;
  for (auto line : text::Split(content, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::Trim(line).empty() || line[0] == '#') continue;
    const std::string where = source_name + ":" + std::to_string(line_no);
    auto cols = text::Split(line, '\t');
    for (auto& c : cols) c = text::Trim(c);
    if (out.empty() && !upstream && cols[0] == kUpstreamHeader) {
      upstream = true;
      continue;
    }
    Template t;
    if (upstream) {
      if (cols.size() != 4) {
        throw ValidationError(where + ": expected 4 columns, got " +
                              std::to_string(cols.size()));
      }
      if (task != Task::kCoref) {
        throw ValidationError(where + ": upstream schema rows are coref");
      }
      if (cols[2] != "0" && cols[2] != "1") {
        throw ValidationError(where + ": answer must be 0 or 1");
      }
      t.task = Task::kCoref;
      t.occupation = cols[0];
      t.participant = cols[1];
      t.answer_role =
          cols[2] == "0" ? AnswerRole::kOccupation : AnswerRole::kParticipant;
      t.text = cols[3];
      t.id = cols[0] + "." + cols[1] + "." + cols[2];
    } else {
      if (cols.size() < 4) {
        throw ValidationError(where + ": expected at least 4 columns, got " +
                              std::to_string(cols.size()));
      }
      t.id = cols[0];
      try {
        t.task = ParseTask(cols[1]);
      } catch (const ValidationError& e) {
        throw ValidationError(where + " (template '" + t.id + "'): " +
                              e.what());
      }
      if (t.task != task) {
        throw ValidationError(where + " (template '" + t.id + "'): task '" +
                              cols[1] + "' where '" +
                              std::string(ToString(task)) + "' was requested");
      }
      t.text = cols[3];
      if (t.task == Task::kCoref) {
        if (cols.size() != 6) {
          throw ValidationError(
              where + " (template '" + t.id +
              "'): coref rows need occupation and participant columns");
        }
        try {
          t.answer_role = ParseAnswerRole(cols[2]);
        } catch (const ValidationError& e) {
          throw ValidationError(where + " (template '" + t.id + "'): " +
                                e.what());
        }
        t.occupation = cols[4];
        t.participant = cols[5];
      } else {
        if (cols.size() != 4) {
          throw ValidationError(where + " (template '" + t.id +
                                "'): nli rows have exactly 4 columns");
        }
        t.gold_label = cols[2];
      }
    }
    try {
      t.slots = ExtractSlots(t.text);
    } catch (const ValidationError& e) {
      throw ValidationError(where + " (template '" + t.id + "'): " + e.what());
    }
    // Slots an entity column implies must appear in the text.
    auto require_slot = [&](std::string_view name) {
      if (std::find(t.slots.begin(), t.slots.end(), name) == t.slots.end()) {
        t.slots.emplace_back(name);
      }
    };
    if (t.task == Task::kCoref) {
      require_slot(slot::kOccupation);
      require_slot(slot::kParticipant);
    } else {
      require_slot(slot::kSubject);
    }
    ValidateTemplate(t, where);
    if (!ids.insert(t.id).second) {
      throw ValidationError(where + ": duplicate template id '" + t.id + "'");
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Template> LoadTemplates(const std::filesystem::path& path,
                                    Task task) {
  return ParseTemplates(ReadFile(path), task, path.string());
}

std::string SerializeTemplates(const std::vector<Template>& templates) {
  std::ostringstream out;
  out << "# columns: id, task, answer_role|gold_label, text"
         "[, occupation, participant]\n";
  for (const auto& t : templates) {
    out << t.id << '\t' << ToString(t.task) << '\t';
    if (t.task == Task::kCoref) {
      out << ToString(t.answer_role.value_or(AnswerRole::kOccupation)) << '\t'
          << t.text << '\t' << t.occupation << '\t' << t.participant;
    } else {
      out << t.gold_label.value_or(std::string(kNeutralLabel)) << '\t'
          << t.text;
    }
    out << '\n';
  }
  return out.str();
}

Lexicon ParseLexicon(std::string_view content, const std::string& source_name) {
  const auto cfg = SectionedConfig::Parse(content, source_name);
  Lexicon lex;
  for (const auto& name : cfg.section_names()) {
    if (name == "occupations") {
      lex.occupations = cfg.List(name);
    } else if (name == "participants") {
      lex.participants = cfg.List(name);
    } else if (name == "generic_participants") {
      lex.generic_participants = cfg.List(name);
    } else if (name == "verbs") {
      lex.verbs = cfg.List(name);
    } else if (name == "objects") {
      lex.objects = cfg.List(name);
    } else if (name.rfind("gendered_nouns.", 0) == 0) {
      const Gender g = ParseGender(name.substr(15));
      lex.gendered_nouns[g] = cfg.List(name);
    } else if (name == "pronouns") {
      for (const auto& [key, value] : cfg.Pairs(name)) {
        const auto dot = key.find('.');
        if (dot == std::string::npos) {
          throw ValidationError(source_name + ": pronoun key '" + key +
                                "' must be <gender>.<case>");
        }
        lex.pronoun_forms[{ParseGender(key.substr(0, dot)),
                           ParsePronounCase(key.substr(dot + 1))}] = value;
      }
    } else {
      throw ValidationError(source_name + ": unknown lexicon section [" +
                            name + "]");
    }
  }
  // A word may not appear under two genders.
  std::set<std::string> gendered;
  for (const auto& [g, words] : lex.gendered_nouns) {
    for (const auto& w : words) {
      if (!gendered.insert(w).second) {
        throw ValidationError(source_name + ": duplicate entry '" + w +
                              "' across gendered_nouns lists");
      }
    }
  }
  return lex;
}

Lexicon LoadLexicon(const std::filesystem::path& path) {
  return ParseLexicon(ReadFile(path), path.string());
}

std::string SerializeLexicon(const Lexicon& lex) {
  std::ostringstream out;
  auto list = [&](std::string_view name, const std::vector<std::string>& v) {
    if (v.empty()) return;
    out << '[' << name << "]\n";
    for (const auto& w : v) out << w << '\n';
    out << '\n';
  };
  list("occupations", lex.occupations);
  list("participants", lex.participants);
  list("generic_participants", lex.generic_participants);
  for (const auto& [g, words] : lex.gendered_nouns) {
    list("gendered_nouns." + std::string(ToString(g)), words);
  }
  list("verbs", lex.verbs);
  list("objects", lex.objects);
  if (!lex.pronoun_forms.empty()) {
    out << "[pronouns]\n";
    for (const auto& [key, form] : lex.pronoun_forms) {
      out << ToString(key.first) << '.' << ToString(key.second) << " = "
          << form << '\n';
    }
  }
  return out.str();
}

}  // namespace bias_audit
