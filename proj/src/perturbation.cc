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

#include "bias_audit/perturbation.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bias_audit/error.h"
#include "bias_audit/fnv.h"
#include "bias_audit/sectioned_config.h"
#include "bias_audit/text.h"

namespace bias_audit {
namespace {

text::Span UniqueMatch(std::string_view text, std::string_view target) {
  if (target.empty()) throw ValidationError("empty perturbation target");
  const auto matches = text::FindWord(text, target);
  if (matches.empty()) {
    throw ValidationError("target '" + std::string(target) +
                          "' not found in: " + std::string(text));
  }
  if (matches.size() > 1) {
    throw ValidationError("target '" + std::string(target) +
                          "' is ambiguous in: " + std::string(text));
  }
  return matches.front();
}

bool IsClosingPunct(char c) {
  return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?';
}

const std::string& MetaOrThrow(const std::map<std::string, std::string>& m,
                               std::string_view key, const std::string& id) {
  auto it = m.find(std::string(key));
  if (it == m.end()) {
    throw ValidationError("item " + id + " lacks metadata '" +
                          std::string(key) + "'");
  }
  return it->second;
}

bool IsNegated(std::string_view s) {
  for (const auto& tok : text::ContentTokens(s)) {
    if (tok == "not" || tok == "never" ||
        (tok.size() > 3 && tok.compare(tok.size() - 3, 3, "n't") == 0)) {
      return true;
    }
  }
  return false;
}

void Tag(std::map<std::string, std::string>& metadata, Operator op,
         std::string_view value) {
  metadata[std::string(meta::kPerturbation)] = std::string(ToString(op));
  if (!value.empty()) {
    metadata[std::string(meta::kPerturbationValue)] = std::string(value);
  }
}

}  // namespace

PerturbationPools PerturbationPools::Load(
    const std::filesystem::path& pools_path,
    const std::filesystem::path& synonyms_path) {
  PerturbationPools pools;
  const auto cfg = SectionedConfig::Load(pools_path);
  pools.adjectives = cfg.List("adjectives");
  pools.clauses = cfg.List("clauses");
  for (const auto& [inflected, lemma] : cfg.Pairs("negation")) {
    pools.negations.emplace(inflected, lemma);
  }
  if (!synonyms_path.empty()) {
    pools.synonyms = LoadSynonymTable(synonyms_path);
  }
  return pools;
}

PerturbationSpec PerturbationSpec::For(const ConstructionDescriptor& desc,
                                       const PerturbationPools& pools) {
  PerturbationSpec spec;
  spec.op = desc.op;
  spec.clause_pool = pools.clauses;
  spec.adjective_pool = pools.adjectives;
  spec.synonym_table = pools.synonyms;
  spec.verb_negation_table = pools.negations;
  switch (desc.op) {
    case Operator::kClauseParticipant:
    case Operator::kAdjPreParticipant:
    case Operator::kAdjPostParticipant:
      spec.target = Target::kParticipant;
      break;
    case Operator::kClauses:
    case Operator::kNegation:
      spec.target = Target::kSubject;
      break;
    default:
      spec.target = Target::kOccupation;
  }
  spec.mode = (desc.op == Operator::kAdjPostOccupation ||
               desc.op == Operator::kAdjPostParticipant)
                  ? AdjectiveMode::kRelativeClause
                  : AdjectiveMode::kPreModifier;
  return spec;
}

void PerturbationSpec::Validate() const {
  switch (op) {
    case Operator::kClauseOccupation:
    case Operator::kClauseParticipant:
    case Operator::kClauses:
      if (clause_pool.empty()) {
        throw ValidationError(std::string(ToString(op)) +
                              " needs a non-empty clause pool");
      }
      break;
    case Operator::kAdjPreOccupation:
    case Operator::kAdjPostOccupation:
    case Operator::kAdjPreParticipant:
    case Operator::kAdjPostParticipant:
      if (adjective_pool.empty()) {
        throw ValidationError(std::string(ToString(op)) +
                              " needs a non-empty adjective pool");
      }
      break;
    case Operator::kNegation:
      if (verb_negation_table.empty()) {
        throw ValidationError("negation needs a verb negation table");
      }
      break;
    default:
      break;
  }
}

SynonymTable ParseSynonymTable(std::string_view content,
                               const std::string& source_name) {
  SynonymTable table;
  int line_no = 0;
  for (auto line : text::Split(content, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::Trim(line).empty() || line[0] == '#') continue;
    const auto cols = text::Split(line, '\t');
    const std::string where = source_name + ":" + std::to_string(line_no);
    if (cols.size() != 3) {
      throw ValidationError(where +
                            ": expected template_id, span, replacement");
    }
    SynonymEdit edit{text::Trim(cols[1]), text::Trim(cols[2])};
    if (edit.span.empty() || edit.replacement.empty()) {
      throw ValidationError(where + ": empty span or replacement");
    }
    table[text::Trim(cols[0])].push_back(std::move(edit));
  }
  return table;
}

SynonymTable LoadSynonymTable(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseSynonymTable(ss.str(), path.string());
}

void ValidateSynonymTable(const SynonymTable& table,
                          const std::vector<Template>& templates) {
  std::map<std::string, const Template*> by_id;
  for (const auto& t : templates) by_id[t.id] = &t;
  for (const auto& [id, edits] : table) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw ValidationError("synonym table references unknown template '" +
                            id + "'");
    }
    for (const auto& e : edits) {
      if (it->second->text.find(e.span) == std::string::npos) {
        throw ValidationError("synonym span '" + e.span +
                              "' does not occur in template '" + id + "'");
      }
    }
  }
}

std::string InsertClauseAfter(std::string_view text, std::string_view target,
                              std::string_view clause) {
  const std::string c = text::Trim(clause);
  if (c.empty()) throw ValidationError("clause must be non-empty");
  const auto m = UniqueMatch(text, target);
  std::string out(text.substr(0, m.end));
  out += ", ";
  out += c;
  // Sentence punctuation right after the noun closes the clause itself.
  if (m.end >= text.size() || !IsClosingPunct(text[m.end])) out += ",";
  out += text.substr(m.end);
  return out;
}

std::string InsertAdjectiveAt(std::string_view text, std::string_view target,
                              std::string_view adjective, AdjectiveMode mode) {
  const std::string adj = text::Trim(adjective);
  if (adj.empty()) throw ValidationError("adjective must be non-empty");
  const auto m = UniqueMatch(text, target);
  if (mode == AdjectiveMode::kRelativeClause) {
    return std::string(text.substr(0, m.end)) + " who was " + adj +
           std::string(text.substr(m.end));
  }
  if (text::IsIndefinitePronoun(text.substr(m.begin, m.end - m.begin))) {
    // "someone arrogant"
    return std::string(text.substr(0, m.end)) + " " + adj +
           std::string(text.substr(m.end));
  }
  // Locate the word before the noun to repair an indefinite article.
  std::size_t e = m.begin;
  while (e > 0 && text[e - 1] == ' ') --e;
  std::size_t b = e;
  while (b > 0 && text[b - 1] != ' ') --b;
  const std::string prev = text::ToLower(text.substr(b, e - b));
  std::string out;
  if (prev == "a" || prev == "an") {
    out = std::string(text.substr(0, b));
    out += text::MatchLeadingCase(text::IndefiniteArticleFor(adj),
                                  text.substr(b, e - b));
    out += std::string(text.substr(e, m.begin - e));
  } else {
    out = std::string(text.substr(0, m.begin));
  }
  if (m.begin == 0) {
    // Sentence-initial bare noun: the adjective takes the capital.
    out += text::MatchLeadingCase(adj, text.substr(m.begin));
    out += " ";
    std::string noun(text.substr(m.begin, m.end - m.begin));
    noun[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(noun[0])));
    out += noun;
  } else {
    out += adj + " ";
    out += std::string(text.substr(m.begin, m.end - m.begin));
  }
  out += std::string(text.substr(m.end));
  return out;
}

Instance InsertClause(const Instance& instance, std::string_view clause,
                      Target target) {
  if (target == Target::kSubject) {
    throw ValidationError("coref instances have no subject target");
  }
  const auto key =
      target == Target::kOccupation ? meta::kOccupation : meta::kParticipant;
  Instance out = instance;
  out.text = InsertClauseAfter(instance.text,
                               MetaOrThrow(instance.metadata, key, instance.id),
                               clause);
  Tag(out.metadata,
      target == Target::kOccupation ? Operator::kClauseOccupation
                                    : Operator::kClauseParticipant,
      text::Trim(clause));
  return out;
}

PairInstance InsertClause(const PairInstance& pair, std::string_view clause) {
  PairInstance out = pair;
  out.premise = InsertClauseAfter(
      pair.premise, MetaOrThrow(pair.metadata, meta::kOccupation, pair.id),
      clause);
  out.hypothesis = InsertClauseAfter(
      pair.hypothesis, MetaOrThrow(pair.metadata, meta::kSubject, pair.id),
      clause);
  Tag(out.metadata, Operator::kClauses, text::Trim(clause));
  return out;
}

Instance InsertAdjective(const Instance& instance, std::string_view adjective,
                         Target target, AdjectiveMode mode) {
  if (target == Target::kSubject) {
    throw ValidationError("coref instances have no subject target");
  }
  const bool occ = target == Target::kOccupation;
  Instance out = instance;
  out.text = InsertAdjectiveAt(
      instance.text,
      MetaOrThrow(instance.metadata,
                  occ ? meta::kOccupation : meta::kParticipant, instance.id),
      adjective, mode);
  Operator op;
  if (mode == AdjectiveMode::kPreModifier) {
    op = occ ? Operator::kAdjPreOccupation : Operator::kAdjPreParticipant;
  } else {
    op = occ ? Operator::kAdjPostOccupation : Operator::kAdjPostParticipant;
  }
  Tag(out.metadata, op, text::Trim(adjective));
  return out;
}

Instance SubstituteSynonyms(const Instance& instance,
                            const SynonymTable& table) {
  Instance out = instance;
  auto tid = instance.metadata.find(std::string(meta::kTemplateId));
  if (tid == instance.metadata.end()) {
    throw ValidationError("instance " + instance.id + " lacks a template id");
  }
  auto it = table.find(tid->second);
  if (it == table.end() || it->second.empty()) return out;

  std::vector<std::string> identity = instance.candidates;
  identity.push_back(instance.pronoun);
  for (const auto& [slot_name, filler] : StoredFillers(instance.metadata)) {
    identity.push_back(filler);
  }
  std::string applied;
  for (const auto& edit : it->second) {
    for (const auto& word : identity) {
      if (word.empty()) continue;
      if (!text::FindWord(edit.span, word).empty() ||
          !text::FindWord(edit.replacement, word).empty()) {
        throw ValidationError("synonym edit '" + edit.span + "' -> '" +
                              edit.replacement + "' touches identity word '" +
                              word + "'");
      }
    }
    const auto matches = text::FindWord(out.text, edit.span);
    if (matches.empty()) {
      throw ValidationError("synonym span '" + edit.span +
                            "' not found in: " + out.text);
    }
    const auto m = matches.front();
    out.text = out.text.substr(0, m.begin) +
               text::MatchLeadingCase(
                   edit.replacement,
                   std::string_view(out.text).substr(m.begin)) +
               out.text.substr(m.end);
    if (!applied.empty()) applied += "; ";
    applied += edit.span + " -> " + edit.replacement;
  }
  Tag(out.metadata, Operator::kSynonyms, applied);
  return out;
}

PairInstance NegateVerb(const PairInstance& pair, const NegationTable& table) {
  if (IsNegated(pair.premise) || IsNegated(pair.hypothesis)) {
    throw ValidationError("pair " + pair.id +
                          " is already negated; double negation unsupported");
  }
  const std::string& verb = MetaOrThrow(pair.metadata, meta::kVerb, pair.id);
  auto it = table.find(text::ToLower(verb));
  if (it == table.end()) {
    throw ValidationError("verb '" + verb + "' is not in the negation table");
  }
  const std::string negated = "did not " + it->second;
  auto negate = [&](const std::string& s) {
    const auto m = UniqueMatch(s, verb);
    return s.substr(0, m.begin) + negated + s.substr(m.end);
  };
  PairInstance out = pair;
  out.premise = negate(pair.premise);
  out.hypothesis = negate(pair.hypothesis);
  Tag(out.metadata, Operator::kNegation, negated);
  return out;
}

std::size_t SubsampleCount(double proportion, std::size_t n) {
  if (!(proportion > 0.0) || proportion > 1.0) {
    throw ValidationError("subsample proportion must be in (0, 1], got " +
                          FormatProportion(proportion));
  }
  // The epsilon absorbs binary representation error in products such as
  // 0.1 * 5 so exact halves round up.
  const double k = std::floor(proportion * static_cast<double>(n) + 0.5 + 1e-9);
  return std::min(n, static_cast<std::size_t>(k));
}

std::vector<std::string> SubsampleWords(const std::vector<std::string>& words,
                                        double proportion, uint64_t seed) {
  const std::size_t k = SubsampleCount(proportion, words.size());
  std::vector<std::pair<uint64_t, std::size_t>> ranked;
  ranked.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    ranked.emplace_back(SeededWordHash(seed, words[i]), i);
  }
  // Ties on the hash fall back to the word itself.
  std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return words[a.second] < words[b.second];
  });
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < k; ++i) keep.push_back(ranked[i].second);
  std::sort(keep.begin(), keep.end());
  std::vector<std::string> out;
  out.reserve(k);
  for (auto i : keep) out.push_back(words[i]);
  return out;
}

Lexicon SubsampleLexicon(const Lexicon& lexicon, double proportion,
                         uint64_t seed) {
  Lexicon out = lexicon;
  out.occupations = SubsampleWords(lexicon.occupations, proportion, seed);
  return out;
}

}  // namespace bias_audit
