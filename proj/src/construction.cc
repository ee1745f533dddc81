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

#include "bias_audit/construction.h"

#include <algorithm>
#include <charconv>
#include <set>
#include <unordered_set>

#include "bias_audit/error.h"
#include "bias_audit/fnv.h"
#include "bias_audit/perturbation.h"
#include "bias_audit/text.h"

namespace bias_audit {
namespace {

constexpr std::string_view kBaselineId = "baseline";

struct OperatorName {
  Operator op;
  std::string_view name;
};

constexpr OperatorName kOperatorNames[] = {
    {Operator::kBaseline, "baseline"},
    {Operator::kClauseOccupation, "clause_occupation"},
    {Operator::kClauseParticipant, "clause_participant"},
    {Operator::kAdjPreOccupation, "adj_pre_occupation"},
    {Operator::kAdjPostOccupation, "adj_post_occupation"},
    {Operator::kAdjPreParticipant, "adj_pre_participant"},
    {Operator::kAdjPostParticipant, "adj_post_participant"},
    {Operator::kSynonyms, "synonyms"},
    {Operator::kNegation, "negation"},
    {Operator::kClauses, "clauses"},
    {Operator::kSubsample, "subsample"},
};

template <typename T>
void SortById(std::vector<T>& items) {
  std::sort(items.begin(), items.end(),
            [](const T& a, const T& b) { return a.id < b.id; });
}

std::string SlotKey(std::string_view name) {
  return std::string(meta::kSlotPrefix) + std::string(name);
}

uint64_t ParseU64(const std::string& s, std::string_view what) {
  uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("invalid " + std::string(what) + " '" + s + "'");
  }
  return v;
}

// Replaces the first `$NAME` placeholder occurrence, capitalizing at the
// start of the text.
std::string FillAll(std::string text, std::string_view name,
                    std::string_view value) {
  const std::string token = "$" + std::string(name);
  std::size_t pos = text.find(token);
  while (pos != std::string::npos) {
    std::string v(value);
    if (pos == 0 && !v.empty()) {
      v[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(v[0])));
    }
    text.replace(pos, token.size(), v);
    pos = text.find(token, pos + v.size());
  }
  return text;
}

struct CorefRealization {
  std::string text;
  std::string pronoun;
  Fillers fillers;
};

CorefRealization RealizeCoref(const Template& t, const std::string& participant,
                              bool generic, Gender gender,
                              const Lexicon& lexicon) {
  CorefRealization r;
  std::string text = t.text;
  if (generic) {
    // "the $PARTICIPANT" -> "someone"; the determiner goes away.
    const std::string token = "$" + std::string(slot::kParticipant);
    const std::size_t pos = text.find(token);
    std::size_t e = pos;
    while (e > 0 && text[e - 1] == ' ') --e;
    std::size_t b = e;
    while (b > 0 && text[b - 1] != ' ') --b;
    const std::string det = text.substr(b, e - b);
    text.replace(b, pos + token.size() - b,
                 text::MatchLeadingCase(participant, det));
  } else {
    text = FillAll(text, slot::kParticipant, participant);
  }
  text = FillAll(text, slot::kOccupation, t.occupation);
  r.fillers[std::string(slot::kOccupation)] = t.occupation;
  r.fillers[std::string(slot::kParticipant)] = participant;

  // The instance's pronoun is the first pronoun placeholder in the text.
  std::size_t first_pos = std::string::npos;
  for (const auto& s : t.slots) {
    const auto pcase = slot::PronounCaseOf(s);
    if (!pcase) continue;
    const std::string& form = lexicon.Pronoun(gender, *pcase);
    const std::size_t pos = t.text.find("$" + s);
    if (pos < first_pos) {
      first_pos = pos;
      r.pronoun = form;
    }
    r.fillers[s] = form;
    text = FillAll(text, s, form);
  }
  if (first_pos == std::string::npos) {
    throw ValidationError("template '" + t.id + "' has no pronoun slot");
  }
  r.text = text::RepairArticles(text);
  return r;
}

std::vector<Instance> WinogenderBaseline(const std::vector<Template>& templates,
                                         const Lexicon& lexicon) {
  lexicon.Validate(Task::kCoref);
  const std::set<std::string> occupations(lexicon.occupations.begin(),
                                          lexicon.occupations.end());
  const std::set<std::string> participants(lexicon.participants.begin(),
                                           lexicon.participants.end());
  std::vector<Instance> out;
  out.reserve(WinogenderCount(templates, lexicon));
  for (const auto& t : templates) {
    if (t.task != Task::kCoref) {
      throw ValidationError("template '" + t.id + "' is not a coref template");
    }
    ValidateTemplate(t, "winogender generation");
    if (!occupations.count(t.occupation)) {
      throw ValidationError("template '" + t.id + "': occupation '" +
                            t.occupation + "' is not in the lexicon");
    }
    if (!participants.count(t.participant)) {
      throw ValidationError("template '" + t.id + "': participant '" +
                            t.participant + "' is not in the lexicon");
    }
    std::vector<std::pair<std::string, bool>> realizations = {
        {t.participant, false}};
    for (const auto& g : lexicon.generic_participants) {
      realizations.emplace_back(g, true);
    }
    for (const auto& [participant, generic] : realizations) {
      for (Gender gender : kAllGenders) {
        auto r = RealizeCoref(t, participant, generic, gender, lexicon);
        Instance inst;
        inst.construction_id = std::string(kBaselineId);
        inst.task = Task::kCoref;
        inst.text = std::move(r.text);
        inst.pronoun = r.pronoun;
        inst.pronoun_gender = gender;
        // Candidates follow mention order.
        const auto occ_at = text::FindWord(inst.text, t.occupation);
        const auto part_at = text::FindWord(inst.text, participant);
        if (occ_at.size() != 1 || part_at.size() != 1) {
          throw ValidationError("template '" + t.id +
                                "': entities must each occur exactly once in: " +
                                inst.text);
        }
        if (occ_at[0].begin < part_at[0].begin) {
          inst.candidates = {t.occupation, participant};
        } else {
          inst.candidates = {participant, t.occupation};
        }
        inst.gold = *t.answer_role == AnswerRole::kOccupation ? t.occupation
                                                              : participant;
        auto& md = inst.metadata;
        md[std::string(meta::kTemplateId)] = t.id;
        md[std::string(meta::kOccupation)] = t.occupation;
        md[std::string(meta::kParticipant)] = participant;
        md[std::string(meta::kParticipantKind)] =
            generic ? "generic" : "specific";
        md[std::string(meta::kAnswerRole)] =
            std::string(ToString(*t.answer_role));
        md[std::string(meta::kPairGroup)] = t.id + "|" + participant;
        for (const auto& [name, value] : r.fillers) md[SlotKey(name)] = value;
        inst.id = InstanceId(t, r.fillers, kBaselineId);
        out.push_back(std::move(inst));
      }
    }
  }
  SortById(out);
  return out;
}

void RequireBaseline(const std::map<std::string, std::string>& metadata,
                     const std::string& id) {
  static const std::string kKey(meta::kPerturbation);
  if (metadata.count(kKey)) {
    throw ValidationError("item " + id +
                          " is already perturbed; constructions apply to "
                          "baseline datasets");
  }
}

template <typename T>
void Rekey(T& item, const std::string& construction_id) {
  if (!item.metadata.count(std::string(meta::kTemplateId))) {
    throw ValidationError("item " + item.id + " lacks a template id");
  }
  item.id = StoredInstanceId(item.metadata, construction_id);
  item.construction_id = construction_id;
}

// Flattened gendered nouns in lexicon order.
std::vector<std::pair<Gender, std::string>> GenderedNouns(
    const Lexicon& lexicon) {
  std::vector<std::pair<Gender, std::string>> out;
  for (const auto& [g, words] : lexicon.gendered_nouns) {
    for (const auto& w : words) out.emplace_back(g, w);
  }
  return out;
}

bool HasSlot(const Template& t, std::string_view name) {
  return std::find(t.slots.begin(), t.slots.end(), name) != t.slots.end();
}

struct NliKey {
  uint64_t hash;
  uint32_t tmpl;
  uint32_t occ;
  uint32_t noun;
  uint32_t verb;
  uint32_t obj;
};

PairInstance RealizePair(const Template& t, const std::string& occupation,
                         const std::pair<Gender, std::string>& noun,
                         const std::string* verb, const std::string* object) {
  PairInstance p;
  std::string base = t.text;
  auto& md = p.metadata;
  md[std::string(meta::kTemplateId)] = t.id;
  md[std::string(meta::kOccupation)] = occupation;
  md[std::string(meta::kSubject)] = noun.second;
  md[std::string(meta::kSubjectGender)] = std::string(ToString(noun.first));
  md[SlotKey(slot::kOccupation)] = occupation;
  md[SlotKey(slot::kSubject)] = noun.second;
  if (verb) {
    base = FillAll(base, slot::kVerb, *verb);
    md[std::string(meta::kVerb)] = *verb;
    md[SlotKey(slot::kVerb)] = *verb;
  }
  if (object) {
    base = FillAll(base, slot::kObject, *object);
    md[std::string(meta::kObject)] = *object;
    md[SlotKey(slot::kObject)] = *object;
  }
  p.premise = text::RepairArticles(FillAll(base, slot::kSubject, occupation));
  p.hypothesis =
      text::RepairArticles(FillAll(base, slot::kSubject, noun.second));
  p.gold_label = std::string(kNeutralLabel);
  return p;
}

PairInstance PerturbPair(const PairInstance& p, const PerturbationSpec& spec,
                         std::size_t index) {
  switch (spec.op) {
    case Operator::kBaseline:
      return p;
    case Operator::kSubsample: {
      PairInstance out = p;
      out.metadata[std::string(meta::kPerturbation)] = "subsample";
      return out;
    }
    case Operator::kClauses:
      return InsertClause(p, spec.clause_pool[index % spec.clause_pool.size()]);
    case Operator::kNegation:
      return NegateVerb(p, spec.verb_negation_table);
    default:
      throw ValidationError("operator '" + std::string(ToString(spec.op)) +
                            "' does not apply to nli pairs");
  }
}

Instance PerturbInstance(const Instance& inst, const PerturbationSpec& spec,
                         std::size_t group_index) {
  const auto pick = [&](const std::vector<std::string>& pool) {
    return pool[group_index % pool.size()];
  };
  switch (spec.op) {
    case Operator::kBaseline:
      return inst;
    case Operator::kClauseOccupation:
    case Operator::kClauseParticipant:
      return InsertClause(inst, pick(spec.clause_pool), spec.target);
    case Operator::kAdjPreOccupation:
    case Operator::kAdjPostOccupation:
    case Operator::kAdjPreParticipant:
    case Operator::kAdjPostParticipant:
      return InsertAdjective(inst, pick(spec.adjective_pool), spec.target,
                             spec.mode);
    case Operator::kSynonyms:
      return SubstituteSynonyms(inst, spec.synonym_table);
    default:
      throw ValidationError("operator '" + std::string(ToString(spec.op)) +
                            "' does not apply to coref instances");
  }
}

const PerturbationPools& EmptyPools() {
  static const PerturbationPools kEmpty;
  return kEmpty;
}

}  // namespace

std::string_view ToString(Benchmark b) {
  return b == Benchmark::kWinogender ? "winogender" : "biasnli";
}

std::string_view ToString(Operator op) {
  for (const auto& e : kOperatorNames) {
    if (e.op == op) return e.name;
  }
  return "baseline";
}

Benchmark ParseBenchmark(std::string_view s) {
  if (s == "winogender") return Benchmark::kWinogender;
  if (s == "biasnli") return Benchmark::kBiasNli;
  throw ValidationError("unknown benchmark '" + std::string(s) + "'");
}

Operator ParseOperator(std::string_view s) {
  for (const auto& e : kOperatorNames) {
    if (e.name == s) return e.op;
  }
  throw ValidationError("unknown construction '" + std::string(s) + "'");
}

Task TaskFor(Benchmark b) {
  return b == Benchmark::kWinogender ? Task::kCoref : Task::kNli;
}

const std::vector<Operator>& OperatorsFor(Benchmark b) {
  static const std::vector<Operator> kWinogender = {
      Operator::kBaseline,           Operator::kClauseOccupation,
      Operator::kClauseParticipant,  Operator::kAdjPreOccupation,
      Operator::kAdjPostOccupation,  Operator::kAdjPreParticipant,
      Operator::kAdjPostParticipant, Operator::kSynonyms};
  static const std::vector<Operator> kBiasNli = {
      Operator::kBaseline, Operator::kClauses, Operator::kNegation,
      Operator::kSubsample};
  return b == Benchmark::kWinogender ? kWinogender : kBiasNli;
}

bool IsValidFor(Benchmark b, Operator op) {
  const auto& ops = OperatorsFor(b);
  return std::find(ops.begin(), ops.end(), op) != ops.end();
}

std::string FormatProportion(double p) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), p);
  return std::string(buf, ptr);
}

ConstructionDescriptor ConstructionDescriptor::ForOperator(Benchmark b,
                                                           Operator op) {
  if (op == Operator::kSubsample) {
    throw ValidationError(
        "subsample constructions need a proportion, seed and trial");
  }
  ConstructionDescriptor d;
  d.benchmark = b;
  d.op = op;
  d.id = std::string(ToString(op));
  d.Validate();
  return d;
}

ConstructionDescriptor ConstructionDescriptor::Subsample(Benchmark b,
                                                         double proportion,
                                                         uint64_t base_seed,
                                                         uint64_t trial) {
  ConstructionDescriptor d;
  d.benchmark = b;
  d.op = Operator::kSubsample;
  const std::string p = FormatProportion(proportion);
  std::string t = std::to_string(trial);
  if (t.size() < 3) t.insert(0, 3 - t.size(), '0');
  d.id = "subsample_p" + p + "_t" + t;
  d.params["proportion"] = p;
  d.params["base_seed"] = std::to_string(base_seed);
  d.params["trial"] = std::to_string(trial);
  d.params["seed"] = std::to_string(DeriveTrialSeed(base_seed, trial));
  d.Validate();
  return d;
}

void ConstructionDescriptor::Validate() const {
  if (id.empty()) throw ValidationError("construction descriptor without id");
  if (!IsValidFor(benchmark, op)) {
    throw ValidationError("construction '" + std::string(ToString(op)) +
                          "' is not valid for " +
                          std::string(ToString(benchmark)));
  }
  if (op == Operator::kSubsample) {
    if (!params.count("proportion") || !params.count("seed")) {
      throw ValidationError("subsample '" + id +
                            "' requires proportion and seed");
    }
    SubsampleCount(proportion(), 1);
    seed();
  }
}

double ConstructionDescriptor::proportion() const {
  auto it = params.find("proportion");
  if (it == params.end()) {
    throw ValidationError("construction '" + id + "' has no proportion");
  }
  double p = 0;
  auto [ptr, ec] =
      std::from_chars(it->second.data(), it->second.data() + it->second.size(), p);
  if (ec != std::errc() || ptr != it->second.data() + it->second.size()) {
    throw ValidationError("invalid proportion '" + it->second + "'");
  }
  return p;
}

uint64_t ConstructionDescriptor::seed() const {
  auto it = params.find("seed");
  if (it == params.end()) {
    throw ValidationError("construction '" + id + "' has no seed");
  }
  return ParseU64(it->second, "seed");
}

uint64_t ConstructionDescriptor::trial() const {
  auto it = params.find("trial");
  return it == params.end() ? 0 : ParseU64(it->second, "trial");
}

std::size_t WinogenderCount(const std::vector<Template>& templates,
                            const Lexicon& lexicon) {
  return templates.size() * (1 + lexicon.generic_participants.size()) * 3;
}

std::size_t BiasNliCount(const std::vector<Template>& templates,
                         const Lexicon& lexicon) {
  std::size_t nouns = 0;
  for (const auto& [g, words] : lexicon.gendered_nouns) nouns += words.size();
  std::size_t total = 0;
  for (const auto& t : templates) {
    std::size_t n = lexicon.occupations.size() * nouns;
    if (HasSlot(t, slot::kVerb)) n *= lexicon.verbs.size();
    if (HasSlot(t, slot::kObject)) n *= lexicon.objects.size();
    total += n;
  }
  return total;
}

std::vector<Instance> GenerateWinogender(const std::vector<Template>& templates,
                                         const Lexicon& lexicon,
                                         const ConstructionDescriptor& desc,
                                         const PerturbationPools& pools) {
  desc.Validate();
  if (desc.benchmark != Benchmark::kWinogender) {
    throw ValidationError("descriptor '" + desc.id +
                          "' is not a winogender construction");
  }
  auto baseline = WinogenderBaseline(templates, lexicon);
  if (desc.op == Operator::kBaseline && desc.id == kBaselineId) {
    return baseline;
  }
  return ApplyConstruction(baseline, desc, pools);
}

std::vector<Instance> GenerateWinogender(const std::vector<Template>& templates,
                                         const Lexicon& lexicon,
                                         const ConstructionDescriptor& desc) {
  return GenerateWinogender(templates, lexicon, desc, EmptyPools());
}

void StreamBiasNli(const std::vector<Template>& templates,
                   const Lexicon& lexicon, const ConstructionDescriptor& desc,
                   const PerturbationPools& pools,
                   const std::function<void(const PairInstance&)>& sink) {
  desc.Validate();
  if (desc.benchmark != Benchmark::kBiasNli) {
    throw ValidationError("descriptor '" + desc.id +
                          "' is not a biasnli construction");
  }
  const PerturbationSpec spec = PerturbationSpec::For(desc, pools);
  spec.Validate();
  const Lexicon lex = desc.op == Operator::kSubsample
                          ? SubsampleLexicon(lexicon, desc.proportion(),
                                             desc.seed())
                          : lexicon;
  lex.Validate(Task::kNli);
  for (const auto& t : templates) {
    if (t.task != Task::kNli) {
      throw ValidationError("template '" + t.id + "' is not an nli template");
    }
    ValidateTemplate(t, "biasnli generation");
  }
  const auto nouns = GenderedNouns(lex);

  std::vector<NliKey> keys;
  keys.reserve(BiasNliCount(templates, lex));
  for (uint32_t ti = 0; ti < templates.size(); ++ti) {
    const Template& t = templates[ti];
    const bool has_verb = HasSlot(t, slot::kVerb);
    const bool has_obj = HasSlot(t, slot::kObject);
    const uint32_t nv = has_verb ? lex.verbs.size() : 1;
    const uint32_t no = has_obj ? lex.objects.size() : 1;
    Fillers f;
    for (uint32_t oi = 0; oi < lex.occupations.size(); ++oi) {
      f[std::string(slot::kOccupation)] = lex.occupations[oi];
      for (uint32_t ni = 0; ni < nouns.size(); ++ni) {
        f[std::string(slot::kSubject)] = nouns[ni].second;
        for (uint32_t vi = 0; vi < nv; ++vi) {
          if (has_verb) f[std::string(slot::kVerb)] = lex.verbs[vi];
          for (uint32_t bi = 0; bi < no; ++bi) {
            if (has_obj) f[std::string(slot::kObject)] = lex.objects[bi];
            keys.push_back(
                {InstanceHash(t.id, f, desc.id), ti, oi, ni, vi, bi});
          }
        }
      }
    }
  }
  std::sort(keys.begin(), keys.end(), [](const NliKey& a, const NliKey& b) {
    if (a.hash != b.hash) return a.hash < b.hash;
    return std::tie(a.tmpl, a.occ, a.noun, a.verb, a.obj) <
           std::tie(b.tmpl, b.occ, b.noun, b.verb, b.obj);
  });
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const NliKey& k = keys[i];
    if (i > 0 && keys[i - 1].hash == k.hash) {
      throw ValidationError("instance id collision in construction '" +
                            desc.id + "'");
    }
    const Template& t = templates[k.tmpl];
    const std::string* verb =
        HasSlot(t, slot::kVerb) ? &lex.verbs[k.verb] : nullptr;
    const std::string* obj =
        HasSlot(t, slot::kObject) ? &lex.objects[k.obj] : nullptr;
    PairInstance p = RealizePair(t, lex.occupations[k.occ], nouns[k.noun],
                                 verb, obj);
    p = PerturbPair(p, spec, i);
    p.id = ToHex64(k.hash);
    p.construction_id = desc.id;
    sink(p);
  }
}

std::vector<PairInstance> GenerateBiasNli(const std::vector<Template>& templates,
                                          const Lexicon& lexicon,
                                          const ConstructionDescriptor& desc,
                                          const PerturbationPools& pools) {
  std::vector<PairInstance> out;
  StreamBiasNli(templates, lexicon, desc, pools,
                [&](const PairInstance& p) { out.push_back(p); });
  return out;
}

std::vector<PairInstance> GenerateBiasNli(const std::vector<Template>& templates,
                                          const Lexicon& lexicon,
                                          const ConstructionDescriptor& desc) {
  return GenerateBiasNli(templates, lexicon, desc, EmptyPools());
}

std::vector<Instance> ApplyConstruction(std::span<const Instance> baseline,
                                        const ConstructionDescriptor& desc,
                                        const PerturbationPools& pools) {
  desc.Validate();
  if (desc.benchmark != Benchmark::kWinogender) {
    throw ValidationError("coref instances take winogender constructions");
  }
  const PerturbationSpec spec = PerturbationSpec::For(desc, pools);
  spec.Validate();
  std::set<std::string> groups;
  for (const auto& inst : baseline) {
    RequireBaseline(inst.metadata, inst.id);
    auto it = inst.metadata.find(std::string(meta::kPairGroup));
    if (it == inst.metadata.end()) {
      throw ValidationError("instance " + inst.id + " lacks a pair group");
    }
    groups.insert(it->second);
  }
  std::map<std::string, std::size_t> group_rank;
  for (const auto& g : groups) group_rank.emplace(g, group_rank.size());

  std::vector<Instance> out;
  out.reserve(baseline.size());
  for (const auto& inst : baseline) {
    const std::size_t gi =
        group_rank.at(inst.metadata.at(std::string(meta::kPairGroup)));
    Instance p = PerturbInstance(inst, spec, gi);
    Rekey(p, desc.id);
    out.push_back(std::move(p));
  }
  SortById(out);
  return out;
}

std::vector<PairInstance> ApplyConstruction(
    std::span<const PairInstance> baseline, const ConstructionDescriptor& desc,
    const PerturbationPools& pools) {
  desc.Validate();
  if (desc.benchmark != Benchmark::kBiasNli) {
    throw ValidationError("nli pairs take biasnli constructions");
  }
  const PerturbationSpec spec = PerturbationSpec::For(desc, pools);
  spec.Validate();
  const std::string occupation_key(meta::kOccupation);
  std::unordered_set<std::string> keep;
  bool filter = false;
  if (desc.op == Operator::kSubsample) {
    std::vector<std::string> occupations;
    std::unordered_set<std::string> seen;
    for (const auto& p : baseline) {
      const auto& occ = p.metadata.at(occupation_key);
      if (seen.insert(occ).second) occupations.push_back(occ);
    }
    for (auto& w : SubsampleWords(occupations, desc.proportion(), desc.seed())) {
      keep.insert(std::move(w));
    }
    filter = true;
  }
  static const std::string kTemplateKey(meta::kTemplateId);
  std::vector<std::pair<std::string, const PairInstance*>> keyed;
  keyed.reserve(baseline.size());
  for (const auto& p : baseline) {
    RequireBaseline(p.metadata, p.id);
    if (filter && !keep.count(p.metadata.at(occupation_key))) continue;
    if (!p.metadata.count(kTemplateKey)) {
      throw ValidationError("item " + p.id + " lacks a template id");
    }
    keyed.emplace_back(StoredInstanceId(p.metadata, desc.id), &p);
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<PairInstance> out;
  out.reserve(keyed.size());
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (i > 0 && keyed[i - 1].first == keyed[i].first) {
      throw ValidationError("instance id collision in construction '" +
                            desc.id + "'");
    }
    PairInstance q = PerturbPair(*keyed[i].second, spec, i);
    q.id = std::move(keyed[i].first);
    q.construction_id = desc.id;
    out.push_back(std::move(q));
  }
  return out;
}

std::string ToQaPrompt(const Instance& instance) {
  if (instance.task != Task::kCoref) {
    throw ValidationError("QA prompts are defined for coref instances");
  }
  if (instance.candidates.size() != 2) {
    throw ValidationError("instance " + instance.id +
                          " must have exactly two candidates");
  }
  return instance.text + " Who does the word '" + instance.pronoun +
         "' refer to? \\n (a) " + instance.candidates[0] + " (b) " +
         instance.candidates[1];
}

}  // namespace bias_audit
