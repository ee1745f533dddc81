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

#include "bias_audit/audit.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "bias_audit/error.h"
#include "bias_audit/parallel.h"
#include "bias_audit/perturbation.h"
#include "bias_audit/reference_models.h"
#include "bias_audit/schema.h"
#include "json.hpp"

#ifndef BIAS_AUDIT_DEFAULT_DATA_DIR
#define BIAS_AUDIT_DEFAULT_DATA_DIR "data"
#endif

namespace bias_audit {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr std::string_view kBaselineId = "baseline";

struct Inputs {
  std::vector<Template> templates;
  Lexicon lexicon;
  PerturbationPools pools;
};

Inputs LoadInputs(const AuditConfig& c) {
  Inputs in;
  const Task task = TaskFor(c.benchmark);
  in.templates = LoadTemplates(c.templates, task);
  in.lexicon = LoadLexicon(c.lexicon);
  in.lexicon.Validate(task);
  in.pools = PerturbationPools::Load(
      c.pools, c.benchmark == Benchmark::kWinogender ? c.synonyms : fs::path());
  return in;
}

// Checks everything that can be checked before generating.
void Preflight(const std::vector<ConstructionDescriptor>& descs,
               const Inputs& in) {
  for (const auto& d : descs) {
    const PerturbationSpec spec = PerturbationSpec::For(d, in.pools);
    spec.Validate();
    if (d.op == Operator::kSynonyms) {
      ValidateSynonymTable(in.pools.synonyms, in.templates);
    }
  }
}

void RequireOut(const AuditConfig& c) {
  if (c.out.empty()) throw ValidationError("--out is required");
}

std::string Fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string FileNameFor(const ConstructionDescriptor& d) {
  return d.id + ".jsonl";
}

const ModelRegistry& Registry(const AuditConfig& c,
                              std::unique_ptr<ModelRegistry>& holder) {
  if (!holder) {
    holder = std::make_unique<ModelRegistry>(ModelRegistry::Load(c.models_config));
  }
  return *holder;
}

// Reference models to run: the configured names, or every model for the
// task when nothing else predicts.
std::vector<const ReferenceModel*> PickModels(const AuditConfig& c, Task task,
                                              const ModelRegistry& reg,
                                              bool default_all) {
  std::vector<const ReferenceModel*> out;
  std::vector<std::string> names = c.models;
  if (names.empty() && default_all) {
    for (const auto& n : reg.names()) {
      if (reg.Get(n).task() == task) names.push_back(n);
    }
  }
  for (const auto& n : names) {
    const ReferenceModel& m = reg.Get(n);
    if (m.task() != task) {
      throw ValidationError("reference model '" + n + "' answers " +
                            std::string(ToString(m.task())) + " items, not " +
                            std::string(ToString(task)));
    }
    out.push_back(&m);
  }
  return out;
}

BiasScore ScoreDataset(const Dataset& d,
                       std::span<const Prediction> predictions) {
  return d.task == Task::kCoref ? MismatchRate(d.instances, predictions)
                                : FractionNeutral(d.pairs, predictions);
}

std::vector<Prediction> PredictDataset(const ReferenceModel& m,
                                       const Dataset& d) {
  return d.task == Task::kCoref ? m.Predict(std::span(d.instances))
                                : m.Predict(std::span(d.pairs));
}

Dataset GenerateDataset(const Inputs& in, const ConstructionDescriptor& d,
                        const std::vector<Instance>* coref_baseline) {
  Dataset out;
  out.construction_id = d.id;
  if (d.benchmark == Benchmark::kWinogender) {
    out.task = Task::kCoref;
    if (!coref_baseline) {
      out.instances =
          GenerateWinogender(in.templates, in.lexicon, d, in.pools);
    } else if (d.op == Operator::kBaseline) {
      out.instances = *coref_baseline;
    } else {
      out.instances = ApplyConstruction(*coref_baseline, d, in.pools);
    }
  } else {
    out.task = Task::kNli;
    out.pairs = GenerateBiasNli(in.templates, in.lexicon, d, in.pools);
  }
  return out;
}

bool IsTrial(const ConstructionDescriptor& d) {
  return d.op == Operator::kSubsample;
}

bool Selected(const AuditConfig& c, const ConstructionDescriptor& d) {
  if (!c.constructions_given) return true;
  for (const auto& name : c.constructions) {
    if (name == d.id || name == ToString(d.op)) return true;
  }
  return false;
}

void AddScore(ScoreTable& t, BiasScore s) {
  const auto key = std::make_pair(s.construction_id, s.model_id);
  if (!t.cells.emplace(key, std::move(s)).second) {
    throw ValidationError("model '" + key.second +
                          "' is scored twice on construction '" + key.first +
                          "'");
  }
}

void AddModel(ScoreTable& t, const std::string& model) {
  if (std::find(t.models.begin(), t.models.end(), model) == t.models.end()) {
    t.models.push_back(model);
  }
}

ScoreTable ScoreFromManifest(const AuditConfig& c) {
  const Manifest manifest = Manifest::Load(c.datasets / kManifestName);
  ScoreTable table;
  table.metric = MetricFor(TaskFor(manifest.benchmark));
  const Task task = TaskFor(manifest.benchmark);

  std::vector<const ManifestEntry*> entries;
  for (const auto& e : manifest.datasets) {
    if (Selected(c, e.descriptor)) entries.push_back(&e);
  }
  if (c.constructions_given) {
    for (const auto& name : c.constructions) {
      const bool found = std::any_of(
          entries.begin(), entries.end(), [&](const ManifestEntry* e) {
            return e->descriptor.id == name ||
                   ToString(e->descriptor.op) == name;
          });
      if (!found) {
        throw ValidationError("construction '" + name +
                              "' is not in the manifest");
      }
    }
  }
  std::vector<Dataset> data(entries.size());
  ParallelFor(entries.size(), c.jobs, [&](std::size_t i) {
    VerifyDatasetFile(c.datasets, *entries[i]);
    data[i] = ReadDataset(c.datasets / entries[i]->file);
    if (data[i].size() != entries[i]->count) {
      throw ValidationError(entries[i]->file + ": manifest count " +
                            std::to_string(entries[i]->count) +
                            " differs from " + std::to_string(data[i].size()));
    }
    if (data[i].size() > 0 && data[i].task != task) {
      throw ValidationError(entries[i]->file + " holds " +
                            std::string(ToString(data[i].task)) + " records");
    }
    if (data[i].size() > 0 &&
        data[i].construction_id != entries[i]->descriptor.id) {
      throw ValidationError(entries[i]->file + " holds construction '" +
                            data[i].construction_id + "'");
    }
  });

  // Bucket file predictions by dataset and model.
  std::unordered_map<std::string, std::size_t> where;
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (auto& id : data[i].ids()) where.emplace(std::move(id), i);
  }
  std::vector<std::map<std::string, std::vector<Prediction>>> buckets(
      data.size());
  std::vector<std::string> file_models;
  std::optional<std::unordered_set<std::string>> other_ids;
  for (const auto& path : c.prediction_files) {
    for (auto& p : ReadPredictions(path)) {
      if (std::find(file_models.begin(), file_models.end(), p.model_id) ==
          file_models.end()) {
        file_models.push_back(p.model_id);
      }
      auto it = where.find(p.instance_id);
      if (it != where.end()) {
        buckets[it->second][p.model_id].push_back(std::move(p));
        continue;
      }
      if (!other_ids) {
        other_ids.emplace();
        for (const auto& e : manifest.datasets) {
          if (Selected(c, e.descriptor)) continue;
          for (auto& id : ReadDataset(c.datasets / e.file).ids()) {
            other_ids->insert(std::move(id));
          }
        }
      }
      if (!other_ids->count(p.instance_id)) {
        throw ValidationError(path.string() +
                              ": prediction for unknown instance id '" +
                              p.instance_id + "'");
      }
    }
  }

  std::unique_ptr<ModelRegistry> reg;
  std::vector<const ReferenceModel*> refs;
  if (!c.models.empty()) {
    refs = PickModels(c, task, Registry(c, reg), false);
  }
  if (file_models.empty() && refs.empty()) {
    throw ValidationError("no predictions: pass --predictions or --model");
  }
  for (const auto& m : file_models) AddModel(table, m);
  for (const auto* m : refs) AddModel(table, m->name());

  std::vector<std::vector<BiasScore>> scores(data.size());
  ParallelFor(data.size(), c.jobs, [&](std::size_t i) {
    for (const auto& m : file_models) {
      auto it = buckets[i].find(m);
      if (it == buckets[i].end()) {
        throw MissingPredictionError(
            "model '" + m + "' has no predictions for construction '" +
            entries[i]->descriptor.id + "' (" +
            std::to_string(data[i].size()) + " instances)");
      }
      scores[i].push_back(ScoreDataset(data[i], it->second));
    }
    for (const auto* m : refs) {
      if (std::find(file_models.begin(), file_models.end(), m->name()) !=
          file_models.end()) {
        throw ValidationError("model '" + m->name() +
                              "' appears in both prediction files and --model");
      }
      scores[i].push_back(ScoreDataset(data[i], PredictDataset(*m, data[i])));
    }
  });
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& d = entries[i]->descriptor;
    if (IsTrial(d)) {
      table.trial_descriptors.push_back(d);
    } else {
      table.constructions.push_back(d.id);
    }
    for (auto& s : scores[i]) AddScore(table, std::move(s));
  }
  return table;
}

ScoreTable ScoreInProcess(const AuditConfig& c,
                          const std::vector<ConstructionDescriptor>& descs) {
  const Inputs in = LoadInputs(c);
  Preflight(descs, in);
  const Task task = TaskFor(c.benchmark);
  std::unique_ptr<ModelRegistry> reg;
  const auto refs = PickModels(c, task, Registry(c, reg), true);
  if (refs.empty()) throw ValidationError("no reference models to run");

  std::vector<Instance> coref_baseline;
  if (c.benchmark == Benchmark::kWinogender) {
    coref_baseline = GenerateWinogender(
        in.templates, in.lexicon,
        ConstructionDescriptor::ForOperator(c.benchmark, Operator::kBaseline),
        in.pools);
  }
  std::vector<std::vector<BiasScore>> scores(descs.size());
  ParallelFor(descs.size(), c.jobs, [&](std::size_t i) {
    const Dataset d = GenerateDataset(
        in, descs[i],
        c.benchmark == Benchmark::kWinogender ? &coref_baseline : nullptr);
    for (const auto* m : refs) {
      scores[i].push_back(ScoreDataset(d, PredictDataset(*m, d)));
    }
  });
  ScoreTable table;
  table.metric = MetricFor(task);
  for (const auto* m : refs) AddModel(table, m->name());
  for (std::size_t i = 0; i < descs.size(); ++i) {
    if (IsTrial(descs[i])) {
      table.trial_descriptors.push_back(descs[i]);
    } else {
      table.constructions.push_back(descs[i].id);
    }
    for (auto& s : scores[i]) AddScore(table, std::move(s));
  }
  return table;
}

void WriteScoreReports(const ScoreTable& table, const fs::path& out) {
  fs::create_directories(out);
  WriteTextFile(out / "scores.csv", ScoresCsv(table));
  WriteTextFile(out / "deltas.csv", DeltasCsv(table));
  WriteTextFile(out / "scores.json", ScoresJson(table));
}

std::vector<TrialDistribution> DistributionsFromTable(const ScoreTable& t) {
  std::map<double, std::vector<ConstructionDescriptor>> by_p;
  for (const auto& d : t.trial_descriptors) by_p[d.proportion()].push_back(d);
  std::vector<TrialDistribution> out;
  for (auto& [p, descs] : by_p) {
    std::sort(descs.begin(), descs.end(),
              [](const auto& a, const auto& b) { return a.trial() < b.trial(); });
    for (const auto& m : t.models) {
      TrialDistribution dist;
      dist.model_id = m;
      dist.metric = t.metric;
      dist.proportion = p;
      for (const auto& d : descs) {
        dist.seeds.push_back(d.seed());
        dist.scores.push_back(t.At(d.id, m));
      }
      const auto v = dist.values();
      dist.summary = Summarize(v);
      out.push_back(std::move(dist));
    }
  }
  return out;
}

std::vector<std::vector<std::string>> ParseCsv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      row.push_back(std::move(cell));
      cell.clear();
    } else if (ch == '\n') {
      row.push_back(std::move(cell));
      cell.clear();
      rows.push_back(std::move(row));
      row.clear();
    } else if (ch != '\r') {
      cell += ch;
    }
  }
  if (!cell.empty() || !row.empty()) {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string AlignedTable(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    if (width.size() < r.size()) width.resize(r.size(), 0);
    for (std::size_t i = 0; i < r.size(); ++i) {
      width[i] = std::max(width[i], r[i].size());
    }
  }
  std::string out;
  for (std::size_t ri = 0; ri < rows.size(); ++ri) {
    std::string line;
    for (std::size_t i = 0; i < rows[ri].size(); ++i) {
      if (i) line += "  ";
      std::string cell = rows[ri][i];
      // Left-align the first column, right-align the rest.
      if (i == 0) {
        cell.resize(width[i], ' ');
      } else {
        cell.insert(0, width[i] - cell.size(), ' ');
      }
      line += cell;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    if (ri == 0) {
      std::size_t total = 0;
      for (std::size_t i = 0; i < width.size(); ++i) total += width[i] + (i ? 2 : 0);
      out += std::string(total, '-') + "\n";
    }
  }
  return out;
}

}  // namespace

fs::path ResolveDataDir(const std::optional<fs::path>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv("BIAS_AUDIT_DATA_DIR"); env && *env) {
    return env;
  }
  return BIAS_AUDIT_DEFAULT_DATA_DIR;
}

void AuditConfig::ResolvePaths() {
  if (data_dir.empty()) data_dir = ResolveDataDir(std::nullopt);
  const fs::path bench = data_dir / std::string(ToString(benchmark));
  if (templates.empty()) templates = bench / "templates.tsv";
  if (lexicon.empty()) lexicon = bench / "lexicon.lex";
  if (synonyms.empty() && benchmark == Benchmark::kWinogender) {
    synonyms = bench / "synonyms.tsv";
  }
  if (pools.empty()) pools = data_dir / "pools.cfg";
  if (models_config.empty()) models_config = data_dir / "reference" / "models.cfg";
}

std::vector<double> AuditConfig::EffectiveProportions() const {
  if (proportions.empty()) {
    return {std::begin(kDefaultProportions), std::end(kDefaultProportions)};
  }
  return proportions;
}

std::vector<ConstructionDescriptor> AuditConfig::Descriptors(
    bool include_default) const {
  // "all" and the default both mean every table construction.
  std::vector<std::string> names;
  auto add_all = [&] {
    for (Operator op : OperatorsFor(benchmark)) {
      if (op != Operator::kSubsample) names.emplace_back(ToString(op));
    }
  };
  for (const auto& name : constructions) {
    if (name == "all") {
      add_all();
    } else {
      names.push_back(name);
    }
  }
  if (constructions.empty() && include_default) add_all();
  std::vector<ConstructionDescriptor> out;
  std::set<std::string> seen;
  for (const auto& name : names) {
    const Operator op = ParseOperator(name);
    if (!IsValidFor(benchmark, op)) {
      throw ValidationError("construction '" + name + "' is not valid for " +
                            std::string(ToString(benchmark)));
    }
    if (!seen.insert(name).second) {
      throw ValidationError("construction '" + name + "' listed twice");
    }
    if (op != Operator::kSubsample) {
      out.push_back(ConstructionDescriptor::ForOperator(benchmark, op));
      continue;
    }
    if (trials == 0) throw ValidationError("--trials must be at least 1");
    std::set<std::string> ps;
    for (double p : EffectiveProportions()) {
      if (!ps.insert(FormatProportion(p)).second) {
        throw ValidationError("proportion " + FormatProportion(p) +
                              " listed twice");
      }
      for (std::size_t t = 0; t < trials; ++t) {
        out.push_back(
            ConstructionDescriptor::Subsample(benchmark, p, seed, t));
      }
    }
  }
  return out;
}

const BiasScore& ScoreTable::At(const std::string& construction,
                                const std::string& model) const {
  auto it = cells.find({construction, model});
  if (it == cells.end()) {
    throw ValidationError("no score for model '" + model +
                          "' on construction '" + construction + "'");
  }
  return it->second;
}

bool ScoreTable::Has(const std::string& construction,
                     const std::string& model) const {
  return cells.count({construction, model}) > 0;
}

Manifest RunGenerate(const AuditConfig& config) {
  RequireOut(config);
  const auto descs = config.Descriptors(false);
  const Inputs in = LoadInputs(config);
  Preflight(descs, in);
  const Task task = TaskFor(config.benchmark);
  for (const auto& t : in.templates) {
    ValidateTemplate(t, config.templates.string());
    if (t.task != task) {
      throw ValidationError("template '" + t.id + "' is not a " +
                            std::string(ToString(task)) + " template");
    }
  }
  fs::create_directories(config.out);

  std::vector<Instance> coref_baseline;
  if (config.benchmark == Benchmark::kWinogender && !descs.empty()) {
    coref_baseline = GenerateWinogender(
        in.templates, in.lexicon,
        ConstructionDescriptor::ForOperator(config.benchmark,
                                            Operator::kBaseline),
        in.pools);
  }
  std::vector<std::unique_ptr<JsonlWriter>> writers(descs.size());
  ParallelFor(descs.size(), config.jobs, [&](std::size_t i) {
    auto w = std::make_unique<JsonlWriter>(config.out / FileNameFor(descs[i]));
    if (config.benchmark == Benchmark::kWinogender) {
      const auto items =
          descs[i].op == Operator::kBaseline
              ? coref_baseline
              : ApplyConstruction(coref_baseline, descs[i], in.pools);
      for (const auto& x : items) w->Write(x);
    } else {
      StreamBiasNli(in.templates, in.lexicon, descs[i], in.pools,
                    [&](const PairInstance& p) { w->Write(p); });
    }
    w->Finish();
    writers[i] = std::move(w);
  });

  Manifest m;
  m.benchmark = config.benchmark;
  m.seed = config.seed;
  for (std::size_t i = 0; i < descs.size(); ++i) {
    writers[i]->Commit();
    m.datasets.push_back({descs[i], FileNameFor(descs[i]), writers[i]->count(),
                          ToHex64(writers[i]->hash())});
  }
  m.Save(config.out / kManifestName);
  return m;
}

Manifest RunPerturb(const AuditConfig& config, const fs::path& baseline_file) {
  RequireOut(config);
  const auto descs = config.Descriptors(false);
  if (descs.empty()) throw ValidationError("no --construction given");
  const Dataset base = ReadDataset(baseline_file);
  const Benchmark bench = base.task == Task::kCoref ? Benchmark::kWinogender
                                                    : Benchmark::kBiasNli;
  if (bench != config.benchmark) {
    throw ValidationError(baseline_file.string() + " holds " +
                          std::string(ToString(base.task)) +
                          " records, not " +
                          std::string(ToString(config.benchmark)) + " items");
  }
  const PerturbationPools pools = PerturbationPools::Load(
      config.pools,
      bench == Benchmark::kWinogender ? config.synonyms : fs::path());
  for (const auto& d : descs) PerturbationSpec::For(d, pools).Validate();

  const fs::path manifest_path = config.out / kManifestName;
  Manifest m;
  m.benchmark = bench;
  m.seed = config.seed;
  if (fs::exists(manifest_path)) {
    m = Manifest::Load(manifest_path);
    if (m.benchmark != bench) {
      throw ValidationError(manifest_path.string() + " is a " +
                            std::string(ToString(m.benchmark)) + " manifest");
    }
  }
  fs::create_directories(config.out);
  std::vector<std::unique_ptr<JsonlWriter>> writers(descs.size());
  ParallelFor(descs.size(), config.jobs, [&](std::size_t i) {
    auto w = std::make_unique<JsonlWriter>(config.out / FileNameFor(descs[i]));
    if (base.task == Task::kCoref) {
      for (const auto& x : ApplyConstruction(base.instances, descs[i], pools)) {
        w->Write(x);
      }
    } else {
      for (const auto& x : ApplyConstruction(base.pairs, descs[i], pools)) {
        w->Write(x);
      }
    }
    w->Finish();
    writers[i] = std::move(w);
  });
  for (std::size_t i = 0; i < descs.size(); ++i) {
    writers[i]->Commit();
    ManifestEntry e{descs[i], FileNameFor(descs[i]), writers[i]->count(),
                    ToHex64(writers[i]->hash())};
    auto it = std::find_if(m.datasets.begin(), m.datasets.end(),
                           [&](const ManifestEntry& x) {
                             return x.descriptor.id == descs[i].id;
                           });
    if (it != m.datasets.end()) {
      *it = std::move(e);
    } else {
      m.datasets.push_back(std::move(e));
    }
  }
  m.Save(manifest_path);
  return m;
}

ScoreTable RunScore(const AuditConfig& config) {
  RequireOut(config);
  ScoreTable table = config.datasets.empty()
                         ? ScoreInProcess(config, config.Descriptors(true))
                         : ScoreFromManifest(config);
  WriteScoreReports(table, config.out);
  return table;
}

StabilityResult RunStability(const AuditConfig& config) {
  RequireOut(config);
  StabilityResult r;
  const bool in_process = config.datasets.empty() && config.scores.empty();
  if (!config.scores.empty()) {
    r.table = ParseScoresJson(ReadTextFile(config.scores),
                              config.scores.string());
  } else if (!in_process) {
    r.table = ScoreFromManifest(config);
  } else {
    std::vector<ConstructionDescriptor> descs;
    for (auto& d : config.Descriptors(true)) {
      if (!IsTrial(d)) descs.push_back(std::move(d));
    }
    const bool has_baseline =
        std::any_of(descs.begin(), descs.end(),
                    [](const auto& d) { return d.op == Operator::kBaseline; });
    if (!has_baseline && config.benchmark == Benchmark::kBiasNli) {
      descs.insert(descs.begin(), ConstructionDescriptor::ForOperator(
                                      config.benchmark, Operator::kBaseline));
    }
    r.table = ScoreInProcess(config, descs);
  }
  const ScoreTable& t = r.table;

  for (const auto& cid : t.constructions) {
    std::vector<BiasScore> scores;
    for (const auto& m : t.models) scores.push_back(t.At(cid, m));
    r.rankings.push_back(RankModels(scores));
  }
  const Ranking* base = nullptr;
  for (const auto& rk : r.rankings) {
    if (rk.construction_id == kBaselineId) base = &rk;
  }
  if (base) {
    for (const auto& rk : r.rankings) {
      if (&rk != base) r.inversions.push_back(RankInversions(*base, rk));
    }
  }

  if (in_process && config.benchmark == Benchmark::kBiasNli) {
    const Inputs in = LoadInputs(config);
    const auto baseline = GenerateBiasNli(
        in.templates, in.lexicon,
        ConstructionDescriptor::ForOperator(config.benchmark,
                                            Operator::kBaseline),
        in.pools);
    std::unique_ptr<ModelRegistry> reg;
    const auto refs = PickModels(config, Task::kNli, Registry(config, reg), true);
    const TrialPredictor predictor =
        [&](const ConstructionDescriptor&, std::span<const PairInstance> data) {
          std::vector<Prediction> out;
          for (const auto* m : refs) {
            auto p = m->Predict(data);
            out.insert(out.end(), std::make_move_iterator(p.begin()),
                       std::make_move_iterator(p.end()));
          }
          return out;
        };
    auto ps = config.EffectiveProportions();
    std::sort(ps.begin(), ps.end());
    for (double p : ps) {
      auto d = SubsamplingDistribution(baseline, predictor, p, config.trials,
                                       config.seed, config.jobs);
      r.distributions.insert(r.distributions.end(),
                             std::make_move_iterator(d.begin()),
                             std::make_move_iterator(d.end()));
    }
  } else {
    r.distributions = DistributionsFromTable(t);
  }

  // Reports.
  fs::create_directories(config.out);
  std::string rankings = "construction,rank,model,score\n";
  for (const auto& rk : r.rankings) {
    for (const auto& e : rk.entries) {
      const std::vector<std::string> row = {
          rk.construction_id, std::to_string(e.rank), e.model_id,
          e.score.Formatted()};
      rankings += CsvLine(row);
    }
  }
  std::string inversions = "baseline,alternate,model_a,model_b\n";
  std::string summary = "baseline,alternate,kendall_distance,max_distance\n";
  for (const auto& inv : r.inversions) {
    for (const auto& pair : inv.inversions) {
      const std::vector<std::string> row = {inv.a_id, inv.b_id, pair.first,
                                            pair.second};
      inversions += CsvLine(row);
    }
    const std::size_t n = t.models.size();
    const std::vector<std::string> row = {inv.a_id, inv.b_id,
                                          std::to_string(inv.kendall_distance),
                                          std::to_string(n * (n - 1) / 2)};
    summary += CsvLine(row);
  }
  std::string dist = "trial,model,proportion,score,count,n,seed\n";
  std::string dist_summary =
      "model,proportion,trials,mean,stddev,min,q1,median,q3,max\n";
  for (const auto& d : r.distributions) {
    for (std::size_t i = 0; i < d.scores.size(); ++i) {
      const auto& s = d.scores[i];
      const std::vector<std::string> row = {
          std::to_string(i), d.model_id, FormatProportion(d.proportion),
          s.Formatted(), std::to_string(s.count), std::to_string(s.n),
          std::to_string(d.seeds[i])};
      dist += CsvLine(row);
    }
    const auto& m = d.summary;
    const std::vector<std::string> row = {
        d.model_id, FormatProportion(d.proportion), std::to_string(m.n),
        Fixed4(m.mean), Fixed4(m.stddev), Fixed4(m.min), Fixed4(m.q1),
        Fixed4(m.median), Fixed4(m.q3), Fixed4(m.max)};
    dist_summary += CsvLine(row);
  }
  // The overlap column is this tool's own proxy statistic; the header says
  // so to keep it from being read as a published number.
  std::string overlap = "proportion,model_a,model_b,order_flip_fraction_proxy\n";
  const bool has_full =
      std::find(t.constructions.begin(), t.constructions.end(), kBaselineId) !=
      t.constructions.end();
  if (has_full) {
    for (std::size_t i = 0; i < r.distributions.size(); ++i) {
      for (std::size_t j = i + 1; j < r.distributions.size(); ++j) {
        const auto& a = r.distributions[i];
        const auto& b = r.distributions[j];
        if (a.proportion != b.proportion) continue;
        const double v = DistributionOverlap(
            a, b, t.At(std::string(kBaselineId), a.model_id),
            t.At(std::string(kBaselineId), b.model_id));
        const std::vector<std::string> row = {FormatProportion(a.proportion),
                                              a.model_id, b.model_id,
                                              Fixed4(v)};
        overlap += CsvLine(row);
      }
    }
  }
  WriteTextFile(config.out / "rankings.csv", rankings);
  WriteTextFile(config.out / "inversions.csv", inversions);
  WriteTextFile(config.out / "inversion_summary.csv", summary);
  WriteTextFile(config.out / "deltas.csv", DeltasCsv(t));
  WriteTextFile(config.out / "distribution.csv", dist);
  WriteTextFile(config.out / "distribution_summary.csv", dist_summary);
  WriteTextFile(config.out / "overlap.csv", overlap);
  return r;
}

void RunPredict(const AuditConfig& config) {
  RequireOut(config);
  if (config.datasets.empty()) throw ValidationError("--datasets is required");
  if (config.models.empty()) throw ValidationError("--model is required");
  const Manifest manifest = Manifest::Load(config.datasets / kManifestName);
  const Task task = TaskFor(manifest.benchmark);
  std::unique_ptr<ModelRegistry> reg;
  const auto refs = PickModels(config, task, Registry(config, reg), false);
  std::vector<const ManifestEntry*> entries;
  for (const auto& e : manifest.datasets) {
    if (Selected(config, e.descriptor)) entries.push_back(&e);
  }
  std::vector<std::vector<Prediction>> preds(entries.size());
  ParallelFor(entries.size(), config.jobs, [&](std::size_t i) {
    VerifyDatasetFile(config.datasets, *entries[i]);
    const Dataset d = ReadDataset(config.datasets / entries[i]->file);
    for (const auto* m : refs) {
      auto p = PredictDataset(*m, d);
      preds[i].insert(preds[i].end(), std::make_move_iterator(p.begin()),
                      std::make_move_iterator(p.end()));
    }
  });
  if (config.out.has_parent_path()) {
    fs::create_directories(config.out.parent_path());
  }
  JsonlWriter w(config.out);
  for (const auto& batch : preds) {
    for (const auto& p : batch) w.Write(p);
  }
  w.Close();
}

std::string ScoresCsv(const ScoreTable& table) {
  std::vector<std::string> header = {"construction"};
  header.insert(header.end(), table.models.begin(), table.models.end());
  std::string out = CsvLine(header);
  for (const auto& cid : table.constructions) {
    std::vector<std::string> row = {cid};
    for (const auto& m : table.models) row.push_back(table.At(cid, m).Formatted());
    out += CsvLine(row);
  }
  return out;
}

std::string DeltasCsv(const ScoreTable& table) {
  std::vector<std::string> header = {"construction"};
  header.insert(header.end(), table.models.begin(), table.models.end());
  std::string out = CsvLine(header);
  const std::string base(kBaselineId);
  if (std::find(table.constructions.begin(), table.constructions.end(),
                base) == table.constructions.end()) {
    return out;
  }
  for (const auto& cid : table.constructions) {
    if (cid == base) continue;
    std::vector<std::string> row = {cid};
    for (const auto& m : table.models) {
      row.push_back(ScoreDelta(table.At(base, m), table.At(cid, m)).Formatted());
    }
    out += CsvLine(row);
  }
  return out;
}

std::string ScoresJson(const ScoreTable& table) {
  Json j;
  j["metric"] = ToString(table.metric);
  j["orientation"] = ToString(OrientationOf(table.metric));
  j["constructions"] = table.constructions;
  j["models"] = table.models;
  j["trials"] = Json::array();
  for (const auto& d : table.trial_descriptors) {
    Json t;
    t["construction_id"] = d.id;
    t["operator"] = ToString(d.op);
    Json params = Json::object();
    for (const auto& [k, v] : d.params) params[k] = v;
    t["params"] = std::move(params);
    j["trials"].push_back(std::move(t));
  }
  j["scores"] = Json::array();
  auto emit = [&](const std::string& cid) {
    for (const auto& m : table.models) {
      const BiasScore& s = table.At(cid, m);
      Json x;
      x["construction_id"] = cid;
      x["model_id"] = m;
      x["value"] = s.Formatted();
      x["count"] = s.count;
      x["n"] = s.n;
      j["scores"].push_back(std::move(x));
    }
  };
  for (const auto& cid : table.constructions) emit(cid);
  for (const auto& d : table.trial_descriptors) emit(d.id);
  j["deltas"] = Json::array();
  const std::string base(kBaselineId);
  if (std::find(table.constructions.begin(), table.constructions.end(),
                base) != table.constructions.end()) {
    for (const auto& cid : table.constructions) {
      if (cid == base) continue;
      for (const auto& m : table.models) {
        const MetricDelta d = ScoreDelta(table.At(base, m), table.At(cid, m));
        Json x;
        x["model_id"] = m;
        x["baseline_id"] = d.baseline_id;
        x["alternate_id"] = d.alternate_id;
        x["delta"] = d.Formatted();
        j["deltas"].push_back(std::move(x));
      }
    }
  }
  return j.dump(2) + "\n";
}

ScoreTable ParseScoresJson(std::string_view json, const std::string& where) {
  Json j;
  try {
    j = Json::parse(json.begin(), json.end());
  } catch (const Json::exception& e) {
    throw ValidationError(where + ": malformed JSON: " + e.what());
  }
  ScoreTable t;
  try {
    t.metric = ParseMetric(j.at("metric").get<std::string>());
    t.constructions = j.at("constructions").get<std::vector<std::string>>();
    t.models = j.at("models").get<std::vector<std::string>>();
    for (const auto& x : j.at("trials")) {
      ConstructionDescriptor d;
      d.id = x.at("construction_id").get<std::string>();
      d.op = ParseOperator(x.at("operator").get<std::string>());
      d.benchmark = t.metric == Metric::kMfMismatchPct ? Benchmark::kWinogender
                                                       : Benchmark::kBiasNli;
      d.params =
          x.at("params").get<std::map<std::string, std::string>>();
      d.Validate();
      t.trial_descriptors.push_back(std::move(d));
    }
    for (const auto& x : j.at("scores")) {
      BiasScore s;
      s.construction_id = x.at("construction_id").get<std::string>();
      s.model_id = x.at("model_id").get<std::string>();
      s.metric = t.metric;
      s.count = x.at("count").get<uint64_t>();
      s.n = x.at("n").get<uint64_t>();
      if (s.n == 0 || s.count > s.n) {
        throw ValidationError("score of '" + s.model_id + "' on '" +
                              s.construction_id + "' is out of range");
      }
      AddScore(t, std::move(s));
    }
  } catch (const Json::exception& e) {
    throw ValidationError(where + ": " + e.what());
  }
  for (const auto& cid : t.constructions) {
    for (const auto& m : t.models) {
      if (!t.Has(cid, m)) {
        throw ValidationError(where + ": no score for model '" + m +
                              "' on construction '" + cid + "'");
      }
    }
  }
  return t;
}

std::string RenderReport(const fs::path& dir) {
  struct Part {
    const char* file;
    const char* title;
  };
  static const Part kParts[] = {
      {"scores.csv", "Bias scores"},
      {"deltas.csv", "Change vs baseline (baseline minus alternate)"},
      {"rankings.csv", "Rankings (least biased first; ties share a rank)"},
      {"inversion_summary.csv", "Rank inversions vs baseline"},
      {"inversions.csv", "Inverted model pairs"},
      {"distribution_summary.csv", "Subsampling distributions"},
      {"overlap.csv",
       "Distribution overlap (proxy: fraction of paired trials whose model "
       "order is the reverse of the full-dataset order)"},
  };
  std::string out;
  if (fs::exists(dir / "scores.json")) {
    const ScoreTable t = ParseScoresJson(ReadTextFile(dir / "scores.json"),
                                         (dir / "scores.json").string());
    out += "Metric: " + std::string(ToString(t.metric)) + " (" +
           std::string(ToString(OrientationOf(t.metric))) + ")\n\n";
  }
  bool any = false;
  for (const auto& part : kParts) {
    const fs::path p = dir / part.file;
    if (!fs::exists(p)) continue;
    const auto rows = ParseCsv(ReadTextFile(p));
    any = true;
    out += std::string(part.title) + "\n\n";
    out += rows.size() <= 1 ? std::string("(none)\n") : AlignedTable(rows);
    out += "\n";
  }
  if (!any) throw ValidationError("no reports found in " + dir.string());
  return out;
}

}  // namespace bias_audit
