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

#include "bias_audit/wire.h"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "bias_audit/error.h"
#include "bias_audit/fnv.h"
#include "bias_audit/text.h"
#include "json.hpp"

namespace bias_audit {
namespace {

using Json = nlohmann::ordered_json;

Json ParseObject(std::string_view line, const std::string& where) {
  Json j;
  try {
    j = Json::parse(line.begin(), line.end());
  } catch (const Json::parse_error& e) {
    throw ValidationError(where + ": malformed JSON: " + e.what());
  }
  if (!j.is_object()) throw ValidationError(where + ": expected a JSON object");
  return j;
}

void CheckKeys(const Json& j, std::initializer_list<std::string_view> allowed,
               const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw ValidationError(where + ": unexpected key '" + k + "'");
    }
  }
  for (auto k : allowed) {
    if (!j.contains(k)) {
      throw ValidationError(where + ": missing key '" + std::string(k) + "'");
    }
  }
}

std::string Str(const Json& j, std::string_view key, const std::string& where) {
  const Json& v = j.at(key);
  if (!v.is_string()) {
    throw ValidationError(where + ": '" + std::string(key) +
                          "' must be a string");
  }
  return v.get<std::string>();
}

std::map<std::string, std::string> StrMap(const Json& j, std::string_view key,
                                          const std::string& where) {
  const Json& v = j.at(key);
  if (!v.is_object()) {
    throw ValidationError(where + ": '" + std::string(key) +
                          "' must be an object");
  }
  std::map<std::string, std::string> out;
  for (const auto& [k, x] : v.items()) {
    if (!x.is_string()) {
      throw ValidationError(where + ": " + std::string(key) + "." + k +
                            " must be a string");
    }
    out.emplace(k, x.get<std::string>());
  }
  return out;
}

Json MapJson(const std::map<std::string, std::string>& m) {
  Json j = Json::object();
  for (const auto& [k, v] : m) j[k] = v;
  return j;
}

void CheckInstanceInvariants(const Instance& inst, const std::string& where) {
  if (inst.id.empty()) throw ValidationError(where + ": empty id");
  if (inst.candidates.empty()) {
    throw ValidationError(where + ": instance has no candidates");
  }
  if (std::find(inst.candidates.begin(), inst.candidates.end(), inst.gold) ==
      inst.candidates.end()) {
    throw ValidationError(where + ": gold '" + inst.gold +
                          "' is not a candidate");
  }
  if (inst.pronoun.empty()) throw ValidationError(where + ": empty pronoun");
}

void CheckDerivedId(const std::string& id, const std::string& construction_id,
                    const std::map<std::string, std::string>& metadata,
                    const std::string& where) {
  auto tid = metadata.find(std::string(meta::kTemplateId));
  if (tid == metadata.end()) {
    throw ValidationError(where + ": metadata lacks template_id");
  }
  const std::string expect =
      InstanceIdUnchecked(tid->second, StoredFillers(metadata), construction_id);
  if (expect != id) {
    throw ValidationError(where + ": id " + id +
                          " does not match its content (expected " + expect +
                          ")");
  }
}

}  // namespace

std::string ToJsonLine(const Instance& instance) {
  Json j;
  j["id"] = instance.id;
  j["construction_id"] = instance.construction_id;
  j["task"] = ToString(instance.task);
  j["text"] = instance.text;
  j["candidates"] = instance.candidates;
  j["pronoun"] = instance.pronoun;
  j["pronoun_gender"] = ToString(instance.pronoun_gender);
  j["gold"] = instance.gold;
  j["metadata"] = MapJson(instance.metadata);
  return j.dump();
}

std::string ToJsonLine(const PairInstance& pair) {
  Json j;
  j["id"] = pair.id;
  j["construction_id"] = pair.construction_id;
  j["task"] = ToString(Task::kNli);
  j["premise"] = pair.premise;
  j["hypothesis"] = pair.hypothesis;
  j["gold"] = pair.gold_label;
  j["metadata"] = MapJson(pair.metadata);
  return j.dump();
}

std::string ToJsonLine(const Prediction& prediction) {
  Json j;
  j["instance_id"] = prediction.instance_id;
  j["model_id"] = prediction.model_id;
  j["answer"] = prediction.answer;
  return j.dump();
}

Task PeekTask(std::string_view line, const std::string& where) {
  const Json j = ParseObject(line, where);
  if (!j.contains("task")) throw ValidationError(where + ": missing key 'task'");
  return ParseTask(Str(j, "task", where));
}

Instance ParseInstanceLine(std::string_view line, const std::string& where) {
  const Json j = ParseObject(line, where);
  CheckKeys(j,
            {"id", "construction_id", "task", "text", "candidates", "pronoun",
             "pronoun_gender", "gold", "metadata"},
            where);
  Instance inst;
  try {
    inst.id = Str(j, "id", where);
    inst.construction_id = Str(j, "construction_id", where);
    inst.task = ParseTask(Str(j, "task", where));
    if (inst.task != Task::kCoref) {
      throw ValidationError("record is not a coref instance");
    }
    inst.text = Str(j, "text", where);
    const Json& c = j.at("candidates");
    if (!c.is_array()) throw ValidationError("'candidates' must be an array");
    for (const auto& x : c) {
      if (!x.is_string()) throw ValidationError("candidates must be strings");
      inst.candidates.push_back(x.get<std::string>());
    }
    inst.pronoun = Str(j, "pronoun", where);
    inst.pronoun_gender = ParseGender(Str(j, "pronoun_gender", where));
    inst.gold = Str(j, "gold", where);
    inst.metadata = StrMap(j, "metadata", where);
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    if (msg.rfind(where, 0) == 0) throw;
    throw ValidationError(where + ": " + msg);
  }
  return inst;
}

PairInstance ParsePairLine(std::string_view line, const std::string& where) {
  const Json j = ParseObject(line, where);
  CheckKeys(j,
            {"id", "construction_id", "task", "premise", "hypothesis", "gold",
             "metadata"},
            where);
  PairInstance p;
  p.id = Str(j, "id", where);
  p.construction_id = Str(j, "construction_id", where);
  if (Str(j, "task", where) != ToString(Task::kNli)) {
    throw ValidationError(where + ": record is not an nli pair");
  }
  p.premise = Str(j, "premise", where);
  p.hypothesis = Str(j, "hypothesis", where);
  p.gold_label = Str(j, "gold", where);
  p.metadata = StrMap(j, "metadata", where);
  return p;
}

Prediction ParsePredictionLine(std::string_view line,
                               const std::string& where) {
  const Json j = ParseObject(line, where);
  CheckKeys(j, {"instance_id", "model_id", "answer"}, where);
  Prediction p{Str(j, "instance_id", where), Str(j, "model_id", where),
               Str(j, "answer", where)};
  if (p.instance_id.empty()) throw ValidationError(where + ": empty instance_id");
  if (p.model_id.empty()) throw ValidationError(where + ": empty model_id");
  return p;
}

void ForEachLine(
    const std::filesystem::path& path,
    const std::function<void(std::string_view, const std::string&)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  std::size_t n = 0;
  const std::string name = path.string();
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::Trim(line).empty()) continue;
    fn(line, name + ":" + std::to_string(n));
  }
}

std::vector<std::string> Dataset::ids() const {
  std::vector<std::string> out;
  out.reserve(size());
  if (task == Task::kCoref) {
    for (const auto& i : instances) out.push_back(i.id);
  } else {
    for (const auto& p : pairs) out.push_back(p.id);
  }
  return out;
}

Dataset ReadDataset(const std::filesystem::path& path) {
  Dataset d;
  bool first = true;
  ForEachLine(path, [&](std::string_view line, const std::string& where) {
    if (first) {
      d.task = PeekTask(line, where);
      first = false;
    }
    std::string cid;
    if (d.task == Task::kCoref) {
      d.instances.push_back(ParseInstanceLine(line, where));
      cid = d.instances.back().construction_id;
    } else {
      d.pairs.push_back(ParsePairLine(line, where));
      cid = d.pairs.back().construction_id;
    }
    if (d.size() == 1) {
      d.construction_id = cid;
    } else if (cid != d.construction_id) {
      throw ValidationError(where + ": construction '" + cid +
                            "' differs from '" + d.construction_id + "'");
    }
  });
  return d;
}

std::vector<Prediction> ReadPredictions(const std::filesystem::path& path) {
  std::vector<Prediction> out;
  ForEachLine(path, [&](std::string_view line, const std::string& where) {
    out.push_back(ParsePredictionLine(line, where));
  });
  return out;
}

JsonlWriter::JsonlWriter(std::filesystem::path path)
    : path_(std::move(path)) {
  tmp_ = path_;
  tmp_ += ".tmp";
  out_.open(tmp_, std::ios::binary | std::ios::trunc);
  if (!out_) throw ValidationError("cannot write " + tmp_.string());
}

JsonlWriter::~JsonlWriter() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    std::filesystem::remove(tmp_, ec);
  }
}

void JsonlWriter::WriteLine(std::string_view line) {
  out_.write(line.data(), static_cast<std::streamsize>(line.size()));
  out_.put('\n');
  hasher_.Update(line);
  hasher_.Update("\n");
  ++count_;
}

void JsonlWriter::Finish() {
  if (finished_) return;
  out_.close();
  if (!out_) throw ValidationError("failed writing " + tmp_.string());
  finished_ = true;
}

void JsonlWriter::Commit() {
  if (committed_) return;
  Finish();
  std::filesystem::rename(tmp_, path_);
  committed_ = true;
}

void WritePredictions(const std::filesystem::path& path,
                      std::span<const Prediction> predictions) {
  JsonlWriter w(path);
  for (const auto& p : predictions) w.Write(p);
  w.Close();
}

std::string HashFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  Fnv1a64 h;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    h.Update(std::string_view(buf, static_cast<std::size_t>(in.gcount())));
  }
  return ToHex64(h.digest());
}

std::string Manifest::ToJson() const {
  Json j;
  j["benchmark"] = ToString(benchmark);
  j["seed"] = seed;
  j["datasets"] = Json::array();
  for (const auto& e : datasets) {
    Json d;
    d["construction_id"] = e.descriptor.id;
    d["operator"] = ToString(e.descriptor.op);
    d["params"] = MapJson(e.descriptor.params);
    d["file"] = e.file;
    d["count"] = e.count;
    d["content_hash"] = e.content_hash;
    j["datasets"].push_back(std::move(d));
  }
  return j.dump(2) + "\n";
}

Manifest Manifest::FromJson(std::string_view json, const std::string& where) {
  const Json j = ParseObject(json, where);
  CheckKeys(j, {"benchmark", "seed", "datasets"}, where);
  Manifest m;
  m.benchmark = ParseBenchmark(Str(j, "benchmark", where));
  if (!j.at("seed").is_number_unsigned()) {
    throw ValidationError(where + ": 'seed' must be a nonnegative integer");
  }
  m.seed = j.at("seed").get<uint64_t>();
  if (!j.at("datasets").is_array()) {
    throw ValidationError(where + ": 'datasets' must be an array");
  }
  std::set<std::string> seen;
  for (const auto& d : j.at("datasets")) {
    const std::string w = where + " dataset " + std::to_string(seen.size());
    if (!d.is_object()) throw ValidationError(w + ": expected an object");
    CheckKeys(d,
              {"construction_id", "operator", "params", "file", "count",
               "content_hash"},
              w);
    ManifestEntry e;
    e.descriptor.id = Str(d, "construction_id", w);
    e.descriptor.benchmark = m.benchmark;
    e.descriptor.op = ParseOperator(Str(d, "operator", w));
    e.descriptor.params = StrMap(d, "params", w);
    e.descriptor.Validate();
    e.file = Str(d, "file", w);
    if (!d.at("count").is_number_unsigned()) {
      throw ValidationError(w + ": 'count' must be a nonnegative integer");
    }
    e.count = d.at("count").get<std::size_t>();
    e.content_hash = Str(d, "content_hash", w);
    if (!seen.insert(e.descriptor.id).second) {
      throw ValidationError(w + ": duplicate construction '" +
                            e.descriptor.id + "'");
    }
    m.datasets.push_back(std::move(e));
  }
  return m;
}

Manifest Manifest::Load(const std::filesystem::path& path) {
  return FromJson(ReadTextFile(path), path.string());
}

void Manifest::Save(const std::filesystem::path& path) const {
  WriteTextFile(path, ToJson());
}

const ManifestEntry* Manifest::Find(std::string_view construction_id) const {
  for (const auto& e : datasets) {
    if (e.descriptor.id == construction_id) return &e;
  }
  return nullptr;
}

void VerifyDatasetFile(const std::filesystem::path& dir,
                       const ManifestEntry& entry) {
  const auto path = dir / entry.file;
  const std::string actual = HashFile(path);
  if (actual != entry.content_hash) {
    throw ValidationError(path.string() + ": content hash " + actual +
                          " does not match the manifest (" +
                          entry.content_hash + "); the file was modified");
  }
}

std::string CsvLine(std::span<const std::string> cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    const std::string& c = cells[i];
    if (c.find_first_of(",\"\n\r") == std::string::npos) {
      out += c;
      continue;
    }
    out += '"';
    for (char ch : c) {
      if (ch == '"') out += '"';
      out += ch;
    }
    out += '"';
  }
  out += '\n';
  return out;
}

void WriteTextFile(const std::filesystem::path& path, std::string_view text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw ValidationError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ValidationSummary ValidateDatasetFile(const std::filesystem::path& path) {
  ValidationSummary s;
  std::unordered_set<std::string> ids;
  std::string construction;
  ForEachLine(path, [&](std::string_view line, const std::string& where) {
    const Task task = PeekTask(line, where);
    if (s.records == 0) {
      s.task = task;
    } else if (task != s.task) {
      throw ValidationError(where + ": file mixes coref and nli records");
    }
    std::string id, cid;
    if (task == Task::kCoref) {
      Instance inst = ParseInstanceLine(line, where);
      CheckInstanceInvariants(inst, where);
      CheckDerivedId(inst.id, inst.construction_id, inst.metadata, where);
      id = inst.id;
      cid = inst.construction_id;
    } else {
      PairInstance p = ParsePairLine(line, where);
      if (p.gold_label != kNeutralLabel) {
        throw ValidationError(where + ": nli gold must be 'neutral'");
      }
      CheckDerivedId(p.id, p.construction_id, p.metadata, where);
      id = p.id;
      cid = p.construction_id;
    }
    if (s.records == 0) construction = cid;
    if (cid != construction) {
      throw ValidationError(where + ": construction '" + cid +
                            "' differs from '" + construction + "'");
    }
    if (!ids.insert(id).second) {
      throw ValidationError(where + ": duplicate id " + id);
    }
    ++s.records;
  });
  return s;
}

ValidationSummary ValidatePredictionFile(
    const std::filesystem::path& path,
    const std::optional<std::filesystem::path>& dataset_path) {
  std::optional<Dataset> data;
  std::unordered_map<std::string, std::vector<std::string>> candidates;
  if (dataset_path) {
    data = ReadDataset(*dataset_path);
    for (const auto& inst : data->instances) {
      auto& c = candidates[inst.id];
      for (const auto& x : inst.candidates) {
        c.push_back(text::NormalizeAnswer(x));
      }
    }
    for (const auto& p : data->pairs) candidates[p.id];
  }
  ValidationSummary s;
  s.task = data ? data->task : Task::kCoref;
  std::map<std::string, std::unordered_set<std::string>> seen;
  ForEachLine(path, [&](std::string_view line, const std::string& where) {
    Prediction p = ParsePredictionLine(line, where);
    if (data) {
      auto it = candidates.find(p.instance_id);
      if (it == candidates.end()) {
        throw ValidationError(where + ": unknown instance id '" +
                              p.instance_id + "'");
      }
      if (data->task == Task::kNli) {
        if (!IsNliLabel(p.answer)) {
          throw ValidationError(where + ": label '" + p.answer +
                                "' is not one of entailment, neutral, "
                                "contradiction");
        }
      } else if (std::find(it->second.begin(), it->second.end(),
                           text::NormalizeAnswer(p.answer)) ==
                 it->second.end()) {
        throw ValidationError(where + ": answer '" + p.answer +
                              "' is not a candidate");
      }
    } else if (text::Trim(p.answer).empty()) {
      throw ValidationError(where + ": empty answer");
    }
    if (!seen[p.model_id].insert(p.instance_id).second) {
      throw ValidationError(where + ": duplicate prediction for " +
                            p.instance_id + " by '" + p.model_id + "'");
    }
    ++s.records;
  });
  for (const auto& [model, ids] : seen) s.models.push_back(model);
  if (data) {
    if (seen.empty() && data->size() > 0) {
      throw MissingPredictionError(path.string() + ": no predictions");
    }
    for (const auto& [model, ids] : seen) {
      std::size_t missing = 0;
      std::string first;
      for (const auto& id : data->ids()) {
        if (!ids.count(id)) {
          if (missing++ == 0) first = id;
        }
      }
      if (missing > 0) {
        throw MissingPredictionError(
            path.string() + ": model '" + model + "' has no prediction for " +
            std::to_string(missing) + " instance(s), first " + first);
      }
    }
  }
  return s;
}

}  // namespace bias_audit
