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

// On-disk formats: line-delimited JSON instances and predictions (keys in a
// fixed order, one record per line), dataset manifests and CSV reports.

#ifndef BIAS_AUDIT_WIRE_H_
#define BIAS_AUDIT_WIRE_H_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bias_audit/construction.h"
#include "bias_audit/fnv.h"
#include "bias_audit/metrics.h"
#include "bias_audit/schema.h"

namespace bias_audit {

std::string ToJsonLine(const Instance& instance);
std::string ToJsonLine(const PairInstance& pair);
std::string ToJsonLine(const Prediction& prediction);

// Parse one record. `where` prefixes error messages (e.g. "file:12").
Instance ParseInstanceLine(std::string_view line, const std::string& where);
PairInstance ParsePairLine(std::string_view line, const std::string& where);
Prediction ParsePredictionLine(std::string_view line, const std::string& where);
// Task of an instance record, from its "task" key.
Task PeekTask(std::string_view line, const std::string& where);

// Calls `fn(line, where)` for every non-empty line.
void ForEachLine(
    const std::filesystem::path& path,
    const std::function<void(std::string_view, const std::string&)>& fn);

// A dataset file: all coref instances or all nli pairs, one construction.
struct Dataset {
  Task task = Task::kCoref;
  std::string construction_id;
  std::vector<Instance> instances;  // coref
  std::vector<PairInstance> pairs;  // nli

  std::size_t size() const {
    return task == Task::kCoref ? instances.size() : pairs.size();
  }
  std::vector<std::string> ids() const;
};

Dataset ReadDataset(const std::filesystem::path& path);
std::vector<Prediction> ReadPredictions(const std::filesystem::path& path);

// Writes records, one per line, to a temporary file that replaces the
// target on Commit(). An uncommitted writer removes its temporary file.
class JsonlWriter {
 public:
  explicit JsonlWriter(std::filesystem::path path);
  ~JsonlWriter();
  JsonlWriter(const JsonlWriter&) = delete;
  JsonlWriter& operator=(const JsonlWriter&) = delete;

  void Write(const Instance& instance) { WriteLine(ToJsonLine(instance)); }
  void Write(const PairInstance& pair) { WriteLine(ToJsonLine(pair)); }
  void Write(const Prediction& p) { WriteLine(ToJsonLine(p)); }
  void WriteLine(std::string_view line);
  std::size_t count() const { return count_; }
  // FNV-1a of every byte written so far.
  uint64_t hash() const { return hasher_.digest(); }
  // Flushes and closes the temporary file.
  void Finish();
  // Finish() if needed, then moves the file into place.
  void Commit();
  void Close() { Commit(); }

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
  std::size_t count_ = 0;
  Fnv1a64 hasher_;
  bool finished_ = false;
  bool committed_ = false;
};

void WritePredictions(const std::filesystem::path& path,
                      std::span<const Prediction> predictions);

// FNV-1a of a file's bytes as 16 hex digits.
std::string HashFile(const std::filesystem::path& path);

struct ManifestEntry {
  ConstructionDescriptor descriptor;
  std::string file;  // relative to the manifest's directory
  std::size_t count = 0;
  std::string content_hash;
};

struct Manifest {
  Benchmark benchmark = Benchmark::kWinogender;
  uint64_t seed = 0;
  std::vector<ManifestEntry> datasets;

  std::string ToJson() const;
  static Manifest FromJson(std::string_view json, const std::string& where);
  static Manifest Load(const std::filesystem::path& path);
  void Save(const std::filesystem::path& path) const;

  const ManifestEntry* Find(std::string_view construction_id) const;
};

inline constexpr std::string_view kManifestName = "manifest.json";

// Re-hashes a manifest's dataset file; throws if it was modified.
void VerifyDatasetFile(const std::filesystem::path& dir,
                       const ManifestEntry& entry);

// Comma-separated line with RFC 4180 quoting where needed, "\n" ended.
std::string CsvLine(std::span<const std::string> cells);
void WriteTextFile(const std::filesystem::path& path, std::string_view text);
std::string ReadTextFile(const std::filesystem::path& path);

// Result of the wire-format validator.
struct ValidationSummary {
  Task task = Task::kCoref;
  std::size_t records = 0;
  std::vector<std::string> models;  // prediction files only
};

// Checks every record of a dataset file: schema, gold invariants, id
// re-derivation, uniqueness and a single construction id.
ValidationSummary ValidateDatasetFile(const std::filesystem::path& path);
// Checks every record of a prediction file. With a dataset, also checks that
// ids resolve, answers fit the task and every (model, instance) is covered;
// missing coverage throws MissingPredictionError.
ValidationSummary ValidatePredictionFile(
    const std::filesystem::path& path,
    const std::optional<std::filesystem::path>& dataset_path);

}  // namespace bias_audit

#endif  // BIAS_AUDIT_WIRE_H_
