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

// bias_audit: generate alternate benchmark constructions, score predictions
// and report how stable the measured bias is.
//
// Exit codes: 0 success, 1 validation error, 2 missing predictions.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bias_audit/audit.h"
#include "bias_audit/error.h"
#include "bias_audit/wire.h"

namespace {

namespace fs = std::filesystem;
using bias_audit::AuditConfig;

struct Flags {
  std::string benchmark = "winogender";
  std::vector<std::string> constructions;
  std::vector<double> proportions;
  std::size_t trials = bias_audit::kDefaultTrials;
  uint64_t seed = 0;
  std::vector<std::string> predictions;
  std::vector<std::string> models;
  std::string out;
  std::string data_dir;
  std::string datasets;
  std::string scores;
  std::string templates;
  std::string lexicon;
  std::string pools;
  std::string synonyms;
  std::string models_config;
  std::size_t jobs = 1;
};

void AddCommon(CLI::App* cmd, Flags& f) {
  cmd->add_option("--benchmark", f.benchmark, "winogender or biasnli")
      ->capture_default_str();
  cmd->add_option("--construction", f.constructions,
                  "Construction operator or \"all\" (repeatable)");
  cmd->add_option("--out", f.out, "Output directory or file");
  cmd->add_option("--data-dir", f.data_dir,
                  "Data directory (default: $BIAS_AUDIT_DATA_DIR or the "
                  "bundled data)");
  cmd->add_option("--templates", f.templates, "Template file override");
  cmd->add_option("--lexicon", f.lexicon, "Lexicon file override");
  cmd->add_option("--pools", f.pools, "Perturbation pools override");
  cmd->add_option("--synonyms", f.synonyms, "Synonym table override");
  cmd->add_option("--jobs", f.jobs, "Worker threads")->capture_default_str();
}

void AddSampling(CLI::App* cmd, Flags& f) {
  cmd->add_option("--proportion", f.proportions,
                  "Subsample proportion (repeatable; default 0.1 0.25 0.5)");
  cmd->add_option("--trials", f.trials, "Subsample trials per proportion")
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "Base seed")->capture_default_str();
}

void AddPredictors(CLI::App* cmd, Flags& f) {
  cmd->add_option("--predictions", f.predictions,
                  "Prediction file (repeatable)");
  cmd->add_option("--model", f.models, "Reference model name (repeatable)");
  cmd->add_option("--models-config", f.models_config,
                  "Reference model config override");
  cmd->add_option("--datasets", f.datasets,
                  "Directory with manifest.json and datasets");
}

AuditConfig ToConfig(const Flags& f) {
  AuditConfig c;
  c.benchmark = bias_audit::ParseBenchmark(f.benchmark);
  c.constructions = f.constructions;
  c.constructions_given = !f.constructions.empty();
  c.proportions = f.proportions;
  c.trials = f.trials;
  c.seed = f.seed;
  c.data_dir = bias_audit::ResolveDataDir(
      f.data_dir.empty() ? std::nullopt : std::optional<fs::path>(f.data_dir));
  c.templates = f.templates;
  c.lexicon = f.lexicon;
  c.pools = f.pools;
  c.synonyms = f.synonyms;
  c.models_config = f.models_config;
  c.models = f.models;
  for (const auto& p : f.predictions) c.prediction_files.emplace_back(p);
  c.datasets = f.datasets;
  c.scores = f.scores;
  c.out = f.out;
  c.jobs = f.jobs;
  c.ResolvePaths();
  return c;
}

int Run(int argc, char** argv) {
  CLI::App app{"Bias benchmark construction audit"};
  app.require_subcommand(1);
  Flags f;
  std::string input;
  std::string dataset;

  auto* gen = app.add_subcommand("generate", "Write dataset files + manifest");
  AddCommon(gen, f);
  AddSampling(gen, f);

  auto* perturb =
      app.add_subcommand("perturb", "Apply constructions to a baseline file");
  AddCommon(perturb, f);
  AddSampling(perturb, f);
  perturb->add_option("--input", input, "Baseline dataset file")->required();

  auto* score = app.add_subcommand("score", "Score predictions");
  AddCommon(score, f);
  AddPredictors(score, f);

  auto* stab =
      app.add_subcommand("stability", "Rankings, inversions, distributions");
  AddCommon(stab, f);
  AddSampling(stab, f);
  AddPredictors(stab, f);
  stab->add_option("--scores", f.scores, "scores.json from a score run");

  auto* report = app.add_subcommand("report", "Print the reports in a directory");
  report->add_option("--out", f.out, "Report directory")->required();

  auto* predict = app.add_subcommand(
      "predict", "Run reference models over a manifest's datasets");
  AddCommon(predict, f);
  AddPredictors(predict, f);

  auto* validate =
      app.add_subcommand("validate", "Check dataset or prediction files");
  validate->add_option("--dataset", dataset, "Dataset file");
  validate->add_option("--predictions", f.predictions, "Prediction file(s)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return bias_audit::ExitCodeFor(bias_audit::ErrorKind::kValidation);
  }

  try {
    if (*gen) {
      const auto m = bias_audit::RunGenerate(ToConfig(f));
      for (const auto& e : m.datasets) {
        std::cout << e.file << "\t" << e.count << "\t" << e.content_hash
                  << "\n";
      }
      std::cout << "wrote " << m.datasets.size() << " dataset(s) and "
                << bias_audit::kManifestName << " to " << f.out << "\n";
    } else if (*perturb) {
      const auto m = bias_audit::RunPerturb(ToConfig(f), input);
      std::cout << "manifest lists " << m.datasets.size() << " dataset(s)\n";
    } else if (*score) {
      bias_audit::RunScore(ToConfig(f));
      std::cout << bias_audit::RenderReport(f.out);
    } else if (*stab) {
      bias_audit::RunStability(ToConfig(f));
      std::cout << bias_audit::RenderReport(f.out);
    } else if (*report) {
      const std::string text = bias_audit::RenderReport(f.out);
      bias_audit::WriteTextFile(fs::path(f.out) / "report.txt", text);
      std::cout << text;
    } else if (*predict) {
      bias_audit::RunPredict(ToConfig(f));
      std::cout << "wrote " << f.out << "\n";
    } else if (*validate) {
      if (dataset.empty() && f.predictions.empty()) {
        throw bias_audit::ValidationError(
            "validate needs --dataset and/or --predictions");
      }
      if (!dataset.empty() && f.predictions.empty()) {
        const auto s = bias_audit::ValidateDatasetFile(dataset);
        std::cout << dataset << ": " << s.records << " "
                  << bias_audit::ToString(s.task) << " record(s) ok\n";
      }
      for (const auto& p : f.predictions) {
        std::optional<fs::path> ds;
        if (!dataset.empty()) ds = dataset;
        const auto s = bias_audit::ValidatePredictionFile(p, ds);
        std::cout << p << ": " << s.records << " prediction(s) from "
                  << s.models.size() << " model(s) ok\n";
      }
    }
  } catch (const bias_audit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bias_audit::ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bias_audit::ExitCodeFor(bias_audit::ErrorKind::kValidation);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return Run(argc, argv); }
