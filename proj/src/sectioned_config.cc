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

#include "bias_audit/sectioned_config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "bias_audit/error.h"
#include "bias_audit/text.h"

namespace bias_audit {

SectionedConfig SectionedConfig::Parse(std::string_view content,
                                       const std::string& source_name) {
  SectionedConfig cfg;
  cfg.source_name_ = source_name;
  std::string current;
  int line_no = 0;
  for (const auto& raw : text::Split(content, '\n')) {
    ++line_no;
    const std::string line = text::Trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto where = source_name + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ValidationError(where + ": malformed section header '" + line +
                              "'");
      }
      current = text::Trim(std::string_view(line).substr(1, line.size() - 2));
      if (cfg.sections_.count(current)) {
        throw ValidationError(where + ": section [" + current +
                              "] declared twice");
      }
      cfg.order_.push_back(current);
      cfg.sections_[current];
      continue;
    }
    if (current.empty()) {
      throw ValidationError(where + ": entry outside of any section");
    }
    Entry e;
    e.line = line_no;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      e.key = line;
    } else {
      e.key = text::Trim(std::string_view(line).substr(0, eq));
      e.value = text::Trim(std::string_view(line).substr(eq + 1));
      if (e.key.empty()) {
        throw ValidationError(where + ": empty key");
      }
    }
    cfg.sections_[current].push_back(std::move(e));
  }
  return cfg;
}

SectionedConfig SectionedConfig::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str(), path.string());
}

bool SectionedConfig::HasSection(std::string_view name) const {
  return sections_.find(name) != sections_.end();
}

const std::vector<SectionedConfig::Entry>& SectionedConfig::Entries(
    std::string_view section) const {
  static const std::vector<Entry> kEmpty;
  auto it = sections_.find(section);
  return it == sections_.end() ? kEmpty : it->second;
}

std::vector<std::string> SectionedConfig::List(std::string_view section) const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& e : Entries(section)) {
    const auto where = source_name_ + ":" + std::to_string(e.line);
    if (e.value) {
      throw ValidationError(where + ": section [" + std::string(section) +
                            "] expects one word per line, got key-value");
    }
    if (!seen.insert(e.key).second) {
      throw ValidationError(where + ": duplicate entry '" + e.key +
                            "' in [" + std::string(section) + "]");
    }
    out.push_back(e.key);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> SectionedConfig::Pairs(
    std::string_view section) const {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  for (const auto& e : Entries(section)) {
    const auto where = source_name_ + ":" + std::to_string(e.line);
    if (!e.value) {
      throw ValidationError(where + ": section [" + std::string(section) +
                            "] expects 'key = value', got '" + e.key + "'");
    }
    if (!seen.insert(e.key).second) {
      throw ValidationError(where + ": duplicate key '" + e.key + "' in [" +
                            std::string(section) + "]");
    }
    out.emplace_back(e.key, *e.value);
  }
  return out;
}

std::optional<std::string> SectionedConfig::Get(std::string_view section,
                                                std::string_view key) const {
  for (const auto& e : Entries(section)) {
    if (e.key == key) return e.value;
  }
  return std::nullopt;
}

}  // namespace bias_audit
