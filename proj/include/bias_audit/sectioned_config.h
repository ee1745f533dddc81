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

#ifndef BIAS_AUDIT_SECTIONED_CONFIG_H_
#define BIAS_AUDIT_SECTIONED_CONFIG_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bias_audit {

// The sectioned key-value format used for lexicons, pools and reference
// model configs:
//
//   # comment
//   [occupations]
//   accountant
//   [pronouns]
//   male.nominative = he
//
// A line inside a section is either a bare entry or `key = value`.
class SectionedConfig {
 public:
  struct Entry {
    std::string key;
    std::optional<std::string> value;
    int line = 0;
  };

  static SectionedConfig Parse(std::string_view content,
                               const std::string& source_name);
  static SectionedConfig Load(const std::filesystem::path& path);

  const std::string& source_name() const { return source_name_; }
  const std::vector<std::string>& section_names() const { return order_; }
  bool HasSection(std::string_view name) const;

  // Entries of a section, empty if the section does not exist.
  const std::vector<Entry>& Entries(std::string_view section) const;

  // Bare entries of a section; throws if any entry has a value or repeats.
  std::vector<std::string> List(std::string_view section) const;

  // Key-value entries in file order; throws on bare entries or repeated keys.
  std::vector<std::pair<std::string, std::string>> Pairs(
      std::string_view section) const;

  std::optional<std::string> Get(std::string_view section,
                                 std::string_view key) const;

 private:
  std::string source_name_;
  std::vector<std::string> order_;
  std::map<std::string, std::vector<Entry>, std::less<>> sections_;
};

}  // namespace bias_audit

#endif  // BIAS_AUDIT_SECTIONED_CONFIG_H_
