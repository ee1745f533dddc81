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

#include "bias_audit/text.h"

#include <algorithm>
#include <array>
#include <cctype>

namespace bias_audit::text {
namespace {

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }
bool IsAlnum(char c) { return std::isalnum(static_cast<unsigned char>(c)); }
char Lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

bool StartsWith(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

}  // namespace

std::string Trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && IsSpace(s[b])) ++b;
  while (e > b && IsSpace(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string ToLower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), Lower);
  return out;
}

std::vector<std::string> SplitWhitespace(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && IsSpace(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !IsSpace(s[j])) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string> Split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string NormalizeAnswer(std::string_view s) {
  std::string out;
  for (const auto& tok : SplitWhitespace(s)) {
    if (!out.empty()) out.push_back(' ');
    out += ToLower(tok);
  }
  return out;
}

std::vector<std::string> ContentTokens(std::string_view s) {
  std::vector<std::string> out;
  for (const auto& raw : SplitWhitespace(s)) {
    std::size_t b = 0;
    std::size_t e = raw.size();
    while (b < e && !IsAlnum(raw[b])) ++b;
    while (e > b && !IsAlnum(raw[e - 1])) --e;
    if (e > b) out.push_back(ToLower(std::string_view(raw).substr(b, e - b)));
  }
  return out;
}

bool HasContentToken(std::string_view s, std::string_view token) {
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && IsSpace(s[i])) ++i;
    std::size_t e = i;
    while (e < s.size() && !IsSpace(s[e])) ++e;
    std::size_t b = i;
    std::size_t f = e;
    while (b < f && !IsAlnum(s[b])) ++b;
    while (f > b && !IsAlnum(s[f - 1])) --f;
    if (f > b && f - b == token.size()) {
      bool eq = true;
      for (std::size_t k = 0; k < token.size() && eq; ++k) {
        eq = Lower(s[b + k]) == token[k];
      }
      if (eq) return true;
    }
    i = e;
  }
  return false;
}

std::vector<Span> FindWord(std::string_view s, std::string_view phrase) {
  std::vector<Span> out;
  if (phrase.empty() || phrase.size() > s.size()) return out;
  const std::string hay = ToLower(s);
  const std::string needle = ToLower(phrase);
  std::size_t pos = hay.find(needle);
  while (pos != std::string::npos) {
    const std::size_t end = pos + needle.size();
    const bool left_ok = pos == 0 || !IsAlnum(hay[pos - 1]);
    const bool right_ok = end == hay.size() || !IsAlnum(hay[end]);
    if (left_ok && right_ok) out.push_back({pos, end});
    pos = hay.find(needle, pos + 1);
  }
  return out;
}

std::string_view IndefiniteArticleFor(std::string_view word) {
  const std::string w = ToLower(word);
  if (w.empty()) return "a";
  // Silent h takes "an"; a consonant-sounding vowel letter takes "a".
  static constexpr std::array<std::string_view, 4> kSilentH = {
      "honest", "honor", "hour", "heir"};
  static constexpr std::array<std::string_view, 6> kYouSound = {
      "uni", "use", "usu", "eu", "one", "ubiq"};
  for (auto p : kSilentH) {
    if (StartsWith(w, p)) return "an";
  }
  for (auto p : kYouSound) {
    if (StartsWith(w, p)) return "a";
  }
  switch (w[0]) {
    case 'a':
    case 'e':
    case 'i':
    case 'o':
    case 'u':
      return "an";
    default:
      return "a";
  }
}

std::string RepairArticles(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 8);
  std::size_t i = 0;
  while (i < s.size()) {
    if (IsSpace(s[i])) {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && !IsSpace(s[j])) ++j;
    std::string_view tok = s.substr(i, j - i);
    const std::string lower = ToLower(tok);
    if (lower == "a" || lower == "an") {
      std::size_t k = j;
      while (k < s.size() && IsSpace(s[k])) ++k;
      std::size_t m = k;
      while (m < s.size() && !IsSpace(s[m])) ++m;
      if (m > k) {
        std::string fixed(IndefiniteArticleFor(s.substr(k, m - k)));
        out += MatchLeadingCase(fixed, tok);
      } else {
        out += tok;
      }
    } else {
      out += tok;
    }
    i = j;
  }
  return out;
}

std::string MatchLeadingCase(std::string_view word, std::string_view model) {
  std::string out(word);
  if (!out.empty() && !model.empty() &&
      std::isupper(static_cast<unsigned char>(model[0]))) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

bool IsIndefinitePronoun(std::string_view word) {
  static constexpr std::array<std::string_view, 8> kWords = {
      "someone", "somebody", "anyone", "anybody",
      "everyone", "everybody", "no one", "nobody"};
  const std::string w = ToLower(word);
  return std::find(kWords.begin(), kWords.end(), w) != kWords.end();
}

std::string ReplaceAll(std::string_view s, std::string_view from,
                       std::string_view to) {
  std::string out;
  if (from.empty()) return std::string(s);
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(from, start);
    if (pos == std::string_view::npos) break;
    out += s.substr(start, pos - start);
    out += to;
    start = pos + from.size();
  }
  out += s.substr(start);
  return out;
}

}  // namespace bias_audit::text
