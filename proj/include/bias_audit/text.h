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

// Small English text helpers shared by generation, perturbation and the
// reference predictors. ASCII case folding only; templates are English.

#ifndef BIAS_AUDIT_TEXT_H_
#define BIAS_AUDIT_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace bias_audit::text {

std::string Trim(std::string_view s);
std::string ToLower(std::string_view s);
std::vector<std::string> SplitWhitespace(std::string_view s);
std::vector<std::string> Split(std::string_view s, char sep);

// Lowercase, trim and collapse internal whitespace runs to one space.
std::string NormalizeAnswer(std::string_view s);

// Whitespace tokens with leading/trailing punctuation stripped and
// lowercased. Tokens that are pure punctuation are dropped.
std::vector<std::string> ContentTokens(std::string_view s);

// True when some content token of `s` equals lowercase `token`.
bool HasContentToken(std::string_view s, std::string_view token);

// Half-open byte range of a match inside a string.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// All case-insensitive occurrences of `phrase` in `s` that start and end on
// word boundaries (neighbors are not ASCII alphanumerics).
std::vector<Span> FindWord(std::string_view s, std::string_view phrase);

// "a" or "an" for the word that would follow the article.
std::string_view IndefiniteArticleFor(std::string_view word);

// Rewrites every standalone "a"/"an" token so it agrees with the next word,
// keeping the article's capitalization.
std::string RepairArticles(std::string_view s);

// Upper-cases the first character when `model` starts with an upper-case
// letter.
std::string MatchLeadingCase(std::string_view word, std::string_view model);

bool IsIndefinitePronoun(std::string_view word);

std::string ReplaceAll(std::string_view s, std::string_view from,
                       std::string_view to);

}  // namespace bias_audit::text

#endif  // BIAS_AUDIT_TEXT_H_
