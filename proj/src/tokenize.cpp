// Copyright 2026 The Animacy Harness Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "animacy/tokenize.hpp"

namespace animacy {
namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_word_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '\'' || c == '-' || c >= 0x80;
}

std::size_t sentinel_length(std::string_view text, std::size_t pos) {
  const auto rest = text.substr(pos);
  if (rest.starts_with(kEndSentinel)) return kEndSentinel.size();
  if (rest.starts_with(kBeginSentinel)) return kBeginSentinel.size();
  return 0;
}

}  // namespace

std::vector<TokenSpan> tokenize_with_offsets(std::string_view text) {
  std::vector<TokenSpan> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_space(c)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    if (const std::size_t len = sentinel_length(text, i); len > 0) {
      j = i + len;
    } else if (is_word_char(c)) {
      while (j < n && is_word_char(static_cast<unsigned char>(text[j]))) ++j;
    } else {
      j = i + 1;
    }
    out.push_back({std::string(text.substr(i, j - i)), i, j});
    i = j;
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (auto& span : tokenize_with_offsets(text)) out.push_back(std::move(span.text));
  return out;
}

}  // namespace animacy
