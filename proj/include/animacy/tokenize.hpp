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

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace animacy {

inline constexpr std::string_view kBeginSentinel = "<s>";
inline constexpr std::string_view kEndSentinel = "</s>";

struct TokenSpan {
  std::string text;
  std::size_t begin = 0;  // byte offset of the first character
  std::size_t end = 0;    // one past the last character
};

/// Tokenizer used by the reference n-gram model.
///
/// Whitespace separates chunks; each chunk splits into runs of word
/// characters (ASCII alphanumerics, apostrophe, hyphen, and any byte >= 0x80
/// so UTF-8 sequences stay whole) and single punctuation characters. The
/// sentinels `<s>` and `</s>` are atomic when they form a whole chunk.
std::vector<TokenSpan> tokenize_with_offsets(std::string_view text);

std::vector<std::string> tokenize(std::string_view text);

}  // namespace animacy
