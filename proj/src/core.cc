// Copyright 2026 The trmeval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trmeval/core.h"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <set>
#include <utility>

#include "trmeval/error.h"

namespace trmeval {
namespace {

constexpr UChar32 kApostrophe = 0x27;
constexpr UChar32 kSeparator = 0x20;

bool IsWordChar(UChar32 c) { return c >= 0 && (u_isalpha(c) || u_isdigit(c)); }

std::vector<UChar32> DecodeLowercase(std::string_view raw) {
  std::vector<UChar32> out;
  out.reserve(raw.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(raw.data());
  const int32_t length = static_cast<int32_t>(raw.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    out.push_back(c < 0 ? kSeparator : u_tolower(c));
  }
  return out;
}

void AppendUtf8(UChar32 c, std::string& out) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t len = 0;
  UBool error = false;
  U8_APPEND(buf, len, U8_MAX_LENGTH, c, error);
  if (!error) out.append(reinterpret_cast<const char*>(buf), len);
}

}  // namespace

Tokens Tokenize(std::string_view raw) {
  const std::vector<UChar32> chars = DecodeLowercase(raw);
  Tokens tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < chars.size(); ++i) {
    const UChar32 c = chars[i];
    if (IsWordChar(c)) {
      AppendUtf8(c, current);
    } else if (c == kApostrophe && i > 0 && i + 1 < chars.size() &&
               IsWordChar(chars[i - 1]) && IsWordChar(chars[i + 1])) {
      AppendUtf8(c, current);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

Utterance::Utterance(std::string raw)
    : raw_(std::move(raw)), tokens_(Tokenize(raw_)) {}

std::vector<Utterance> MakeUtterances(std::span<const std::string> raws) {
  std::vector<Utterance> out;
  out.reserve(raws.size());
  for (const auto& raw : raws) out.emplace_back(raw);
  return out;
}

const EvalInstance* Corpus::Find(std::string_view id) const {
  for (const auto& instance : instances) {
    if (instance.id == id) return &instance;
  }
  return nullptr;
}

Corpus MakeCorpus(std::vector<EvalInstance> instances) {
  std::set<std::string> seen;
  for (const auto& instance : instances) {
    if (instance.id.empty()) {
      throw Error(ErrorCode::kValidation, "instance id must be nonempty");
    }
    if (!seen.insert(instance.id).second) {
      throw Error(ErrorCode::kValidation,
                  "duplicate instance id '" + instance.id + "'");
    }
    if (instance.candidates.empty() || instance.references.empty()) {
      throw Error(ErrorCode::kValidation,
                  "instance '" + instance.id +
                      "' needs at least one candidate and one reference");
    }
  }
  return Corpus{std::move(instances)};
}

int NgramMultiset::Total() const {
  int total = 0;
  for (const auto& [gram, count] : counts) total += count;
  return total;
}

NgramMultiset Ngrams(std::span<const std::string> tokens, std::size_t k) {
  if (k == 0) {
    throw Error(ErrorCode::kInvalidArgument, "n-gram order must be >= 1");
  }
  NgramMultiset out;
  out.order = k;
  if (tokens.size() < k) return out;
  for (std::size_t i = 0; i + k <= tokens.size(); ++i) {
    ++out.counts[Tokens(tokens.begin() + i, tokens.begin() + i + k)];
  }
  return out;
}

}  // namespace trmeval
