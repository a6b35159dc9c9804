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

// Texts, evaluation instances and the tokenizer shared by every metric.

#ifndef TRMEVAL_CORE_H_
#define TRMEVAL_CORE_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trmeval {

using Tokens = std::vector<std::string>;

// Splits UTF-8 text into lowercase word tokens.
//
// Characters are lowercased with Unicode simple case mapping. Anything that
// is not a letter, digit or apostrophe becomes a separator. An apostrophe
// survives only when both neighbours are letters or digits, so "don't" stays
// one token while "'quoted'" loses its quotes. Invalid UTF-8 sequences are
// treated as separators.
Tokens Tokenize(std::string_view raw);

// A text together with its tokenization. Immutable once built.
class Utterance {
 public:
  Utterance() = default;
  explicit Utterance(std::string raw);

  const std::string& raw() const { return raw_; }
  const Tokens& tokens() const { return tokens_; }

  friend bool operator==(const Utterance& a, const Utterance& b) {
    return a.raw_ == b.raw_;
  }

 private:
  std::string raw_;
  Tokens tokens_;
};

std::vector<Utterance> MakeUtterances(std::span<const std::string> raws);

// One conditioning context: the candidate set under evaluation and the
// reference set it is compared against.
struct EvalInstance {
  std::string id;
  std::vector<Utterance> candidates;
  std::vector<Utterance> references;

  std::size_t n() const { return candidates.size(); }
  std::size_t m() const { return references.size(); }
};

// Instances in file order. Construct through MakeCorpus to get the id and
// non-emptiness checks.
struct Corpus {
  std::vector<EvalInstance> instances;

  const EvalInstance* Find(std::string_view id) const;
};

// Throws kValidation on an empty id, duplicate id, or empty candidate or
// reference list.
Corpus MakeCorpus(std::vector<EvalInstance> instances);

// Multiset of contiguous k-token windows.
struct NgramMultiset {
  std::size_t order = 1;
  std::map<Tokens, int> counts;

  int Total() const;
};

// Throws kInvalidArgument when k is 0.
NgramMultiset Ngrams(std::span<const std::string> tokens, std::size_t k);

}  // namespace trmeval

#endif  // TRMEVAL_CORE_H_
