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


// Seeded synthetic corpora shared by the unit tests and the acceptance
// runner.

#ifndef TRMEVAL_TESTS_FIXTURES_H_
#define TRMEVAL_TESTS_FIXTURES_H_

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "test_util.h"
#include "trmeval/core.h"
#include "trmeval/embedding.h"

namespace trmeval::testing {

inline const std::vector<std::string>& VocabularyA() {
  static const std::vector<std::string> words = {
      "man",   "woman", "child", "dog",    "runs",  "walks", "sits",
      "park",  "street", "beach", "red",   "blue",  "ball",  "bike",
      "near",  "with",  "under", "tree",   "house", "car"};
  return words;
}

// `count` distinct sentences of 4 to 7 words from vocabulary A.
inline std::vector<std::string> DistinctSentences(std::mt19937_64& rng,
                                                  std::size_t count) {
  const auto& words = VocabularyA();
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::uniform_int_distribution<int> length(4, 7);
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (out.size() < count) {
    std::string s = "a";
    const int len = length(rng);
    for (int i = 0; i < len; ++i) s += " " + words[pick(rng)];
    if (seen.insert(s).second) out.push_back(s);
  }
  return out;
}

// References are 10 distinct vocabulary-A sentences; the candidates are one
// off-vocabulary mode string repeated `candidates` times.
inline Corpus SeparatedCorpus(std::uint64_t seed, std::size_t instances,
                              std::size_t candidates) {
  std::mt19937_64 rng(seed);
  std::vector<EvalInstance> out;
  for (std::size_t i = 0; i < instances; ++i) {
    const std::vector<std::string> refs = DistinctSentences(rng, 10);
    const std::vector<std::string> cands(candidates,
                                         "purple elephants juggle seven oranges");
    out.push_back(MakeInstance("sep" + std::to_string(i), cands, refs));
  }
  return MakeCorpus(std::move(out));
}

// Candidates and references are a random split of one sentence pool.
inline Corpus NullCorpus(std::uint64_t seed, std::size_t instances,
                         std::size_t candidates, std::size_t references) {
  std::mt19937_64 rng(seed);
  std::vector<EvalInstance> out;
  for (std::size_t i = 0; i < instances; ++i) {
    std::vector<std::string> pool =
        DistinctSentences(rng, candidates + references);
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::vector<std::string> cands(pool.begin(),
                                         pool.begin() + static_cast<long>(candidates));
    const std::vector<std::string> refs(pool.begin() + static_cast<long>(candidates),
                                        pool.end());
    out.push_back(MakeInstance("null" + std::to_string(i), cands, refs));
  }
  return MakeCorpus(std::move(out));
}

// Ten human-style captions of one scene, and ten more correct paraphrases.
inline const std::vector<std::string>& SceneReferences() {
  static const std::vector<std::string> refs = {
      "a man is riding a horse on the beach",
      "a person rides a brown horse along the shore",
      "a man on horseback near the ocean",
      "someone is riding a horse by the sea",
      "a rider and his horse walk on the sand",
      "a man rides a horse at sunset",
      "a horse carries a man across the beach",
      "a cowboy riding along the water",
      "a man is horseback riding on a sandy beach",
      "a person on a horse beside the waves"};
  return refs;
}

inline const std::vector<std::string>& SceneParaphrases() {
  static const std::vector<std::string> cands = {
      "a man is riding a horse near the water",
      "a person rides a horse on the sand",
      "a man on a horse at the beach",
      "someone rides a horse along the beach",
      "a rider on a horse by the ocean",
      "a man riding his horse on the shore",
      "a horse and a rider on the beach",
      "a man is riding a brown horse",
      "a person is horseback riding by the sea",
      "a man rides along the beach on a horse"};
  return cands;
}

// Unit vectors for every text of `corpus`: candidates around one direction
// and references around another, `shift` apart along the first axis.
inline EmbeddingTable SyntheticEmbeddings(const Corpus& corpus, int dim,
                                          std::uint64_t seed,
                                          double shift = 0.0) {
  EmbeddingTable table(EmbeddingHeader{1, dim, "synthetic-gaussian", "none"});
  std::mt19937_64 rng(seed);
  for (const auto& instance : corpus.instances) {
    for (const auto* group : {&instance.candidates, &instance.references}) {
      const double offset = group == &instance.candidates ? shift : 0.0;
      for (const auto& u : *group) {
        const std::string key = TextKey(u.raw());
        if (table.FindKey(key)) continue;
        table.Insert(key, RandomUnitVector(rng, dim, offset));
      }
    }
  }
  return table;
}

// `instances` instances of n candidates and m references, every text unique.
inline Corpus UniqueTextCorpus(std::uint64_t seed, std::size_t instances,
                               std::size_t n, std::size_t m) {
  std::mt19937_64 rng(seed);
  std::vector<EvalInstance> out;
  for (std::size_t i = 0; i < instances; ++i) {
    std::vector<std::string> pool = DistinctSentences(rng, n + m);
    for (auto& s : pool) s += " " + std::to_string(i);
    const std::vector<std::string> cands(pool.begin(),
                                         pool.begin() + static_cast<long>(n));
    const std::vector<std::string> refs(pool.begin() + static_cast<long>(n),
                                        pool.end());
    out.push_back(MakeInstance("u" + std::to_string(i), cands, refs));
  }
  return MakeCorpus(std::move(out));
}

}  // namespace trmeval::testing

#endif  // TRMEVAL_TESTS_FIXTURES_H_
