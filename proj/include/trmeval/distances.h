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

// Pairwise text scores, their conversion to distances, and the joint
// candidate+reference distance matrix consumed by the rank statistic.
//
// All scores short-circuit to their maximum when the two raw strings are
// byte-identical, so every derived distance satisfies d(x, x) == 0.

#ifndef TRMEVAL_DISTANCES_H_
#define TRMEVAL_DISTANCES_H_

#include <Eigen/Dense>
#include <algorithm>

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "trmeval/core.h"
#include "trmeval/embedding.h"

namespace trmeval {

enum class MetricKind {
  kBleu,
  kRougeL,
  kMeteorLite,
  kCiderD,
  kEmbeddingCosine,
};

std::string_view MetricKindName(MetricKind kind);
std::optional<MetricKind> ParseMetricKind(std::string_view name);

// Document frequencies over the reference sets of a corpus, one document per
// instance. idf(g) = ln(document_count / df(g)).
// Hash and equality over n-grams that also accept string views, so lookups
// need not copy tokens.
struct TokensHash {
  using is_transparent = void;
  std::size_t operator()(const Tokens& gram) const;
  std::size_t operator()(std::span<const std::string_view> gram) const;
};

struct TokensEqual {
  using is_transparent = void;
  bool operator()(const Tokens& a, const Tokens& b) const { return a == b; }
  bool operator()(std::span<const std::string_view> a, const Tokens& b) const {
    return std::equal(a.begin(), a.end(), b.begin(), b.end());
  }
  bool operator()(const Tokens& a, std::span<const std::string_view> b) const {
    return (*this)(b, a);
  }
};

class IdfIndex;

struct IdfTable {
  std::size_t document_count = 0;
  // index = order - 1
  std::vector<std::unordered_map<Tokens, double, TokensHash, TokensEqual>>
      by_order;
  // Token-id view of by_order used for fast lookups; BuildIdf sets it.
  // Call BuildIndex() again after editing by_order by hand.
  std::shared_ptr<const IdfIndex> index;

  int max_n() const { return static_cast<int>(by_order.size()); }
  // Unseen n-grams get ln(document_count).
  double Lookup(const Tokens& gram) const;
  double Lookup(std::span<const std::string_view> gram) const;
  double UnseenWeight() const;
  void BuildIndex();
};

struct MetricSpec {
  MetricKind kind = MetricKind::kMeteorLite;
  int max_n = 4;                 // bleu, cider_d
  double smoothing_eps = 1e-9;   // bleu
  double beta = 1.2;             // rouge_l
  double sigma_len = 6.0;        // cider_d
  std::shared_ptr<const IdfTable> idf;  // cider_d

  // Throws kInvalidArgument when a parameter is out of range or cider_d has
  // no idf table.
  void Validate() const;
};

// Sentence BLEU: clipped n-gram precisions for orders 1..min(max_n, |c|),
// zero match counts floored at `smoothing_eps`, geometric mean, brevity
// penalty against the closest reference length (shorter wins ties).
double BleuScore(const Utterance& candidate,
                 std::span<const Utterance> references, int max_n = 4,
                 double smoothing_eps = 1e-9);

// LCS F-measure (1+b^2)PR / (R + b^2 P).
double RougeLScore(const Utterance& candidate, const Utterance& reference,
                   double beta = 1.2);

// Exact-then-stem unigram alignment with the usual fragmentation penalty
// (alpha 0.9, beta 3, gamma 0.5). No synonym stage.
double MeteorLiteScore(const Utterance& candidate, const Utterance& reference);

IdfTable BuildIdf(const Corpus& corpus, int max_n = 4);

// CIDEr-D in [0, 10]: clipped tf-idf cosine per order with a Gaussian length
// penalty, averaged over orders and references, times 10. An order whose
// tf-idf vector is zero on either side contributes 0.
double CiderDScore(const Utterance& candidate,
                   std::span<const Utterance> references, const IdfTable& idf,
                   int max_n = 4, double sigma_len = 6.0);

// 1 - <a, b> clamped to [0, 2]. Both inputs must be unit vectors of equal
// dimension.
double EmbeddingCosineDistance(const Eigen::VectorXd& a,
                               const Eigen::VectorXd& b);

// Largest attainable score: 10 for cider_d, 1 otherwise. For
// embedding_cosine the "score" is cosine similarity.
double MaxScore(MetricKind kind);

// bleu/rouge_l/meteor_lite: 1 - s; cider_d: 10 - s; embedding_cosine: the
// value is already a distance and passes through.
double ScoreToDistance(MetricKind kind, double score);

// Score of `a` against the single reference `b`. For embedding_cosine this
// returns cosine similarity, so MaxScore - PairScore is the distance.
double PairScore(const Utterance& a, const Utterance& b,
                 const MetricSpec& spec,
                 const EmbeddingTable* embeddings = nullptr);

// Row-major (n+m)x(n+m) table over candidates followed by references.
// Entry (i, j) is the distance of label i scored against label j.
class DistanceMatrix {
 public:
  DistanceMatrix(std::vector<std::string> labels, std::size_t n,
                 std::size_t m, std::vector<double> values);

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  std::size_t size() const { return n_ + m_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<double>& values() const { return values_; }

  double operator()(std::size_t i, std::size_t j) const {
    return values_[i * size() + j];
  }

 private:
  std::vector<std::string> labels_;
  std::size_t n_;
  std::size_t m_;
  std::vector<double> values_;
};

// Computes every ordered pair once. `embeddings` is required for
// embedding_cosine and ignored otherwise.
DistanceMatrix PairwiseMatrix(const EvalInstance& instance,
                              const MetricSpec& spec,
                              const EmbeddingTable* embeddings = nullptr);

}  // namespace trmeval

#endif  // TRMEVAL_DISTANCES_H_
