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

#include "trmeval/distances.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "trmeval/error.h"
#include "trmeval/porter_stemmer.h"

namespace trmeval {
namespace {

constexpr double kMeteorAlpha = 0.9;
constexpr double kMeteorBeta = 3.0;
constexpr double kMeteorGamma = 0.5;
constexpr double kRangeSlack = 1e-9;

std::vector<std::string> Stems(const Tokens& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(PorterStem(t));
  return out;
}

// Fragmentation-penalized F-mean of an alignment; align[i] is the matched
// reference position of candidate token i, or -1.
double MeteorFromAlignment(const std::size_t* align, std::size_t cand_size,
                           std::size_t ref_size) {
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  int matches = 0;
  int chunks = 0;
  std::size_t prev_c = kNone;
  std::size_t prev_r = kNone;
  for (std::size_t i = 0; i < cand_size; ++i) {
    if (align[i] == kNone) continue;
    ++matches;
    if (prev_c == kNone || i != prev_c + 1 || align[i] != prev_r + 1) ++chunks;
    prev_c = i;
    prev_r = align[i];
  }
  if (matches == 0) return 0.0;

  const double precision = static_cast<double>(matches) / cand_size;
  const double recall = static_cast<double>(matches) / ref_size;
  const double fmean = precision * recall /
                       (kMeteorAlpha * precision + (1.0 - kMeteorAlpha) * recall);
  const double penalty =
      kMeteorGamma *
      std::pow(static_cast<double>(chunks) / matches, kMeteorBeta);
  return fmean * (1.0 - penalty);
}

// T is std::string, or an interned id when many pairs share the same texts.
template <typename T>
double MeteorAligned(const std::vector<T>& cand, const std::vector<T>& cstem,
                     const std::vector<T>& ref, const std::vector<T>& rstem) {
  if (cand.empty() || ref.empty()) return 0.0;
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  // Scratch reused across calls; pairwise matrices call this n^2 times.
  thread_local std::vector<std::size_t> align;
  thread_local std::vector<char> used;
  align.assign(cand.size(), kNone);
  used.assign(ref.size(), 0);

  auto stage = [&](const std::vector<T>& a, const std::vector<T>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (align[i] != kNone) continue;
      for (std::size_t j = 0; j < b.size(); ++j) {
        if (!used[j] && a[i] == b[j]) {
          align[i] = j;
          used[j] = 1;
          break;
        }
      }
    }
  };
  stage(cand, ref);
  stage(cstem, rstem);

  return MeteorFromAlignment(align.data(), cand.size(), ref.size());
}

// Same greedy leftmost alignment over interned ids, with each reference
// given as bitmasks of its positions per word id and per stem id. Needs
// references of at most 64 tokens.
double MeteorMasked(const std::vector<int>& cand, const std::vector<int>& cstem,
                    const std::vector<std::uint64_t>& rword,
                    const std::vector<std::uint64_t>& rstem, std::size_t ref_size) {
  if (cand.empty() || ref_size == 0) return 0.0;
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  thread_local std::vector<std::size_t> align;
  align.assign(cand.size(), kNone);
  std::uint64_t used = 0;
  auto stage = [&](const std::vector<int>& ids,
                   const std::vector<std::uint64_t>& masks) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (align[i] != kNone) continue;
      const std::uint64_t free = masks[ids[i]] & ~used;
      if (free == 0) continue;
      align[i] = static_cast<std::size_t>(std::countr_zero(free));
      used |= free & (~free + 1);
    }
  };
  stage(cand, rword);
  stage(cstem, rstem);
  return MeteorFromAlignment(align.data(), cand.size(), ref_size);
}

std::size_t HashIds(const int* ids, std::size_t len) {
  std::uint64_t h = len;
  for (std::size_t i = 0; i < len; ++i) {
    h = (h ^ static_cast<std::uint32_t>(ids[i])) * 0x9e3779b97f4a7c15ULL;
    h ^= h >> 29;
  }
  return static_cast<std::size_t>(h);
}

std::size_t TableSize(std::size_t entries) {
  return std::bit_ceil(std::max<std::size_t>(16, 2 * entries));
}

// Open-addressing map from int sequences of one length, stored by offset
// into a caller-owned pool, to dense ids in insertion order.
struct ViewHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const {
    return std::hash<std::string_view>{}(s);
  }
};

// Dense ids for strings in order of first occurrence. The viewed strings
// must outlive the table, which holds at most `capacity` distinct strings.
class ViewIds {
 public:
  explicit ViewIds(std::size_t capacity) : slots_(TableSize(capacity), -1) {}

  int Intern(std::string_view v) {
    const std::size_t mask = slots_.size() - 1;
    std::size_t h = ViewHash{}(v) & mask;
    while (slots_[h] >= 0 && views_[slots_[h]] != v) h = (h + 1) & mask;
    if (slots_[h] < 0) {
      slots_[h] = static_cast<int>(views_.size());
      views_.push_back(v);
    }
    return slots_[h];
  }

  std::size_t size() const { return views_.size(); }
  const std::vector<std::string_view>& views() const { return views_; }

 private:
  std::vector<int> slots_;
  std::vector<std::string_view> views_;
};

// Porter stems memoized per thread; the cache restarts once it is full.
std::string CachedStem(std::string_view word) {
  constexpr std::size_t kLimit = 1 << 16;
  thread_local std::unordered_map<std::string, std::string, ViewHash,
                                  std::equal_to<>>
      cache;
  auto it = cache.find(word);
  if (it != cache.end()) return it->second;
  if (cache.size() >= kLimit) cache.clear();
  return cache.emplace(std::string(word), PorterStem(word)).first->second;
}

class SequenceIds {
 public:
  SequenceIds(const int* pool, std::size_t len, std::size_t capacity)
      : pool_(pool), len_(len), slots_(TableSize(capacity), -1) {}

  // Id of the sequence at pool offset `at`, inserting it when new.
  int Intern(std::size_t at) {
    const std::size_t mask = slots_.size() - 1;
    for (std::size_t h = HashIds(pool_ + at, len_) & mask;; h = (h + 1) & mask) {
      if (slots_[h] < 0) {
        slots_[h] = static_cast<int>(first_.size());
        first_.push_back(at);
        return slots_[h];
      }
      const std::size_t other = first_[slots_[h]];
      if (std::equal(pool_ + at, pool_ + at + len_, pool_ + other)) return slots_[h];
    }
  }

  std::size_t size() const { return first_.size(); }
  std::size_t first(int id) const { return first_[id]; }

 private:
  const int* pool_;
  std::size_t len_;
  std::vector<int> slots_;
  std::vector<std::size_t> first_;
};

}  // namespace

// Reference vocabulary as dense ids and, per order, an open-addressing table
// from id sequences to idf weights. Same weights as the string maps.
class IdfIndex {
 public:
  explicit IdfIndex(const IdfTable& table) : unseen_(table.UnseenWeight()) {
    for (const auto& order : table.by_order) {
      for (const auto& [gram, weight] : order) {
        for (const auto& t : gram) {
          tokens_.emplace(t, static_cast<int>(tokens_.size()));
        }
      }
    }
    for (std::size_t k = 0; k < table.by_order.size(); ++k) {
      Order& o = orders_.emplace_back();
      o.len = k + 1;
      o.slots.assign(TableSize(table.by_order[k].size()), -1);
      for (const auto& [gram, weight] : table.by_order[k]) {
        const std::size_t at = o.keys.size();
        for (const auto& t : gram) o.keys.push_back(tokens_.find(t)->second);
        const std::size_t mask = o.slots.size() - 1;
        std::size_t h = HashIds(o.keys.data() + at, o.len) & mask;
        while (o.slots[h] >= 0) h = (h + 1) & mask;
        o.slots[h] = static_cast<int>(o.weights.size());
        o.weights.push_back(weight);
      }
    }
  }

  // -1 when the token is in no reference n-gram.
  int TokenId(std::string_view token) const {
    auto it = tokens_.find(token);
    return it == tokens_.end() ? -1 : it->second;
  }

  // Weight of the n-gram with these token ids, all of them >= 0.
  double Weight(const int* ids, std::size_t len) const {
    if (len == 0 || len > orders_.size()) return unseen_;
    const Order& o = orders_[len - 1];
    const std::size_t mask = o.slots.size() - 1;
    for (std::size_t h = HashIds(ids, len) & mask;; h = (h + 1) & mask) {
      const int e = o.slots[h];
      if (e < 0) return unseen_;
      if (std::equal(ids, ids + len, o.keys.data() + e * len)) return o.weights[e];
    }
  }

 private:
  struct Order {
    std::size_t len = 0;
    std::vector<int> keys;  // len ids per entry
    std::vector<double> weights;
    std::vector<int> slots;
  };

  double unseen_;
  std::unordered_map<std::string, int, ViewHash, std::equal_to<>> tokens_;
  std::vector<Order> orders_;
};

namespace {

// Per-order tf-idf vectors of several texts. A text's entries keep the
// order in which its n-grams first occur, so every sum over one text runs in
// an order fixed by that text alone. Weights are also kept as dense rows
// over the n-grams of all texts for pairwise dot products.
class TfIdfSet {
 public:
  TfIdfSet(std::span<const Tokens* const> texts, const IdfTable& idf, int max_n);

  // Mean over orders of the clipped, length-penalized cosine of texts c and
  // r. Not yet x10.
  double CiderPair(std::size_t c, std::size_t r, double sigma_len) const;

 private:
  struct Order {
    std::size_t grams = 0;
    std::vector<double> dense;  // texts x grams
    std::vector<std::pair<int, double>> entries;
    std::vector<std::size_t> begin;  // per text, into entries; plus end
    std::vector<double> norm;        // per text
  };

  std::vector<std::size_t> length_;
  std::vector<Order> orders_;
};

TfIdfSet::TfIdfSet(std::span<const Tokens* const> texts, const IdfTable& idf,
                   int max_n) {
  const std::size_t count = texts.size();
  std::vector<std::size_t> offset(count + 1, 0);
  for (std::size_t t = 0; t < count; ++t) {
    offset[t + 1] = offset[t] + texts[t]->size();
    length_.push_back(texts[t]->size());
  }

  // Instance-local token ids in order of first occurrence.
  ViewIds token_ids(offset.back());
  std::vector<int> seq;
  seq.reserve(offset.back());
  for (const Tokens* t : texts) {
    for (const auto& tok : *t) seq.push_back(token_ids.Intern(tok));
  }
  const std::vector<std::string_view>& vocab = token_ids.views();
  const IdfIndex* index = idf.index.get();
  std::vector<int> global;
  if (index != nullptr) {
    global.reserve(vocab.size());
    for (std::string_view v : vocab) global.push_back(index->TokenId(v));
  }

  std::vector<int> ids;
  std::vector<std::string_view> gram;
  std::vector<double> weight;
  std::vector<int> gid_at(seq.size(), -1);
  for (int k = 1; k <= max_n; ++k) {
    const std::size_t len = static_cast<std::size_t>(k);
    SequenceIds grams(seq.data(), len, seq.size());
    for (std::size_t t = 0; t < count; ++t) {
      for (std::size_t i = offset[t]; i + len <= offset[t + 1]; ++i) {
        gid_at[i] = grams.Intern(i);
      }
    }
    weight.resize(grams.size());
    for (std::size_t g = 0; g < grams.size(); ++g) {
      const int* at = seq.data() + grams.first(static_cast<int>(g));
      if (index != nullptr) {
        ids.resize(len);
        bool known = true;
        for (std::size_t j = 0; j < len; ++j) {
          ids[j] = global[at[j]];
          known = known && ids[j] >= 0;
        }
        weight[g] = known ? index->Weight(ids.data(), len) : idf.UnseenWeight();
      } else {
        gram.resize(len);
        for (std::size_t j = 0; j < len; ++j) gram[j] = vocab[at[j]];
        weight[g] = idf.Lookup(gram);
      }
    }

    Order& o = orders_.emplace_back();
    o.grams = grams.size();
    o.dense.assign(count * o.grams, 0.0);
    o.begin.reserve(count + 1);
    o.norm.assign(count, 0.0);
    for (std::size_t t = 0; t < count; ++t) {
      double* row = o.dense.data() + t * o.grams;
      o.begin.push_back(o.entries.size());
      for (std::size_t i = offset[t]; i + len <= offset[t + 1]; ++i) {
        if (row[gid_at[i]] == 0.0) o.entries.emplace_back(gid_at[i], 0.0);
        row[gid_at[i]] += 1.0;
      }
      double sq = 0.0;
      for (std::size_t e = o.begin.back(); e < o.entries.size(); ++e) {
        auto& [g, w] = o.entries[e];
        w = row[g] * weight[g];
        row[g] = w;
        sq += w * w;
      }
      o.norm[t] = std::sqrt(sq);
    }
    o.begin.push_back(o.entries.size());
  }
}

double TfIdfSet::CiderPair(std::size_t c, std::size_t r, double sigma_len) const {
  const double delta =
      static_cast<double>(length_[c]) - static_cast<double>(length_[r]);
  const double length_penalty =
      std::exp(-(delta * delta) / (2.0 * sigma_len * sigma_len));
  double total = 0.0;
  for (const Order& o : orders_) {
    if (o.norm[c] == 0.0 || o.norm[r] == 0.0) continue;
    const double* row = o.dense.data() + r * o.grams;
    double dot = 0.0;
    for (std::size_t e = o.begin[c]; e < o.begin[c + 1]; ++e) {
      const auto [g, wc] = o.entries[e];
      dot += std::min(wc, row[g]) * row[g];
    }
    total += dot / (o.norm[c] * o.norm[r]) * length_penalty;
  }
  return total / static_cast<double>(orders_.size());
}

double ClampToRange(double score, double lo, double hi, MetricKind kind) {
  if (!(score >= lo - kRangeSlack && score <= hi + kRangeSlack)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(MetricKindName(kind)) + " score " +
                    std::to_string(score) + " outside [" +
                    std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return std::clamp(score, lo, hi);
}

void CheckUnit(const Eigen::VectorXd& v) {
  if (std::abs(v.norm() - 1.0) > kUnitNormTolerance) {
    throw Error(ErrorCode::kInvalidArgument,
                "cosine distance needs unit vectors; got norm " +
                    std::to_string(v.norm()));
  }
}

}  // namespace

std::string_view MetricKindName(MetricKind kind) {
  switch (kind) {
    case MetricKind::kBleu:
      return "bleu";
    case MetricKind::kRougeL:
      return "rouge_l";
    case MetricKind::kMeteorLite:
      return "meteor_lite";
    case MetricKind::kCiderD:
      return "cider_d";
    case MetricKind::kEmbeddingCosine:
      return "embedding_cosine";
  }
  return "unknown";
}

std::optional<MetricKind> ParseMetricKind(std::string_view name) {
  for (auto kind : {MetricKind::kBleu, MetricKind::kRougeL,
                    MetricKind::kMeteorLite, MetricKind::kCiderD,
                    MetricKind::kEmbeddingCosine}) {
    if (MetricKindName(kind) == name) return kind;
  }
  return std::nullopt;
}

namespace {

template <typename Gram>
std::size_t HashGram(const Gram& gram) {
  std::size_t h = gram.size();
  for (std::string_view t : gram) {
    h ^= std::hash<std::string_view>{}(t) + 0x9e3779b97f4a7c15ULL + (h << 6) +
         (h >> 2);
  }
  return h;
}

template <typename Table, typename Gram>
double LookupIn(const Table& by_order, std::size_t document_count,
                const Gram& gram) {
  if (!gram.empty() && gram.size() <= by_order.size()) {
    const auto& table = by_order[gram.size() - 1];
    auto it = table.find(gram);
    if (it != table.end()) return it->second;
  }
  return std::log(static_cast<double>(document_count));
}

}  // namespace

std::size_t TokensHash::operator()(const Tokens& gram) const {
  return HashGram(gram);
}

std::size_t TokensHash::operator()(std::span<const std::string_view> gram) const {
  return HashGram(gram);
}

double IdfTable::Lookup(const Tokens& gram) const {
  return LookupIn(by_order, document_count, gram);
}

double IdfTable::Lookup(std::span<const std::string_view> gram) const {
  return LookupIn(by_order, document_count, gram);
}

double IdfTable::UnseenWeight() const {
  return std::log(static_cast<double>(document_count));
}

void IdfTable::BuildIndex() { index = std::make_shared<const IdfIndex>(*this); }

void MetricSpec::Validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, what);
  };
  if (max_n < 1 || max_n > 16) fail("max_n must be in [1, 16]");
  if (!(smoothing_eps > 0.0 && smoothing_eps < 1.0)) {
    fail("bleu smoothing epsilon must be in (0, 1)");
  }
  if (!(beta > 0.0 && std::isfinite(beta))) fail("rouge_l beta must be > 0");
  if (!(sigma_len > 0.0 && std::isfinite(sigma_len))) {
    fail("cider_d sigma_len must be > 0");
  }
  if (kind == MetricKind::kCiderD) {
    if (!idf) fail("cider_d requires an idf table");
    if (idf->max_n() < max_n) fail("idf table built for fewer orders than max_n");
  }
}

double BleuScore(const Utterance& candidate,
                 std::span<const Utterance> references, int max_n,
                 double smoothing_eps) {
  if (references.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "bleu needs at least one reference");
  }
  if (max_n < 1) throw Error(ErrorCode::kInvalidArgument, "max_n must be >= 1");
  for (const auto& r : references) {
    if (r.raw() == candidate.raw()) return 1.0;
  }
  const Tokens& cand = candidate.tokens();
  if (cand.empty()) return 0.0;

  const std::size_t orders =
      std::min(static_cast<std::size_t>(max_n), cand.size());
  double log_sum = 0.0;
  for (std::size_t k = 1; k <= orders; ++k) {
    const NgramMultiset c = Ngrams(cand, k);
    std::map<Tokens, int> best;
    for (const auto& r : references) {
      for (const auto& [gram, count] : Ngrams(r.tokens(), k).counts) {
        int& slot = best[gram];
        slot = std::max(slot, count);
      }
    }
    int matched = 0;
    for (const auto& [gram, count] : c.counts) {
      auto it = best.find(gram);
      if (it != best.end()) matched += std::min(count, it->second);
    }
    const double numerator =
        matched > 0 ? static_cast<double>(matched) : smoothing_eps;
    log_sum += std::log(numerator / c.Total());
  }

  std::size_t closest = references.front().tokens().size();
  for (const auto& r : references) {
    const std::size_t len = r.tokens().size();
    const auto diff = [&](std::size_t l) {
      return l > cand.size() ? l - cand.size() : cand.size() - l;
    };
    if (diff(len) < diff(closest) || (diff(len) == diff(closest) && len < closest)) {
      closest = len;
    }
  }
  const double brevity =
      cand.size() > closest
          ? 1.0
          : std::exp(1.0 - static_cast<double>(closest) / cand.size());
  return std::clamp(brevity * std::exp(log_sum / orders), 0.0, 1.0);
}

double RougeLScore(const Utterance& candidate, const Utterance& reference,
                   double beta) {
  if (candidate.raw() == reference.raw()) return 1.0;
  const Tokens& c = candidate.tokens();
  const Tokens& r = reference.tokens();
  if (c.empty() || r.empty()) return 0.0;
  std::vector<int> prev(r.size() + 1, 0);
  std::vector<int> cur(r.size() + 1, 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      cur[j + 1] = c[i] == r[j] ? prev[j] + 1 : std::max(prev[j + 1], cur[j]);
    }
    std::swap(prev, cur);
  }
  const int lcs = prev[r.size()];
  if (lcs == 0) return 0.0;
  const double precision = static_cast<double>(lcs) / c.size();
  const double recall = static_cast<double>(lcs) / r.size();
  const double b2 = beta * beta;
  return (1.0 + b2) * precision * recall / (recall + b2 * precision);
}

double MeteorLiteScore(const Utterance& candidate, const Utterance& reference) {
  if (candidate.raw() == reference.raw()) return 1.0;
  return MeteorAligned(candidate.tokens(), Stems(candidate.tokens()),
                       reference.tokens(), Stems(reference.tokens()));
}

IdfTable BuildIdf(const Corpus& corpus, int max_n) {
  if (corpus.instances.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot build idf from an empty corpus");
  }
  if (max_n < 1) throw Error(ErrorCode::kInvalidArgument, "max_n must be >= 1");
  IdfTable table;
  table.document_count = corpus.instances.size();
  std::vector<std::map<Tokens, int>> df(max_n);
  for (const auto& instance : corpus.instances) {
    for (int k = 1; k <= max_n; ++k) {
      std::set<Tokens> seen;
      for (const auto& r : instance.references) {
        for (auto& [gram, count] :
             Ngrams(r.tokens(), static_cast<std::size_t>(k)).counts) {
          seen.insert(gram);
        }
      }
      for (const auto& gram : seen) ++df[k - 1][gram];
    }
  }
  table.by_order.resize(max_n);
  const double docs = static_cast<double>(table.document_count);
  for (int k = 0; k < max_n; ++k) {
    for (const auto& [gram, count] : df[k]) {
      table.by_order[k].emplace(gram, std::log(docs / count));
    }
  }
  table.BuildIndex();
  return table;
}

double CiderDScore(const Utterance& candidate,
                   std::span<const Utterance> references, const IdfTable& idf,
                   int max_n, double sigma_len) {
  if (references.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cider_d needs at least one reference");
  }
  if (max_n < 1) throw Error(ErrorCode::kInvalidArgument, "max_n must be >= 1");
  for (const auto& r : references) {
    if (r.raw() == candidate.raw()) return 10.0;
  }
  std::vector<const Tokens*> texts = {&candidate.tokens()};
  for (const auto& r : references) texts.push_back(&r.tokens());
  const TfIdfSet vecs(texts, idf, max_n);
  double total = 0.0;
  for (std::size_t i = 1; i < texts.size(); ++i) {
    total += vecs.CiderPair(0, i, sigma_len);
  }
  return std::clamp(10.0 * total / references.size(), 0.0, 10.0);
}

double EmbeddingCosineDistance(const Eigen::VectorXd& a,
                               const Eigen::VectorXd& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "embedding dimension mismatch: " + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()));
  }
  CheckUnit(a);
  CheckUnit(b);
  return std::clamp(1.0 - a.dot(b), 0.0, 2.0);
}

double MaxScore(MetricKind kind) {
  return kind == MetricKind::kCiderD ? 10.0 : 1.0;
}

double ScoreToDistance(MetricKind kind, double score) {
  switch (kind) {
    case MetricKind::kBleu:
    case MetricKind::kRougeL:
    case MetricKind::kMeteorLite:
      return 1.0 - ClampToRange(score, 0.0, 1.0, kind);
    case MetricKind::kCiderD:
      return 10.0 - ClampToRange(score, 0.0, 10.0, kind);
    case MetricKind::kEmbeddingCosine:
      return ClampToRange(score, 0.0, 2.0, kind);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown metric kind");
}

double PairScore(const Utterance& a, const Utterance& b,
                 const MetricSpec& spec, const EmbeddingTable* embeddings) {
  switch (spec.kind) {
    case MetricKind::kBleu:
      return BleuScore(a, std::span(&b, 1), spec.max_n, spec.smoothing_eps);
    case MetricKind::kRougeL:
      return RougeLScore(a, b, spec.beta);
    case MetricKind::kMeteorLite:
      return MeteorLiteScore(a, b);
    case MetricKind::kCiderD:
      spec.Validate();
      return CiderDScore(a, std::span(&b, 1), *spec.idf, spec.max_n,
                         spec.sigma_len);
    case MetricKind::kEmbeddingCosine:
      if (embeddings == nullptr) {
        throw Error(ErrorCode::kInvalidArgument,
                    "embedding_cosine requires an embedding table");
      }
      if (a.raw() == b.raw()) return 1.0;
      return 1.0 - EmbeddingCosineDistance(embeddings->Lookup(a.raw()),
                                           embeddings->Lookup(b.raw()));
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown metric kind");
}

DistanceMatrix::DistanceMatrix(std::vector<std::string> labels, std::size_t n,
                               std::size_t m, std::vector<double> values)
    : labels_(std::move(labels)), n_(n), m_(m), values_(std::move(values)) {
  const std::size_t size = n_ + m_;
  if (labels_.size() != size || values_.size() != size * size) {
    throw Error(ErrorCode::kInvalidArgument, "distance matrix shape mismatch");
  }
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      const double v = values_[i * size + j];
      if (!std::isfinite(v) || v < 0.0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "distance matrix entries must be finite and >= 0");
      }
      if (i == j && v != 0.0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "distance matrix diagonal must be exactly 0");
      }
    }
  }
}

DistanceMatrix PairwiseMatrix(const EvalInstance& instance,
                              const MetricSpec& spec,
                              const EmbeddingTable* embeddings) {
  spec.Validate();
  std::vector<const Utterance*> joint;
  joint.reserve(instance.n() + instance.m());
  for (const auto& u : instance.candidates) joint.push_back(&u);
  for (const auto& u : instance.references) joint.push_back(&u);
  const std::size_t size = joint.size();

  std::vector<std::string> labels;
  labels.reserve(size);
  for (const auto* u : joint) labels.push_back(u->raw());

  // Per-text preprocessing shared by all pairs.
  std::vector<std::vector<int>> words;
  std::vector<std::vector<int>> stems;
  bool masked = false;
  std::vector<std::vector<std::uint64_t>> word_masks;
  std::vector<std::vector<std::uint64_t>> stem_masks;
  std::optional<TfIdfSet> tfidf;
  std::vector<const Eigen::VectorXd*> vectors;
  switch (spec.kind) {
    case MetricKind::kMeteorLite: {
      std::size_t total = 0;
      for (const auto* u : joint) total += u->tokens().size();
      ViewIds word_ids(total);
      for (const auto* u : joint) {
        std::vector<int>& w = words.emplace_back();
        w.reserve(u->tokens().size());
        for (const auto& t : u->tokens()) w.push_back(word_ids.Intern(t));
      }
      // Stems live in their own id space; stem each distinct word once.
      std::vector<std::string> stem_text;
      stem_text.reserve(word_ids.size());
      for (std::string_view v : word_ids.views()) {
        stem_text.push_back(CachedStem(v));
      }
      ViewIds stem_ids(stem_text.size());
      std::vector<int> stem_of;
      stem_of.reserve(stem_text.size());
      for (const auto& st : stem_text) stem_of.push_back(stem_ids.Intern(st));
      for (const auto& w : words) {
        std::vector<int>& st = stems.emplace_back();
        st.reserve(w.size());
        for (int id : w) st.push_back(stem_of[id]);
      }
      masked = std::all_of(words.begin(), words.end(),
                           [](const auto& w) { return w.size() <= 64; });
      if (masked) {
        word_masks.assign(size, std::vector<std::uint64_t>(word_ids.size(), 0));
        stem_masks.assign(size, std::vector<std::uint64_t>(stem_ids.size(), 0));
        for (std::size_t t = 0; t < size; ++t) {
          for (std::size_t k = 0; k < words[t].size(); ++k) {
            word_masks[t][words[t][k]] |= std::uint64_t{1} << k;
            stem_masks[t][stems[t][k]] |= std::uint64_t{1} << k;
          }
        }
      }
      break;
    }
    case MetricKind::kCiderD:
      {
        std::vector<const Tokens*> texts;
        for (const auto* u : joint) texts.push_back(&u->tokens());
        tfidf.emplace(texts, *spec.idf, spec.max_n);
      }
      break;
    case MetricKind::kEmbeddingCosine:
      if (embeddings == nullptr) {
        throw Error(ErrorCode::kInvalidArgument,
                    "embedding_cosine requires an embedding table");
      }
      for (const auto* u : joint) vectors.push_back(&embeddings->Lookup(u->raw()));
      break;
    default:
      break;
  }

  // Identical raw texts are at distance zero; compare them by id.
  std::unordered_map<std::string_view, int> raw_ids;
  std::vector<int> raw_id;
  raw_id.reserve(size);
  for (const auto* u : joint) {
    raw_id.push_back(
        raw_ids.emplace(u->raw(), static_cast<int>(raw_ids.size())).first->second);
  }

  std::vector<double> values(size * size, 0.0);
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      if (raw_id[i] == raw_id[j]) continue;
      double d = 0.0;
      switch (spec.kind) {
        case MetricKind::kMeteorLite:
          d = ScoreToDistance(
              spec.kind,
              masked ? MeteorMasked(words[i], stems[i], word_masks[j],
                                    stem_masks[j], words[j].size())
                     : MeteorAligned(words[i], stems[i], words[j], stems[j]));
          break;
        case MetricKind::kCiderD:
          d = ScoreToDistance(
              spec.kind,
              std::clamp(10.0 * tfidf->CiderPair(i, j, spec.sigma_len),
                         0.0, 10.0));
          break;
        case MetricKind::kEmbeddingCosine:
          d = EmbeddingCosineDistance(*vectors[i], *vectors[j]);
          break;
        default:
          d = ScoreToDistance(spec.kind,
                              PairScore(*joint[i], *joint[j], spec, embeddings));
          break;
      }
      values[i * size + j] = d;
    }
  }
  return DistanceMatrix(std::move(labels), instance.n(), instance.m(),
                        std::move(values));
}

}  // namespace trmeval
