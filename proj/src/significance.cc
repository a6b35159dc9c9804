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

#include "trmeval/significance.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>
#include <utility>

#include "trmeval/error.h"
#include "trmeval/kbm.h"

namespace trmeval {
namespace {

constexpr std::uint64_t kExactChunk = 4096;
constexpr std::uint64_t kMonteCarloChunk = 1024;
constexpr double kExtremityTolerance = 1e-12;

bool AsExtreme(double value, double observed, bool larger) {
  const double tol = kExtremityTolerance * std::max(1.0, std::abs(observed));
  return larger ? value >= observed - tol : value <= observed + tol;
}

// Runs fn(chunk) for every chunk in [0, chunks) on up to `threads` workers.
// The first exception thrown by any worker is rethrown.
template <typename Fn>
void ForEachChunk(std::uint64_t chunks, int threads, Fn&& fn) {
  const auto workers = static_cast<std::uint64_t>(std::max(1, threads));
  if (workers == 1 || chunks <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    try {
      for (std::uint64_t c = next++; c < chunks; c = next++) fn(c);
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
      next = chunks;
    }
  };
  std::vector<std::thread> pool;
  const auto count = std::min(workers, chunks);
  pool.reserve(count);
  for (std::uint64_t t = 0; t < count; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// The `rank`-th n-subset of [0, size) in lexicographic order.
std::vector<std::size_t> UnrankCombination(std::uint64_t rank, std::size_t size,
                                           std::size_t n) {
  std::vector<std::size_t> out;
  out.reserve(n);
  std::size_t next = 0;
  for (std::size_t slot = 0; slot < n; ++slot) {
    for (;; ++next) {
      const std::uint64_t with_next = Binomial(size - next - 1, n - slot - 1);
      if (rank < with_next) break;
      rank -= with_next;
    }
    out.push_back(next++);
  }
  return out;
}

// Advances to the next n-subset in lexicographic order; false at the end.
bool NextCombination(std::vector<std::size_t>& c, std::size_t size) {
  const std::size_t n = c.size();
  for (std::size_t i = n; i-- > 0;) {
    if (c[i] < size - n + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < n; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

InstanceSignificance Finish(double observed, std::uint64_t extreme,
                            std::uint64_t evaluations, double p,
                            PValueMode mode) {
  InstanceSignificance out;
  out.observed = observed;
  out.extreme_count = extreme;
  out.evaluations = evaluations;
  out.p = p;
  out.log10_p = std::log10(p);
  out.mode = mode;
  return out;
}

void RequireEmbeddings(const StatisticKind& kind, const EmbeddingTable* e) {
  if (kind.needs_embeddings() && e == nullptr) {
    throw Error(ErrorCode::kInvalidArgument,
                kind.Label() + " requires an embedding table");
  }
}

StatisticKind WithCorpusIdf(const StatisticKind& kind, const Corpus& corpus) {
  StatisticKind out = kind;
  if (out.metric.kind == MetricKind::kCiderD && !out.metric.idf &&
      (out.family == StatisticFamily::kTrm ||
       out.family == StatisticFamily::kMeanAgg)) {
    out.metric.idf =
        std::make_shared<const IdfTable>(BuildIdf(corpus, out.metric.max_n));
  }
  return out;
}

}  // namespace

std::string_view StatisticFamilyName(StatisticFamily family) {
  switch (family) {
    case StatisticFamily::kTrm:
      return "trm";
    case StatisticFamily::kMeanAgg:
      return "mean_agg";
    case StatisticFamily::kFrechet:
      return "frechet";
    case StatisticFamily::kMmd:
      return "mmd";
  }
  return "unknown";
}

std::optional<StatisticFamily> ParseStatisticFamily(std::string_view name) {
  for (auto f : {StatisticFamily::kTrm, StatisticFamily::kMeanAgg,
                 StatisticFamily::kFrechet, StatisticFamily::kMmd}) {
    if (StatisticFamilyName(f) == name) return f;
  }
  return std::nullopt;
}

bool StatisticKind::needs_embeddings() const {
  if (family == StatisticFamily::kFrechet || family == StatisticFamily::kMmd) {
    return true;
  }
  return metric.kind == MetricKind::kEmbeddingCosine;
}

std::string StatisticKind::Label() const {
  std::string out(StatisticFamilyName(family));
  if (family == StatisticFamily::kTrm || family == StatisticFamily::kMeanAgg) {
    out += "(" + std::string(MetricKindName(metric.kind)) + ")";
  }
  return out;
}

double MeanAggregateScore(const EvalInstance& instance, const MetricSpec& spec,
                          const EmbeddingTable* embeddings) {
  spec.Validate();
  if (instance.candidates.empty() || instance.references.empty()) {
    throw Error(ErrorCode::kInsufficientSamples,
                "instance '" + instance.id + "' has an empty side");
  }
  double total = 0.0;
  for (const auto& c : instance.candidates) {
    switch (spec.kind) {
      case MetricKind::kBleu:
        total += BleuScore(c, instance.references, spec.max_n, spec.smoothing_eps);
        break;
      case MetricKind::kCiderD:
        total += CiderDScore(c, instance.references, *spec.idf, spec.max_n,
                             spec.sigma_len);
        break;
      default: {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& r : instance.references) {
          best = std::max(best, PairScore(c, r, spec, embeddings));
        }
        total += best;
      }
    }
  }
  return total / static_cast<double>(instance.n());
}

PartitionStatistic::PartitionStatistic(StatisticKind kind, std::size_t n,
                                       std::size_t m)
    : kind_(std::move(kind)), n_(n), m_(m) {}

PartitionStatistic PartitionStatistic::FromMatrix(const DistanceMatrix& matrix,
                                                  const StatisticKind& kind) {
  PartitionStatistic out(kind, matrix.n(), matrix.m());
  if (kind.family == StatisticFamily::kTrm) {
    if (TriangleCount(matrix.n(), matrix.m()) == 0) {
      throw Error(ErrorCode::kInsufficientSamples,
                  "trm needs (n>=1, m>=2) or (n>=2, m>=1)");
    }
    out.data_ = TrmData{TrmKernel(matrix, kind.trm)};
  } else if (kind.family == StatisticFamily::kMeanAgg) {
    MeanAggData data;
    const double top = MaxScore(kind.metric.kind);
    data.scores.reserve(matrix.values().size());
    for (double d : matrix.values()) data.scores.push_back(top - d);
    out.data_ = std::move(data);
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                kind.Label() + " is computed from vectors, not a distance matrix");
  }
  return out;
}

PartitionStatistic PartitionStatistic::FromVectors(
    const Eigen::MatrixXd& joint_rows, std::size_t n,
    const StatisticKind& kind) {
  const auto size = static_cast<std::size_t>(joint_rows.rows());
  if (n > size) throw Error(ErrorCode::kInvalidArgument, "n exceeds row count");
  PartitionStatistic out(kind, n, size - n);
  if (kind.family == StatisticFamily::kFrechet) {
    if (out.n_ < 2 || out.m_ < 2) {
      throw Error(ErrorCode::kInsufficientSamples,
                  "frechet needs at least two vectors per side");
    }
    out.data_ = FrechetData{joint_rows};
  } else if (kind.family == StatisticFamily::kMmd) {
    if (out.n_ < 1 || out.m_ < 1) {
      throw Error(ErrorCode::kInsufficientSamples,
                  "mmd needs at least one vector per side");
    }
    double sigma = 0.0;
    if (kind.mmd_sigma.has_value()) {
      sigma = *kind.mmd_sigma;
      if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sigma must be > 0");
    } else {
      sigma = MedianHeuristic(joint_rows);
    }
    MmdData data;
    data.gram.resize(joint_rows.rows(), joint_rows.rows());
    for (Eigen::Index i = 0; i < joint_rows.rows(); ++i) {
      for (Eigen::Index j = 0; j < joint_rows.rows(); ++j) {
        data.gram(i, j) = RbfKernel(joint_rows.row(i).transpose(),
                                    joint_rows.row(j).transpose(), sigma);
      }
    }
    out.data_ = std::move(data);
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                kind.Label() + " is computed from a distance matrix, not vectors");
  }
  return out;
}

PartitionStatistic PartitionStatistic::ForInstance(
    const EvalInstance& instance, const StatisticKind& kind,
    const EmbeddingTable* embeddings) {
  RequireEmbeddings(kind, embeddings);
  if (kind.family == StatisticFamily::kTrm ||
      kind.family == StatisticFamily::kMeanAgg) {
    return FromMatrix(PairwiseMatrix(instance, kind.metric, embeddings), kind);
  }
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(instance.n() + instance.m()),
                       embeddings->dim());
  rows << embeddings->Rows(instance.candidates),
      embeddings->Rows(instance.references);
  return FromVectors(rows, instance.n(), kind);
}

double PartitionStatistic::Evaluate(
    std::span<const std::uint8_t> is_candidate) const {
  if (is_candidate.size() != size()) {
    throw Error(ErrorCode::kInvalidArgument, "partition size mismatch");
  }
  const std::size_t size = this->size();
  if (const auto* trm = std::get_if<TrmData>(&data_)) {
    return trm->kernel.Evaluate(is_candidate).q();
  }
  if (const auto* agg = std::get_if<MeanAggData>(&data_)) {
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < size; ++i) {
      if (!is_candidate[i]) continue;
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < size; ++j) {
        if (!is_candidate[j]) best = std::max(best, agg->scores[i * size + j]);
      }
      total += best;
      ++count;
    }
    return total / static_cast<double>(count);
  }
  if (const auto* fr = std::get_if<FrechetData>(&data_)) {
    const Eigen::Index dim = fr->rows.cols();
    Eigen::MatrixXd cand(static_cast<Eigen::Index>(n_), dim);
    Eigen::MatrixXd ref(static_cast<Eigen::Index>(m_), dim);
    Eigen::Index ci = 0;
    Eigen::Index ri = 0;
    for (std::size_t i = 0; i < size; ++i) {
      if (is_candidate[i]) {
        cand.row(ci++) = fr->rows.row(static_cast<Eigen::Index>(i));
      } else {
        ref.row(ri++) = fr->rows.row(static_cast<Eigen::Index>(i));
      }
    }
    return FrechetDistance(Summarize(cand), Summarize(ref));
  }
  if (const auto* mmd = std::get_if<MmdData>(&data_)) {
    double cc = 0.0;
    double rr = 0.0;
    double cr = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = 0; j < size; ++j) {
        const double k = mmd->gram(static_cast<Eigen::Index>(i),
                                   static_cast<Eigen::Index>(j));
        if (is_candidate[i] && is_candidate[j]) {
          cc += k;
        } else if (!is_candidate[i] && !is_candidate[j]) {
          rr += k;
        } else if (is_candidate[i]) {
          cr += k;
        }
      }
    }
    const double n = static_cast<double>(n_);
    const double m = static_cast<double>(m_);
    return std::max(0.0, cc / (n * n) + rr / (m * m) - 2.0 * cr / (n * m));
  }
  throw Error(ErrorCode::kInvalidArgument, "empty partition statistic");
}

double PartitionStatistic::Observed() const {
  return Evaluate(Partition::Observed(n_, m_).flags());
}

double StatisticForPartition(const PartitionStatistic& precomp,
                             const Partition& partition) {
  if (partition.n() != precomp.n() || partition.m() != precomp.m()) {
    throw Error(ErrorCode::kInvalidArgument,
                "partition shape does not match the precomputation");
  }
  return precomp.Evaluate(partition.flags());
}

std::string_view PValueModeName(PValueMode mode) {
  return mode == PValueMode::kExact ? "exact" : "montecarlo";
}

std::optional<PValueMode> ParsePValueMode(std::string_view name) {
  if (name == "exact") return PValueMode::kExact;
  if (name == "montecarlo") return PValueMode::kMonteCarlo;
  return std::nullopt;
}

std::uint64_t Binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(result);
}

InstanceSignificance ExactPValue(const PartitionStatistic& precomp,
                                 const PValueConfig& config) {
  const std::size_t size = precomp.size();
  const std::size_t n = precomp.n();
  const std::uint64_t total = Binomial(size, n);
  if (total > config.exact_limit) {
    throw Error(ErrorCode::kMustUseMonteCarlo,
                "exact enumeration needs C(" + std::to_string(size) + "," +
                    std::to_string(n) + ") = " + std::to_string(total) +
                    " partitions, above the limit of " +
                    std::to_string(config.exact_limit) +
                    "; rerun with --mode montecarlo or raise --exact-limit");
  }
  const double observed = precomp.Observed();
  const bool larger = precomp.kind().larger_is_more_extreme();

  const std::uint64_t chunks = (total + kExactChunk - 1) / kExactChunk;
  std::vector<std::uint64_t> counts(chunks, 0);
  ForEachChunk(chunks, config.threads, [&](std::uint64_t chunk) {
    const std::uint64_t begin = chunk * kExactChunk;
    const std::uint64_t end = std::min(total, begin + kExactChunk);
    std::vector<std::size_t> combo = UnrankCombination(begin, size, n);
    std::vector<std::uint8_t> flags(size);
    std::uint64_t hits = 0;
    for (std::uint64_t r = begin; r < end; ++r) {
      std::fill(flags.begin(), flags.end(), 0);
      for (auto c : combo) flags[c] = 1;
      if (AsExtreme(precomp.Evaluate(flags), observed, larger)) ++hits;
      NextCombination(combo, size);
    }
    counts[chunk] = hits;
  });
  const std::uint64_t extreme =
      std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  return Finish(observed, extreme, total,
                static_cast<double>(extreme) / static_cast<double>(total),
                PValueMode::kExact);
}

InstanceSignificance MonteCarloPValue(const PartitionStatistic& precomp,
                                      const PValueConfig& config) {
  if (config.samples < kMinMonteCarloSamples) {
    throw Error(ErrorCode::kInvalidArgument,
                "montecarlo needs at least " +
                    std::to_string(kMinMonteCarloSamples) + " samples");
  }
  const std::size_t size = precomp.size();
  const std::size_t n = precomp.n();
  const double observed = precomp.Observed();
  const bool larger = precomp.kind().larger_is_more_extreme();
  const std::uint64_t samples = config.samples;

  const std::uint64_t chunks = (samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
  std::vector<std::uint64_t> counts(chunks, 0);
  ForEachChunk(chunks, config.threads, [&](std::uint64_t chunk) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                      static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(chunk),
                      static_cast<std::uint32_t>(chunk >> 32)};
    std::mt19937_64 rng(seq);
    const std::uint64_t begin = chunk * kMonteCarloChunk;
    const std::uint64_t end = std::min(samples, begin + kMonteCarloChunk);
    std::vector<std::size_t> order(size);
    std::vector<std::uint8_t> flags(size);
    std::uint64_t hits = 0;
    for (std::uint64_t s = begin; s < end; ++s) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::fill(flags.begin(), flags.end(), 0);
      for (std::size_t i = 0; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, size - 1);
        std::swap(order[i], order[pick(rng)]);
        flags[order[i]] = 1;
      }
      if (AsExtreme(precomp.Evaluate(flags), observed, larger)) ++hits;
    }
    counts[chunk] = hits;
  });
  const std::uint64_t extreme =
      std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  return Finish(observed, extreme, samples,
                static_cast<double>(1 + extreme) / static_cast<double>(1 + samples),
                PValueMode::kMonteCarlo);
}

InstanceSignificance PValue(const PartitionStatistic& precomp,
                            const PValueConfig& config) {
  return config.mode == PValueMode::kExact ? ExactPValue(precomp, config)
                                           : MonteCarloPValue(precomp, config);
}

double HarmonicMeanP(std::span<const double> ps) {
  if (ps.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "harmonic mean of no p-values");
  }
  double inverse_sum = 0.0;
  for (double p : ps) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "p-value " + std::to_string(p) + " outside (0, 1]");
    }
    inverse_sum += 1.0 / p;
  }
  return static_cast<double>(ps.size()) / inverse_sum;
}

CorpusSignificance TestCorpus(const Corpus& corpus, const StatisticKind& kind,
                              const PValueConfig& config,
                              const EmbeddingTable* embeddings) {
  if (corpus.instances.empty()) {
    throw Error(ErrorCode::kValidation, "corpus has no instances");
  }
  RequireEmbeddings(kind, embeddings);
  const StatisticKind resolved = WithCorpusIdf(kind, corpus);
  CorpusSignificance out;
  std::vector<double> ps;
  for (const auto& instance : corpus.instances) {
    try {
      InstanceSignificance result = PValue(
          PartitionStatistic::ForInstance(instance, resolved, embeddings), config);
      result.id = instance.id;
      ps.push_back(result.p);
      out.instances.push_back(std::move(result));
    } catch (const Error& e) {
      throw Error(e.code(), "instance '" + instance.id + "': " + e.what());
    }
  }
  out.hmp = HarmonicMeanP(ps);
  out.log10_hmp = std::log10(out.hmp);
  return out;
}

Corpus TruncateCandidates(const Corpus& corpus, std::size_t k) {
  Corpus out;
  out.instances.reserve(corpus.instances.size());
  for (const auto& instance : corpus.instances) {
    EvalInstance copy;
    copy.id = instance.id;
    copy.references = instance.references;
    const std::size_t keep = std::min(k, instance.candidates.size());
    copy.candidates.assign(instance.candidates.begin(),
                           instance.candidates.begin() + keep);
    out.instances.push_back(std::move(copy));
  }
  return out;
}

std::vector<SensitivityRow> SensitivityCurve(const Corpus& corpus,
                                             const StatisticKind& kind,
                                             std::size_t k_max,
                                             const PValueConfig& config,
                                             const EmbeddingTable* embeddings) {
  if (k_max < 1) throw Error(ErrorCode::kInvalidArgument, "k_max must be >= 1");
  std::string short_ids;
  for (const auto& instance : corpus.instances) {
    if (instance.n() < k_max) {
      short_ids += (short_ids.empty() ? "" : ", ") + instance.id;
    }
  }
  if (!short_ids.empty()) {
    throw Error(ErrorCode::kValidation,
                "instances with fewer than " + std::to_string(k_max) +
                    " candidates: " + short_ids);
  }
  const StatisticKind resolved = WithCorpusIdf(kind, corpus);
  std::vector<SensitivityRow> rows;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const CorpusSignificance sig =
        TestCorpus(TruncateCandidates(corpus, k), resolved, config, embeddings);
    rows.push_back({k, sig.hmp, sig.log10_hmp});
  }
  return rows;
}

}  // namespace trmeval
