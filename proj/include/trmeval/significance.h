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

// Permutation tests over candidate/reference role assignments.
//
// Each instance is tested on its own: the joint set of n candidates and m
// references is re-split into every (or a random sample of) n-subset, the
// statistic is recomputed from a precomputation shared by all splits, and the
// p-value is the fraction of splits at least as extreme as the observed one.
// Per-instance p-values are combined across a corpus with the unweighted
// harmonic mean.
//
// Results never depend on the thread count: partitions are processed in
// fixed-size chunks whose counts are integers, and Monte-Carlo draws are
// seeded per chunk.

#ifndef TRMEVAL_SIGNIFICANCE_H_
#define TRMEVAL_SIGNIFICANCE_H_

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "trmeval/core.h"
#include "trmeval/distances.h"
#include "trmeval/embedding.h"
#include "trmeval/trm.h"

namespace trmeval {

enum class StatisticFamily { kTrm, kMeanAgg, kFrechet, kMmd };

std::string_view StatisticFamilyName(StatisticFamily family);
std::optional<StatisticFamily> ParseStatisticFamily(std::string_view name);

struct StatisticKind {
  StatisticFamily family = StatisticFamily::kTrm;
  MetricSpec metric;               // trm and mean_agg
  TrmOptions trm;                  // trm
  std::optional<double> mmd_sigma; // mmd; median heuristic when absent

  // trm, frechet and mmd grow with divergence; a mean_agg score shrinks.
  bool larger_is_more_extreme() const {
    return family != StatisticFamily::kMeanAgg;
  }
  bool needs_embeddings() const;
  // e.g. "trm(meteor_lite)" or "frechet".
  std::string Label() const;
};

// Mean over candidates of each candidate's score against the reference set.
// bleu and cider_d use their multi-reference form; the other metrics take
// the best single reference.
double MeanAggregateScore(const EvalInstance& instance, const MetricSpec& spec,
                          const EmbeddingTable* embeddings = nullptr);

// Everything a statistic needs to be re-evaluated under a new role
// assignment, computed once per instance.
class PartitionStatistic {
 public:
  // trm or mean_agg over a prebuilt matrix.
  static PartitionStatistic FromMatrix(const DistanceMatrix& matrix,
                                       const StatisticKind& kind);
  // frechet or mmd over joint rows (candidates first, then references).
  static PartitionStatistic FromVectors(const Eigen::MatrixXd& joint_rows,
                                        std::size_t n,
                                        const StatisticKind& kind);
  static PartitionStatistic ForInstance(const EvalInstance& instance,
                                        const StatisticKind& kind,
                                        const EmbeddingTable* embeddings);

  const StatisticKind& kind() const { return kind_; }
  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  std::size_t size() const { return n_ + m_; }

  // Statistic under the role assignment given by one flag per joint index.
  double Evaluate(std::span<const std::uint8_t> is_candidate) const;
  double Observed() const;

 private:
  struct TrmData {
    TrmKernel kernel;
  };
  struct MeanAggData {
    std::vector<double> scores;  // row-major pairwise scores
  };
  struct FrechetData {
    Eigen::MatrixXd rows;
  };
  struct MmdData {
    Eigen::MatrixXd gram;
  };

  PartitionStatistic(StatisticKind kind, std::size_t n, std::size_t m);

  StatisticKind kind_;
  std::size_t n_;
  std::size_t m_;
  std::variant<std::monostate, TrmData, MeanAggData, FrechetData, MmdData> data_;
};

double StatisticForPartition(const PartitionStatistic& precomp,
                             const Partition& partition);

enum class PValueMode { kExact, kMonteCarlo };

std::string_view PValueModeName(PValueMode mode);
std::optional<PValueMode> ParsePValueMode(std::string_view name);

inline constexpr std::uint64_t kDefaultExactLimit = 200000;
inline constexpr std::size_t kMinMonteCarloSamples = 100;

struct PValueConfig {
  PValueMode mode = PValueMode::kExact;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  std::uint64_t exact_limit = kDefaultExactLimit;
  int threads = 1;
};

struct InstanceSignificance {
  std::string id;
  double observed = 0.0;
  double p = 1.0;
  double log10_p = 0.0;
  PValueMode mode = PValueMode::kExact;
  std::uint64_t evaluations = 0;    // partitions enumerated or drawn
  std::uint64_t extreme_count = 0;  // as-or-more extreme among them
};

struct CorpusSignificance {
  std::vector<InstanceSignificance> instances;
  double hmp = 1.0;
  double log10_hmp = 0.0;
};

// C(n, k), saturating at UINT64_MAX.
std::uint64_t Binomial(std::uint64_t n, std::uint64_t k);

// Enumerates all C(n+m, n) role assignments. The observed assignment is
// among them, so p >= 1 / C(n+m, n). Throws kMustUseMonteCarlo above
// `config.exact_limit`.
InstanceSignificance ExactPValue(const PartitionStatistic& precomp,
                                 const PValueConfig& config);

// p = (1 + k) / (1 + samples) with k the number of uniformly drawn
// assignments at least as extreme as observed. Throws kInvalidArgument when
// samples < kMinMonteCarloSamples.
InstanceSignificance MonteCarloPValue(const PartitionStatistic& precomp,
                                      const PValueConfig& config);

InstanceSignificance PValue(const PartitionStatistic& precomp,
                            const PValueConfig& config);

// L / sum(1 / p_i). Throws kInvalidArgument on an empty list or any p
// outside (0, 1].
double HarmonicMeanP(std::span<const double> ps);

// Tests every instance and aggregates. A cider_d metric without an idf table
// gets one built from `corpus`.
CorpusSignificance TestCorpus(const Corpus& corpus, const StatisticKind& kind,
                              const PValueConfig& config,
                              const EmbeddingTable* embeddings = nullptr);

struct SensitivityRow {
  std::size_t k = 0;
  double hmp = 1.0;
  double log10_hmp = 0.0;
};

// For k = 1..k_max keeps the first k candidates of every instance and
// tests the truncated corpus. Throws kValidation listing the ids of
// instances with fewer than k_max candidates.
std::vector<SensitivityRow> SensitivityCurve(
    const Corpus& corpus, const StatisticKind& kind, std::size_t k_max,
    const PValueConfig& config, const EmbeddingTable* embeddings = nullptr);

// First k candidates of every instance; references untouched.
Corpus TruncateCandidates(const Corpus& corpus, std::size_t k);

}  // namespace trmeval

#endif  // TRMEVAL_SIGNIFICANCE_H_
