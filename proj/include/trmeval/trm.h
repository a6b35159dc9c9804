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

// Triangle-rank two-sample statistic over a DistanceMatrix.
//
// Every triangle with two vertices on one side and one on the other is
// classified by the rank (smallest, middle, largest) of its same-side edge.
// Under exchangeability the three ranks are equally likely; q measures the
// L1 deviation of the observed rank fractions from (1/3, 1/3, 1/3) and lies
// in [0, 4/3].

#ifndef TRMEVAL_TRM_H_
#define TRMEVAL_TRM_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "trmeval/distances.h"

namespace trmeval {

// How a tie between the same-side edge and a cross edge is scored.
enum class TiePolicy {
  // Unit mass split evenly over every rank the same-side edge could take.
  kFractional,
  // Literal indicator definition with <=: a tied triangle can raise more than
  // one indicator and the total grows accordingly.
  kInclusive,
};

// How an edge length is read from a possibly asymmetric matrix.
enum class EdgeSymmetrization {
  // (d(a,b) + d(b,a)) / 2 for every edge.
  kAverage,
  // Each triangle is evaluated once per cyclic orientation
  // (a->b->k->a and a->k->b->a) and both contribute.
  kDirectedBoth,
};

std::string_view TiePolicyName(TiePolicy policy);
std::optional<TiePolicy> ParseTiePolicy(std::string_view name);
std::string_view SymmetrizationName(EdgeSymmetrization mode);
std::optional<EdgeSymmetrization> ParseSymmetrization(std::string_view name);

struct TrmOptions {
  TiePolicy tie_policy = TiePolicy::kFractional;
  EdgeSymmetrization symmetrization = EdgeSymmetrization::kAverage;
};

// Role assignment of the joint index set [0, n+m).
class Partition {
 public:
  // Throws kInvalidArgument unless exactly `n` flags are set.
  Partition(std::vector<std::uint8_t> is_candidate, std::size_t n);

  // Candidates are the first n indices.
  static Partition Observed(std::size_t n, std::size_t m);
  // `candidates` lists the joint indices assigned the candidate role.
  static Partition FromCandidates(std::size_t size,
                                  std::span<const std::size_t> candidates);

  std::size_t n() const { return n_; }
  std::size_t m() const { return flags_.size() - n_; }
  std::size_t size() const { return flags_.size(); }
  bool is_candidate(std::size_t i) const { return flags_[i] != 0; }
  std::span<const std::uint8_t> flags() const { return flags_; }

  // Joint indices of each side, ascending.
  std::vector<std::size_t> Candidates() const;
  std::vector<std::size_t> References() const;

 private:
  std::vector<std::uint8_t> flags_;
  std::size_t n_;
};

enum class TriangleSide { kTwoCandidates, kTwoReferences };

// `i < j` index the same-side pair within its own set; `k` indexes the cross
// vertex within the opposite set.
struct Triangle {
  TriangleSide side;
  std::size_t i;
  std::size_t j;
  std::size_t k;

  friend bool operator==(const Triangle&, const Triangle&) = default;
};

// n*C(m,2) + C(n,2)*m triangles ordered by (side, i, j, k). Empty when
// neither side can form a pair with a cross vertex.
std::vector<Triangle> EnumerateTriangles(std::size_t n, std::size_t m);

std::size_t TriangleCount(std::size_t n, std::size_t m);

// Rank masses (smallest, middle, largest) of the same-side edge `d_in`
// against the cross edges.
std::array<double, 3> ClassifyTriangle(double d_in, double d_e0, double d_e1,
                                       TiePolicy policy = TiePolicy::kFractional);

struct TrmResult {
  double i0 = 0.0;
  double i1 = 0.0;
  double i2 = 0.0;
  double total = 0.0;
  double q = 0.0;
};

// Direct evaluation: enumerates triangles for the partition and classifies
// each one. Throws kInsufficientSamples when no triangle exists.
TrmResult TrmStatistic(const DistanceMatrix& matrix, const Partition& partition,
                       const TrmOptions& options = {});

// Precomputed rank masses for every vertex triple of a matrix, so a new
// partition costs one pass over C(n+m, 3) triples with integer arithmetic.
// Masses are held in units of 1/6, which makes fractional ties exact and the
// resulting q bit-identical no matter how partitions are scheduled.
class TrmKernel {
 public:
  struct Counts {
    std::array<std::int64_t, 3> rank{};
    std::int64_t total = 0;

    double q() const;
    TrmResult ToResult() const;
  };

  TrmKernel(const DistanceMatrix& matrix, const TrmOptions& options);

  std::size_t size() const { return size_; }

  // `is_candidate` has one flag per joint index.
  Counts Evaluate(std::span<const std::uint8_t> is_candidate) const;

 private:
  std::size_t size_;
  // Per triple (a<b<c), masses for the same-side edge when the odd vertex is
  // a, b or c respectively.
  std::vector<std::array<std::array<std::uint8_t, 3>, 3>> masses_;
};

}  // namespace trmeval

#endif  // TRMEVAL_TRM_H_
