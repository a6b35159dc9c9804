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

#include "trmeval/trm.h"

#include <cmath>
#include <cstdlib>
#include <string>
#include <tuple>
#include <utility>

#include "trmeval/error.h"

namespace trmeval {
namespace {

using Units = std::array<std::uint8_t, 3>;

constexpr std::uint8_t kUnit = 6;

Units ClassifyUnits(double in, double e0, double e1, TiePolicy policy) {
  Units out{0, 0, 0};
  if (policy == TiePolicy::kInclusive) {
    if (in <= e0 && in <= e1) out[0] = kUnit;
    if ((e0 <= in && in <= e1) || (e1 <= in && in <= e0)) out[1] = kUnit;
    if (e0 <= in && e1 <= in) out[2] = kUnit;
    return out;
  }
  const int less = (e0 < in) + (e1 < in);
  const int equal = (e0 == in) + (e1 == in);
  const auto share = static_cast<std::uint8_t>(kUnit / (equal + 1));
  for (int r = less; r <= less + equal; ++r) out[r] = share;
  return out;
}

void Accumulate(Units& acc, const Units& add) {
  for (int r = 0; r < 3; ++r) acc[r] = static_cast<std::uint8_t>(acc[r] + add[r]);
}

// Masses for a triangle whose same-side pair is (p, q) and cross vertex o.
Units TriangleUnits(const DistanceMatrix& d, std::size_t p, std::size_t q,
                    std::size_t o, const TrmOptions& options) {
  if (options.symmetrization == EdgeSymmetrization::kAverage) {
    auto avg = [&](std::size_t a, std::size_t b) {
      return (d(a, b) + d(b, a)) / 2.0;
    };
    return ClassifyUnits(avg(p, q), avg(p, o), avg(q, o), options.tie_policy);
  }
  Units out = ClassifyUnits(d(p, q), d(q, o), d(o, p), options.tie_policy);
  Accumulate(out, ClassifyUnits(d(q, p), d(p, o), d(o, q), options.tie_policy));
  return out;
}

void Add(std::array<double, 3>& acc, const std::array<double, 3>& add) {
  for (int r = 0; r < 3; ++r) acc[r] += add[r];
}

}  // namespace

std::string_view TiePolicyName(TiePolicy policy) {
  return policy == TiePolicy::kFractional ? "fractional" : "inclusive";
}

std::optional<TiePolicy> ParseTiePolicy(std::string_view name) {
  if (name == "fractional") return TiePolicy::kFractional;
  if (name == "inclusive") return TiePolicy::kInclusive;
  return std::nullopt;
}

std::string_view SymmetrizationName(EdgeSymmetrization mode) {
  return mode == EdgeSymmetrization::kAverage ? "average" : "directed-both";
}

std::optional<EdgeSymmetrization> ParseSymmetrization(std::string_view name) {
  if (name == "average") return EdgeSymmetrization::kAverage;
  if (name == "directed-both") return EdgeSymmetrization::kDirectedBoth;
  return std::nullopt;
}

Partition::Partition(std::vector<std::uint8_t> is_candidate, std::size_t n)
    : flags_(std::move(is_candidate)), n_(n) {
  std::size_t count = 0;
  for (auto& f : flags_) {
    f = f != 0;
    count += f;
  }
  if (count != n_) {
    throw Error(ErrorCode::kInvalidArgument,
                "partition flags " + std::to_string(count) +
                    " candidates, expected " + std::to_string(n_));
  }
}

Partition Partition::Observed(std::size_t n, std::size_t m) {
  std::vector<std::uint8_t> flags(n + m, 0);
  for (std::size_t i = 0; i < n; ++i) flags[i] = 1;
  return Partition(std::move(flags), n);
}

Partition Partition::FromCandidates(std::size_t size,
                                    std::span<const std::size_t> candidates) {
  std::vector<std::uint8_t> flags(size, 0);
  for (auto c : candidates) {
    if (c >= size || flags[c]) {
      throw Error(ErrorCode::kInvalidArgument,
                  "candidate index out of range or repeated");
    }
    flags[c] = 1;
  }
  return Partition(std::move(flags), candidates.size());
}

std::vector<std::size_t> Partition::Candidates() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < flags_.size(); ++i) {
    if (flags_[i]) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> Partition::References() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < flags_.size(); ++i) {
    if (!flags_[i]) out.push_back(i);
  }
  return out;
}

std::size_t TriangleCount(std::size_t n, std::size_t m) {
  const std::size_t pairs_c = n * (n > 0 ? n - 1 : 0) / 2;
  const std::size_t pairs_r = m * (m > 0 ? m - 1 : 0) / 2;
  return pairs_c * m + pairs_r * n;
}

std::vector<Triangle> EnumerateTriangles(std::size_t n, std::size_t m) {
  std::vector<Triangle> out;
  out.reserve(TriangleCount(n, m));
  for (auto [side, same, cross] :
       {std::tuple{TriangleSide::kTwoCandidates, n, m},
        std::tuple{TriangleSide::kTwoReferences, m, n}}) {
    for (std::size_t i = 0; i < same; ++i) {
      for (std::size_t j = i + 1; j < same; ++j) {
        for (std::size_t k = 0; k < cross; ++k) out.push_back({side, i, j, k});
      }
    }
  }
  return out;
}

std::array<double, 3> ClassifyTriangle(double d_in, double d_e0, double d_e1,
                                       TiePolicy policy) {
  std::array<double, 3> out{0.0, 0.0, 0.0};
  if (policy == TiePolicy::kInclusive) {
    out[0] = (d_in <= d_e0 && d_in <= d_e1) ? 1.0 : 0.0;
    out[1] = ((d_e0 <= d_in && d_in <= d_e1) || (d_e1 <= d_in && d_in <= d_e0))
                 ? 1.0
                 : 0.0;
    out[2] = (d_e0 <= d_in && d_e1 <= d_in) ? 1.0 : 0.0;
    return out;
  }
  int below = 0;
  int tied = 0;
  for (double e : {d_e0, d_e1}) {
    if (e < d_in) ++below;
    if (e == d_in) ++tied;
  }
  for (int r = below; r <= below + tied; ++r) out[r] = 1.0 / (tied + 1);
  return out;
}

TrmResult TrmStatistic(const DistanceMatrix& matrix, const Partition& partition,
                       const TrmOptions& options) {
  if (partition.size() != matrix.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "partition size does not match the distance matrix");
  }
  const std::vector<std::size_t> cands = partition.Candidates();
  const std::vector<std::size_t> refs = partition.References();
  const std::vector<Triangle> triangles =
      EnumerateTriangles(cands.size(), refs.size());
  if (triangles.empty()) {
    throw Error(ErrorCode::kInsufficientSamples,
                "no mixed triangles: need (n>=1, m>=2) or (n>=2, m>=1)");
  }

  auto edge = [&](std::size_t a, std::size_t b) {
    return (matrix(a, b) + matrix(b, a)) / 2.0;
  };
  std::array<double, 3> mass{0.0, 0.0, 0.0};
  for (const auto& t : triangles) {
    const auto& same = t.side == TriangleSide::kTwoCandidates ? cands : refs;
    const auto& cross = t.side == TriangleSide::kTwoCandidates ? refs : cands;
    const std::size_t p = same[t.i];
    const std::size_t q = same[t.j];
    const std::size_t o = cross[t.k];
    if (options.symmetrization == EdgeSymmetrization::kAverage) {
      Add(mass, ClassifyTriangle(edge(p, q), edge(p, o), edge(q, o),
                                 options.tie_policy));
    } else {
      Add(mass, ClassifyTriangle(matrix(p, q), matrix(q, o), matrix(o, p),
                                 options.tie_policy));
      Add(mass, ClassifyTriangle(matrix(q, p), matrix(p, o), matrix(o, q),
                                 options.tie_policy));
    }
  }

  // Every mass is a multiple of 1/6. Rounding to those units and reusing the
  // kernel's integer q keeps both paths bit-identical.
  TrmKernel::Counts counts;
  for (std::size_t r = 0; r < 3; ++r) {
    counts.rank[r] = std::llround(mass[r] * kUnit);
    counts.total += counts.rank[r];
  }
  return counts.ToResult();
}

double TrmKernel::Counts::q() const {
  std::int64_t deviation = 0;
  for (auto c : rank) deviation += std::llabs(3 * c - total);
  return static_cast<double>(deviation) / static_cast<double>(3 * total);
}

TrmResult TrmKernel::Counts::ToResult() const {
  TrmResult r;
  r.i0 = static_cast<double>(rank[0]) / kUnit;
  r.i1 = static_cast<double>(rank[1]) / kUnit;
  r.i2 = static_cast<double>(rank[2]) / kUnit;
  r.total = static_cast<double>(total) / kUnit;
  r.q = q();
  return r;
}

TrmKernel::TrmKernel(const DistanceMatrix& matrix, const TrmOptions& options)
    : size_(matrix.size()) {
  const std::size_t s = size_;
  masses_.reserve(s < 3 ? 0 : s * (s - 1) * (s - 2) / 6);
  for (std::size_t a = 0; a < s; ++a) {
    for (std::size_t b = a + 1; b < s; ++b) {
      for (std::size_t c = b + 1; c < s; ++c) {
        masses_.push_back({TriangleUnits(matrix, b, c, a, options),
                           TriangleUnits(matrix, a, c, b, options),
                           TriangleUnits(matrix, a, b, c, options)});
      }
    }
  }
}

TrmKernel::Counts TrmKernel::Evaluate(
    std::span<const std::uint8_t> is_candidate) const {
  if (is_candidate.size() != size_) {
    throw Error(ErrorCode::kInvalidArgument,
                "partition size does not match the distance matrix");
  }
  std::array<std::int64_t, 3> acc{0, 0, 0};
  const std::uint8_t* flag = is_candidate.data();
  std::size_t idx = 0;
  for (std::size_t a = 0; a < size_; ++a) {
    const int fa = flag[a] != 0;
    for (std::size_t b = a + 1; b < size_; ++b) {
      const int fab = fa + (flag[b] != 0);
      for (std::size_t c = b + 1; c < size_; ++c, ++idx) {
        const int fc = flag[c] != 0;
        const int count = fab + fc;
        if (count == 0 || count == 3) continue;
        // The odd vertex is the lone member of the minority side.
        const int odd_value = count == 1 ? 1 : 0;
        const int odd = (fa == odd_value) ? 0 : ((flag[b] != 0) == odd_value ? 1 : 2);
        const auto& units = masses_[idx][odd];
        acc[0] += units[0];
        acc[1] += units[1];
        acc[2] += units[2];
      }
    }
  }
  Counts out;
  out.rank = acc;
  out.total = acc[0] + acc[1] + acc[2];
  if (out.total == 0) {
    throw Error(ErrorCode::kInsufficientSamples,
                "no mixed triangles: need (n>=1, m>=2) or (n>=2, m>=1)");
  }
  return out;
}

}  // namespace trmeval
