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


#include "trmeval/kbm.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "trmeval/error.h"

namespace trmeval {
namespace {

Eigen::MatrixXd Rows(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) out(i, j++) = v;
    ++i;
  }
  return out;
}

Eigen::MatrixXd Gaussian(std::mt19937_64& rng, int count, int dim,
                         double shift = 0.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd out(count, dim);
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < dim; ++j) out(i, j) = normal(rng) + (j == 0 ? shift : 0.0);
  }
  return out;
}

GaussianSummary Diagonal(const Eigen::VectorXd& mean, const Eigen::VectorXd& var) {
  GaussianSummary g;
  g.mean = mean;
  g.covariance = var.asDiagonal();
  g.count = 2;
  return g;
}

TEST(SummarizeTest, TwoCopies) {
  const GaussianSummary g = Summarize(Rows({{0.5, -1.0}, {0.5, -1.0}}));
  EXPECT_EQ(g.count, 2);
  EXPECT_EQ(g.mean, Eigen::Vector2d(0.5, -1.0));
  EXPECT_TRUE(g.covariance.isApprox(
      kCovarianceShrinkage * Eigen::Matrix2d::Identity(), 1e-15));
}

TEST(SummarizeTest, OneDimensionalVariance) {
  const GaussianSummary g = Summarize(Rows({{0.0}, {2.0}}));
  EXPECT_EQ(g.mean(0), 1.0);
  EXPECT_DOUBLE_EQ(g.covariance(0, 0), 2.0 + kCovarianceShrinkage);
}

TEST(SummarizeTest, MatchesPerEntryFormula) {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd x = Gaussian(rng, 5, 3);
  const GaussianSummary g = Summarize(x);
  for (int a = 0; a < 3; ++a) {
    double mean = 0.0;
    for (int i = 0; i < 5; ++i) mean += x(i, a);
    EXPECT_NEAR(g.mean(a), mean / 5, 1e-14);
  }
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      double sum = 0.0;
      for (int i = 0; i < 5; ++i) {
        sum += (x(i, a) - g.mean(a)) * (x(i, b) - g.mean(b));
      }
      const double expected = sum / 4 + (a == b ? kCovarianceShrinkage : 0.0);
      EXPECT_NEAR(g.covariance(a, b), expected, 1e-13);
    }
  }
}

TEST(SummarizeTest, TooFewRows) {
  try {
    Summarize(Rows({{1.0}}));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientSamples);
  }
}

TEST(MatrixSqrtTest, KnownRoots) {
  EXPECT_TRUE(MatrixSqrtPsd(Eigen::Matrix3d::Identity())
                  .isApprox(Eigen::Matrix3d::Identity(), 1e-14));
  EXPECT_TRUE(MatrixSqrtPsd(Eigen::Vector2d(4, 9).asDiagonal().toDenseMatrix())
                  .isApprox(Eigen::Vector2d(2, 3).asDiagonal().toDenseMatrix(),
                            1e-14));
}

TEST(MatrixSqrtTest, ReconstructsRandomPsd) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd a = Gaussian(rng, 5, 5);
    const Eigen::MatrixXd m = a.transpose() * a;
    const Eigen::MatrixXd r = MatrixSqrtPsd(m);
    EXPECT_LE((r * r - m).norm() / m.norm(), 1e-6);
    EXPECT_LE((r - r.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(MatrixSqrtTest, RejectsAsymmetric) {
  Eigen::Matrix2d m;
  m << 1, 2, 0, 1;
  try {
    MatrixSqrtPsd(m);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(FrechetTest, OneDimensionalClosedForm) {
  const GaussianSummary a = Diagonal(Eigen::VectorXd::Constant(1, 1.0),
                                     Eigen::VectorXd::Constant(1, 4.0));
  const GaussianSummary b = Diagonal(Eigen::VectorXd::Constant(1, 2.0),
                                     Eigen::VectorXd::Constant(1, 1.0));
  EXPECT_NEAR(FrechetDistance(a, b), 2.0, 1e-8);
}

TEST(FrechetTest, DiagonalClosedForm) {
  const GaussianSummary a = Diagonal(Eigen::Vector3d(0.5, -1.0, 2.0),
                                     Eigen::Vector3d(1.0, 4.0, 0.25));
  const GaussianSummary b = Diagonal(Eigen::Vector3d(0.0, 1.0, 2.0),
                                     Eigen::Vector3d(9.0, 1.0, 0.25));
  EXPECT_NEAR(FrechetDistance(a, b), 9.25, 1e-8);
}

TEST(FrechetTest, SelfDistanceAndSymmetry) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const GaussianSummary a = Summarize(Gaussian(rng, 10, 8));
    const GaussianSummary b = Summarize(Gaussian(rng, 10, 8, 0.5));
    EXPECT_LE(FrechetDistance(a, a), 1e-8);
    EXPECT_NEAR(FrechetDistance(a, b), FrechetDistance(b, a), 1e-8);
  }
}

TEST(FrechetTest, DimensionMismatch) {
  const GaussianSummary a = Summarize(Rows({{0.0}, {1.0}}));
  const GaussianSummary b = Summarize(Rows({{0.0, 1.0}, {1.0, 0.0}}));
  EXPECT_THROW(FrechetDistance(a, b), Error);
}

TEST(MedianHeuristicTest, Examples) {
  EXPECT_EQ(MedianHeuristic(Rows({{0.0}, {2.0}})), 1.0);
  EXPECT_EQ(MedianHeuristic(Rows({{0.0}, {0.0}, {0.0}})), 1.0);
  // Marks 0, 1, 4, 6 have pairwise distances {1, 2, 3, 4, 5, 6}.
  EXPECT_EQ(MedianHeuristic(Rows({{0.0}, {1.0}, {4.0}, {6.0}})), 1.75);
  EXPECT_THROW(MedianHeuristic(Rows({{0.0}})), Error);
}

TEST(MmdTest, IdenticalMultisetsGiveZero) {
  std::mt19937_64 rng(11);
  const Eigen::MatrixXd x = Gaussian(rng, 6, 4);
  Eigen::MatrixXd shuffled = x;
  shuffled.row(0).swap(shuffled.row(5));
  EXPECT_NEAR(MmdRbf(x, shuffled), 0.0, 1e-12);
}

TEST(MmdTest, SingletonClosedForm) {
  const Eigen::MatrixXd x = Rows({{0.0, 1.0}});
  const Eigen::MatrixXd y = Rows({{1.0, 3.0}});
  const double sigma = 0.8;
  EXPECT_NEAR(MmdRbf(x, y, sigma), 2.0 - 2.0 * std::exp(-5.0 / (2 * sigma * sigma)),
              1e-12);
  EXPECT_NEAR(RbfKernel(x.row(0).transpose(), y.row(0).transpose(), sigma),
              std::exp(-5.0 / (2 * sigma * sigma)), 1e-15);
}

TEST(MmdTest, WideKernelVanishes) {
  std::mt19937_64 rng(13);
  EXPECT_NEAR(MmdRbf(Gaussian(rng, 4, 3), Gaussian(rng, 5, 3, 2.0), 1e8), 0.0,
              1e-12);
}

TEST(MmdTest, RejectsNonPositiveSigma) {
  const Eigen::MatrixXd x = Rows({{0.0}});
  EXPECT_THROW(MmdRbf(x, x, 0.0), Error);
  EXPECT_THROW(MmdRbf(x, x, -1.0), Error);
}

TEST(MmdTest, SymmetricAndNonNegative) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd a = Gaussian(rng, 1 + trial % 6, 3);
    const Eigen::MatrixXd b = Gaussian(rng, 1 + trial % 4, 3, 0.3);
    EXPECT_GE(MmdRbf(a, b), 0.0);
    EXPECT_NEAR(MmdRbf(a, b), MmdRbf(b, a), 1e-12);
  }
}

TEST(MmdTest, InvariantUnderRotation) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd a = Gaussian(rng, 5, 4);
    const Eigen::MatrixXd b = Gaussian(rng, 6, 4, 1.0);
    const Eigen::MatrixXd q =
        Eigen::HouseholderQR<Eigen::MatrixXd>(Gaussian(rng, 4, 4)).householderQ();
    EXPECT_NEAR(MmdRbf(a, b), MmdRbf(a * q, b * q), 1e-9);
    EXPECT_NEAR(MmdRbf(a, b, 0.7), MmdRbf(a * q, b * q, 0.7), 1e-9);
  }
}

TEST(SeparationTest, GrowingMeanGapIncreasesBothDistances) {
  for (int seed = 0; seed < 5; ++seed) {
    double prev_frechet = -1.0;
    double prev_mmd = -1.0;
    for (double gap : {0.0, 1.0, 2.0, 4.0}) {
      std::mt19937_64 rng(100 + seed);
      const Eigen::MatrixXd a = Gaussian(rng, 200, 1);
      const Eigen::MatrixXd b = Gaussian(rng, 200, 1, gap);
      const double fr = FrechetDistance(Summarize(a), Summarize(b));
      const double mmd = MmdRbf(a, b, 1.0);
      EXPECT_GT(fr, prev_frechet) << "seed " << seed << " gap " << gap;
      EXPECT_GT(mmd, prev_mmd) << "seed " << seed << " gap " << gap;
      prev_frechet = fr;
      prev_mmd = mmd;
    }
  }
}

}  // namespace
}  // namespace trmeval
