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

// Distribution distances between two sets of sentence embeddings. Inputs are
// row-per-sample matrices.

#ifndef TRMEVAL_KBM_H_
#define TRMEVAL_KBM_H_

#include <Eigen/Dense>

#include <optional>

namespace trmeval {

// Diagonal ridge added to every sample covariance.
inline constexpr double kCovarianceShrinkage = 1e-6;

struct GaussianSummary {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  int count = 0;
};

// Sample mean and unbiased covariance plus kCovarianceShrinkage * I,
// symmetrized. Throws kInsufficientSamples for fewer than two rows.
GaussianSummary Summarize(const Eigen::MatrixXd& rows);

// Principal square root of a symmetric PSD matrix via eigendecomposition,
// with negative eigenvalues clamped to 0. Throws kInvalidArgument when the
// input is not symmetric.
Eigen::MatrixXd MatrixSqrtPsd(const Eigen::MatrixXd& m);

// Squared Frechet distance between Gaussians:
//   |mu_a - mu_b|^2 + Tr(A) + Tr(B) - 2 Tr sqrt(sqrt(A) B sqrt(A)).
// Clamped at 0.
double FrechetDistance(const GaussianSummary& a, const GaussianSummary& b);

// Half the median pairwise Euclidean distance over all rows; 1 when that
// median is 0.
double MedianHeuristic(const Eigen::MatrixXd& rows);

// exp(-|x - y|^2 / (2 sigma^2))
double RbfKernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                 double sigma);

// Biased MMD^2 estimate with an RBF kernel. When `sigma` is absent it comes
// from MedianHeuristic over the stacked rows of both sets.
double MmdRbf(const Eigen::MatrixXd& candidates,
              const Eigen::MatrixXd& references,
              std::optional<double> sigma = std::nullopt);

}  // namespace trmeval

#endif  // TRMEVAL_KBM_H_
