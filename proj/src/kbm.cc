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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "trmeval/error.h"

namespace trmeval {
namespace {

constexpr double kSymmetryTolerance = 1e-8;

void CheckSameDim(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) {
    throw Error(ErrorCode::kInvalidArgument,
                "embedding dimension mismatch: " + std::to_string(a.cols()) +
                    " vs " + std::to_string(b.cols()));
  }
}

// Sum of sqrt of the (clamped) eigenvalues of a symmetric matrix.
double TraceSqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  double total = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    total += std::sqrt(std::max(0.0, solver.eigenvalues()(i)));
  }
  return total;
}

}  // namespace

GaussianSummary Summarize(const Eigen::MatrixXd& rows) {
  if (rows.rows() < 2) {
    throw Error(ErrorCode::kInsufficientSamples,
                "a Gaussian summary needs at least two vectors");
  }
  GaussianSummary out;
  out.count = static_cast<int>(rows.rows());
  out.mean = rows.colwise().mean().transpose();
  const Eigen::MatrixXd centered = rows.rowwise() - out.mean.transpose();
  Eigen::MatrixXd cov = centered.transpose() * centered / (out.count - 1);
  cov.diagonal().array() += kCovarianceShrinkage;
  out.covariance = (cov + cov.transpose()) / 2.0;
  return out;
}

Eigen::MatrixXd MatrixSqrtPsd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "matrix square root needs a square matrix");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
    throw Error(ErrorCode::kInvalidArgument,
                "matrix square root needs a symmetric matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  const Eigen::VectorXd roots =
      solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd& v = solver.eigenvectors();
  Eigen::MatrixXd out = v * roots.asDiagonal() * v.transpose();
  return (out + out.transpose()) / 2.0;
}

double FrechetDistance(const GaussianSummary& a, const GaussianSummary& b) {
  if (a.mean.size() != b.mean.size() ||
      a.covariance.rows() != b.covariance.rows()) {
    throw Error(ErrorCode::kInvalidArgument,
                "Gaussian summaries have different dimensions");
  }
  const double mean_term = (a.mean - b.mean).squaredNorm();
  const Eigen::MatrixXd root_a = MatrixSqrtPsd(a.covariance);
  Eigen::MatrixXd inner = root_a * b.covariance * root_a;
  inner = (inner + inner.transpose()) / 2.0;
  const double trace_term = a.covariance.trace() + b.covariance.trace() -
                            2.0 * TraceSqrt(inner);
  return std::max(0.0, mean_term + trace_term);
}

double MedianHeuristic(const Eigen::MatrixXd& rows) {
  if (rows.rows() < 2) {
    throw Error(ErrorCode::kInsufficientSamples,
                "the median heuristic needs at least two vectors");
  }
  std::vector<double> dists;
  dists.reserve(rows.rows() * (rows.rows() - 1) / 2);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < rows.rows(); ++j) {
      dists.push_back((rows.row(i) - rows.row(j)).norm());
    }
  }
  std::sort(dists.begin(), dists.end());
  const std::size_t half = dists.size() / 2;
  const double median = dists.size() % 2 == 1
                            ? dists[half]
                            : (dists[half - 1] + dists[half]) / 2.0;
  return median > 0.0 ? median / 2.0 : 1.0;
}

double RbfKernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                 double sigma) {
  return std::exp(-(x - y).squaredNorm() / (2.0 * sigma * sigma));
}

double MmdRbf(const Eigen::MatrixXd& candidates,
              const Eigen::MatrixXd& references, std::optional<double> sigma) {
  if (candidates.rows() < 1 || references.rows() < 1) {
    throw Error(ErrorCode::kInsufficientSamples,
                "MMD needs at least one vector on each side");
  }
  CheckSameDim(candidates, references);
  double s = 0.0;
  if (sigma.has_value()) {
    s = *sigma;
    if (!(s > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sigma must be > 0");
  } else {
    Eigen::MatrixXd joint(candidates.rows() + references.rows(), candidates.cols());
    joint << candidates, references;
    s = MedianHeuristic(joint);
  }

  auto block_mean = [s](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < y.rows(); ++j) {
        total += RbfKernel(x.row(i).transpose(), y.row(j).transpose(), s);
      }
    }
    return total / (static_cast<double>(x.rows()) * y.rows());
  };
  const double mmd = block_mean(candidates, candidates) +
                     block_mean(references, references) -
                     2.0 * block_mean(candidates, references);
  return std::max(0.0, mmd);
}

}  // namespace trmeval
