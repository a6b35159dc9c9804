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

#ifndef TRMEVAL_EMBEDDING_H_
#define TRMEVAL_EMBEDDING_H_

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>

#include "trmeval/core.h"

namespace trmeval {

// Lowercase hex SHA-256 of the raw UTF-8 bytes. This is the join key between
// corpus texts and embedding vectors.
std::string TextKey(std::string_view raw);

bool IsTextKey(std::string_view key);

inline constexpr double kUnitNormTolerance = 1e-4;

struct EmbeddingHeader {
  int format_version = 1;
  int dim = 0;
  std::string encoder_name;
  std::string pooling;
};

// Sentence vectors keyed by TextKey. Every stored vector is finite and has
// unit L2 norm within kUnitNormTolerance; Insert enforces both.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(EmbeddingHeader header);

  const EmbeddingHeader& header() const { return header_; }
  int dim() const { return header_.dim; }
  std::size_t size() const { return entries_.size(); }

  // Throws kInvalidArgument on a malformed key, wrong dimension, non-finite
  // entry, bad norm or duplicate key.
  void Insert(std::string key, Eigen::VectorXd vector);

  const Eigen::VectorXd* FindKey(std::string_view key) const;
  const std::unordered_map<std::string, Eigen::VectorXd>& entries() const {
    return entries_;
  }

  // Throws kMissingEmbedding naming the key when the text is absent.
  const Eigen::VectorXd& Lookup(std::string_view raw) const;

  // One row per utterance, in order.
  Eigen::MatrixXd Rows(std::span<const Utterance> utterances) const;

 private:
  EmbeddingHeader header_;
  std::unordered_map<std::string, Eigen::VectorXd> entries_;
};

}  // namespace trmeval

#endif  // TRMEVAL_EMBEDDING_H_
