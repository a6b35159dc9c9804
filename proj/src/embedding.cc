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

#include "trmeval/embedding.h"

#include <openssl/evp.h>

#include <cmath>
#include <utility>

#include "trmeval/error.h"

namespace trmeval {

std::string TextKey(std::string_view raw) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(raw.data(), raw.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(ErrorCode::kIo, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

bool IsTextKey(std::string_view key) {
  if (key.size() != 64) return false;
  for (char c : key) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

EmbeddingTable::EmbeddingTable(EmbeddingHeader header)
    : header_(std::move(header)) {
  if (header_.dim <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "embedding dimension must be positive");
  }
}

void EmbeddingTable::Insert(std::string key, Eigen::VectorXd vector) {
  if (!IsTextKey(key)) {
    throw Error(ErrorCode::kInvalidArgument,
                "embedding key is not 64 lowercase hex characters: '" + key +
                    "'");
  }
  if (vector.size() != header_.dim) {
    throw Error(ErrorCode::kInvalidArgument,
                "embedding vector has length " +
                    std::to_string(vector.size()) + ", expected " +
                    std::to_string(header_.dim));
  }
  if (!vector.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument,
                "embedding vector has a non-finite entry");
  }
  const double norm = vector.norm();
  if (std::abs(norm - 1.0) > kUnitNormTolerance) {
    throw Error(ErrorCode::kInvalidArgument,
                "embedding vector norm " + std::to_string(norm) +
                    " is not within 1e-4 of 1");
  }
  if (!entries_.emplace(key, std::move(vector)).second) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate embedding key " + key);
  }
}

const Eigen::VectorXd* EmbeddingTable::FindKey(std::string_view key) const {
  auto it = entries_.find(std::string(key));
  return it == entries_.end() ? nullptr : &it->second;
}

const Eigen::VectorXd& EmbeddingTable::Lookup(std::string_view raw) const {
  const std::string key = TextKey(raw);
  if (const auto* v = FindKey(key)) return *v;
  throw Error(ErrorCode::kMissingEmbedding,
              "missing embedding for key " + key + " (text \"" +
                  std::string(raw) + "\")");
}

Eigen::MatrixXd EmbeddingTable::Rows(
    std::span<const Utterance> utterances) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(utterances.size()),
                      header_.dim);
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = Lookup(utterances[i].raw());
  }
  return out;
}

}  // namespace trmeval
