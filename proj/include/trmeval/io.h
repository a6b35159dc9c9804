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

// On-disk formats. See docs/formats.md for the byte-level description.
//
//   corpus      JSON Lines, {"id", "candidates", "references"} per line
//   embeddings  JSON Lines, header object then {"key", "vector"} per line
//   report      one JSON object, sorted keys, floats at 17 significant digits
//   curve       CSV with header k,hmp,log10_hmp
//
// Loaders reject malformed input instead of repairing it, and every error
// names the offending line.

#ifndef TRMEVAL_IO_H_
#define TRMEVAL_IO_H_

#include <filesystem>
#include <span>
#include <string>

#include "json.hpp"
#include "trmeval/core.h"
#include "trmeval/embedding.h"
#include "trmeval/significance.h"

namespace trmeval {

inline constexpr int kEmbeddingFormatVersion = 1;

// Throws kValidation ("<path>:<line>: ...") on malformed lines, missing or
// extra keys, empty lists, duplicate ids or an empty file; kIo when the file
// cannot be read.
Corpus LoadCorpus(const std::filesystem::path& path);

// Throws kValidation with the line number on a bad header, key, dimension
// or norm; kIo when the file cannot be read.
EmbeddingTable LoadEmbeddings(const std::filesystem::path& path);

// Inverse of LoadCorpus; used to produce fixtures.
void WriteCorpus(const Corpus& corpus, const std::filesystem::path& path);

// Writes vectors at 17 significant digits, entries sorted by key.
void WriteEmbeddings(const EmbeddingTable& table,
                     const std::filesystem::path& path);

// Deterministic JSON text: objects in key order, two-space indent, doubles
// printed with %.17g (and a trailing ".0" when that reads as an integer).
// Throws kInvalidArgument on NaN or infinity.
std::string SerializeJson(const nlohmann::json& value);

void WriteReport(const nlohmann::json& report, const std::filesystem::path& path);
nlohmann::json ReadReport(const std::filesystem::path& path);

void WriteCurve(std::span<const SensitivityRow> rows,
                const std::filesystem::path& path);

// %.17g with the same integer-looking fix-up as SerializeJson.
std::string FormatDouble(double value);

// Writes `contents` to `path`, or to stdout when `path` is "-".
void WriteTextFile(const std::filesystem::path& path, const std::string& contents);

}  // namespace trmeval

#endif  // TRMEVAL_IO_H_
