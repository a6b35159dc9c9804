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

// Command-line surface. Every command reads explicit flags only, and with a
// fixed seed writes byte-identical output for any thread count.
//
//   validate     check a corpus (and embeddings) and summarize it
//   score        per-instance statistic values and corpus means
//   pvalue       per-instance permutation p-values and their harmonic mean
//   sensitivity  harmonic-mean p-value as candidates are added, as CSV
//   distances    one instance's labelled distance matrix, as CSV
//
// Exit status: 0 success, 1 invalid input, 2 runtime failure.

#ifndef TRMEVAL_CLI_H_
#define TRMEVAL_CLI_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "trmeval/core.h"
#include "trmeval/embedding.h"
#include "trmeval/error.h"
#include "trmeval/significance.h"

namespace trmeval {

inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

struct RunConfig {
  std::string command;
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> embeddings;
  std::filesystem::path out = "-";
  // For score, absent means every statistic the inputs allow.
  std::optional<StatisticFamily> statistic;
  StatisticKind kind;  // metric, tie policy, symmetrization, mmd sigma
  PValueConfig pvalue;
  std::size_t k_max = 0;
  std::string instance_id;
  bool timing = true;

  // Throws kInvalidArgument when montecarlo has fewer than
  // kMinMonteCarloSamples samples or an embedding statistic has no
  // embeddings path.
  void Validate() const;
};

int ExitCodeFor(ErrorCode code);

// Returns the exit status. Summary lines go to `out`, problems to `err`.
int RunValidate(const RunConfig& config, std::ostream& out, std::ostream& err);

// The report objects written by score and pvalue. Pure functions of their
// inputs apart from the optional timing block.
nlohmann::json ScoreReport(const RunConfig& config, const Corpus& corpus,
                           const EmbeddingTable* embeddings);
nlohmann::json PValueReport(const RunConfig& config, const Corpus& corpus,
                            const EmbeddingTable* embeddings);

// label,text,<label>... with one row per candidate then reference.
std::string DistancesCsv(const EvalInstance& instance, const MetricSpec& spec,
                         const EmbeddingTable* embeddings);

void RunScore(const RunConfig& config);
void RunPValue(const RunConfig& config);
void RunSensitivity(const RunConfig& config);
void RunDistances(const RunConfig& config);

// Parses `args` (without the program name), runs the command and maps
// failures onto exit codes.
int RunMain(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace trmeval

#endif  // TRMEVAL_CLI_H_
