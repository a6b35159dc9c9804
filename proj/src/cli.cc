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

#include "trmeval/cli.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <thread>
#include <utility>

#include "CLI11.hpp"
#include "trmeval/distances.h"
#include "trmeval/io.h"
#include "trmeval/kbm.h"
#include "trmeval/trm.h"

namespace trmeval {
namespace {

using nlohmann::json;

// Runs fn(i) for i in [0, count) on up to `threads` workers. When several
// calls throw, the exception from the lowest index wins so failures are
// reported the same way for every thread count.
void ParallelFor(std::size_t count, int threads,
                 const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_index = count;
  std::exception_ptr failure;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// Fills in a corpus idf table for cider_d and validates the metric.
StatisticKind ResolveKind(const RunConfig& config, const Corpus& corpus,
                          StatisticFamily family) {
  StatisticKind kind = config.kind;
  kind.family = family;
  if (kind.metric.kind == MetricKind::kCiderD && !kind.metric.idf) {
    kind.metric.idf =
        std::make_shared<const IdfTable>(BuildIdf(corpus, kind.metric.max_n));
  }
  if (family == StatisticFamily::kTrm || family == StatisticFamily::kMeanAgg) {
    kind.metric.Validate();
  }
  return kind;
}

std::optional<EmbeddingTable> MaybeLoadEmbeddings(const RunConfig& config) {
  if (!config.embeddings) return std::nullopt;
  return LoadEmbeddings(*config.embeddings);
}

json MetricConfig(const RunConfig& config) {
  const MetricSpec& m = config.kind.metric;
  json out;
  out["metric"] = std::string(MetricKindName(m.kind));
  switch (m.kind) {
    case MetricKind::kBleu:
      out["max_n"] = m.max_n;
      out["smoothing_eps"] = m.smoothing_eps;
      break;
    case MetricKind::kRougeL:
      out["beta"] = m.beta;
      break;
    case MetricKind::kCiderD:
      out["max_n"] = m.max_n;
      out["sigma_len"] = m.sigma_len;
      break;
    default:
      break;
  }
  out["tie_policy"] = std::string(TiePolicyName(config.kind.trm.tie_policy));
  out["symmetrization"] =
      std::string(SymmetrizationName(config.kind.trm.symmetrization));
  if (config.kind.mmd_sigma) {
    out["mmd_sigma"] = *config.kind.mmd_sigma;
  } else {
    out["mmd_sigma"] = "median";
  }
  return out;
}

json TrmJson(const TrmResult& r) {
  return json{{"i0", r.i0}, {"i1", r.i1}, {"i2", r.i2},
              {"total", r.total}, {"q", r.q}};
}

// Key of a family in the per-instance objects of the score report.
std::string ScoreKey(StatisticFamily family) {
  return std::string(StatisticFamilyName(family));
}

// One statistic value; trm also keeps its triangle counts for the report.
struct ScoreValue {
  double value = 0.0;
  TrmResult trm;
};

ScoreValue ScoreOne(const EvalInstance& instance, const StatisticKind& kind,
                    const EmbeddingTable* embeddings) {
  switch (kind.family) {
    case StatisticFamily::kMeanAgg:
      return {MeanAggregateScore(instance, kind.metric, embeddings), {}};
    case StatisticFamily::kTrm: {
      const TrmResult r =
          TrmStatistic(PairwiseMatrix(instance, kind.metric, embeddings),
                       Partition::Observed(instance.n(), instance.m()),
                       kind.trm);
      return {r.q, r};
    }
    case StatisticFamily::kFrechet:
      return {FrechetDistance(Summarize(embeddings->Rows(instance.candidates)),
                              Summarize(embeddings->Rows(instance.references))),
              {}};
    case StatisticFamily::kMmd:
      return {MmdRbf(embeddings->Rows(instance.candidates),
                     embeddings->Rows(instance.references), kind.mmd_sigma),
              {}};
  }
  return {};
}

std::string CsvField(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

template <typename T>
std::optional<T> ParseOrThrow(std::optional<T> parsed, const std::string& flag,
                              const std::string& value) {
  if (!parsed) {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown value '" + value + "' for " + flag);
  }
  return parsed;
}

}  // namespace

void RunConfig::Validate() const {
  if (pvalue.mode == PValueMode::kMonteCarlo &&
      pvalue.samples < kMinMonteCarloSamples) {
    throw Error(ErrorCode::kInvalidArgument,
                "montecarlo mode needs --samples >= " +
                    std::to_string(kMinMonteCarloSamples));
  }
  if (pvalue.threads < 1) {
    throw Error(ErrorCode::kInvalidArgument, "--threads must be at least 1");
  }
  bool embedding_stat = kind.metric.kind == MetricKind::kEmbeddingCosine;
  if (statistic && (*statistic == StatisticFamily::kFrechet ||
                    *statistic == StatisticFamily::kMmd)) {
    embedding_stat = true;
  }
  if (embedding_stat && !embeddings && command != "validate") {
    throw Error(ErrorCode::kInvalidArgument,
                "this statistic needs --embeddings");
  }
  if (kind.mmd_sigma && !(*kind.mmd_sigma > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "--mmd-sigma must be positive");
  }
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kValidation:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kMissingEmbedding:
      return kExitValidation;
    case ErrorCode::kInsufficientSamples:
    case ErrorCode::kMustUseMonteCarlo:
    case ErrorCode::kIo:
      return kExitRuntime;
  }
  return kExitRuntime;
}

int RunValidate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Corpus corpus;
  try {
    corpus = LoadCorpus(config.corpus);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  }
  std::map<std::size_t, std::size_t> cand_hist;
  std::map<std::size_t, std::size_t> ref_hist;
  for (const auto& instance : corpus.instances) {
    ++cand_hist[instance.n()];
    ++ref_hist[instance.m()];
  }
  auto print_hist = [&](const char* name,
                        const std::map<std::size_t, std::size_t>& hist) {
    out << name << ":";
    for (const auto& [size, count] : hist) out << " " << size << "x" << count;
    out << "\n";
  };
  out << "instances: " << corpus.instances.size() << "\n";
  print_hist("candidates per instance (size x count)", cand_hist);
  print_hist("references per instance (size x count)", ref_hist);

  if (!config.embeddings) {
    if (config.kind.metric.kind == MetricKind::kEmbeddingCosine ||
        (config.statistic && (*config.statistic == StatisticFamily::kFrechet ||
                              *config.statistic == StatisticFamily::kMmd))) {
      err << "error: this statistic needs --embeddings\n";
      return kExitValidation;
    }
    out << "valid\n";
    return kExitOk;
  }
  std::optional<EmbeddingTable> table;
  try {
    table.emplace(LoadEmbeddings(*config.embeddings));
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  }
  std::set<std::string> seen;
  std::size_t missing = 0;
  for (const auto& instance : corpus.instances) {
    for (const auto* group : {&instance.candidates, &instance.references}) {
      for (const auto& u : *group) {
        const std::string key = TextKey(u.raw());
        if (!seen.insert(key).second || table->FindKey(key)) continue;
        ++missing;
        err << "missing embedding " << key << " for text " << json(u.raw()).dump()
            << " (instance " << json(instance.id).dump() << ")\n";
      }
    }
  }
  out << "embeddings: " << table->size() << " vectors, dim " << table->dim()
      << ", " << missing << " missing\n";
  if (missing > 0) return kExitValidation;
  out << "valid\n";
  return kExitOk;
}

json ScoreReport(const RunConfig& config, const Corpus& corpus,
                 const EmbeddingTable* embeddings) {
  std::vector<StatisticFamily> families;
  if (config.statistic) {
    families.push_back(*config.statistic);
  } else {
    families = {StatisticFamily::kMeanAgg, StatisticFamily::kTrm};
    if (embeddings) {
      families.push_back(StatisticFamily::kFrechet);
      families.push_back(StatisticFamily::kMmd);
    }
  }

  const std::size_t count = corpus.instances.size();
  std::vector<json> rows(count);
  for (std::size_t i = 0; i < count; ++i) {
    rows[i]["id"] = corpus.instances[i].id;
    rows[i]["n"] = corpus.instances[i].n();
    rows[i]["m"] = corpus.instances[i].m();
  }
  json means = json::object();
  json timing = json::object();
  json labels = json::array();
  for (StatisticFamily family : families) {
    const StatisticKind kind = ResolveKind(config, corpus, family);
    if (kind.needs_embeddings() && embeddings == nullptr) {
      throw Error(ErrorCode::kInvalidArgument,
                  kind.Label() + " requires an embedding table");
    }
    const std::string key = ScoreKey(family);
    std::vector<ScoreValue> values(count);
    const auto start = std::chrono::steady_clock::now();
    ParallelFor(count, config.pvalue.threads, [&](std::size_t i) {
      const EvalInstance& instance = corpus.instances[i];
      try {
        values[i] = ScoreOne(instance, kind, embeddings);
      } catch (const Error& e) {
        throw Error(e.code(), "instance '" + instance.id + "': " + e.what());
      }
    });
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    double sum = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      rows[i][key] = family == StatisticFamily::kTrm ? TrmJson(values[i].trm)
                                                     : json(values[i].value);
      sum += values[i].value;
    }
    means[family == StatisticFamily::kTrm ? "trm_q" : key] =
        sum / static_cast<double>(count);
    labels.push_back(kind.Label());
    timing[kind.Label()] = json{
        {"seconds", seconds},
        {"instances_per_sec",
         seconds > 0.0 ? static_cast<double>(count) / seconds : 0.0}};
  }

  json report;
  report["tool_version"] = kToolVersion;
  report["command"] = "score";
  report["config"] = MetricConfig(config);
  report["statistics"] = labels;
  report["instances"] = rows;
  report["means"] = means;
  if (config.timing) report["timing"] = timing;
  return report;
}

json PValueReport(const RunConfig& config, const Corpus& corpus,
                  const EmbeddingTable* embeddings) {
  const StatisticKind kind = ResolveKind(
      config, corpus, config.statistic.value_or(StatisticFamily::kTrm));
  const CorpusSignificance sig =
      TestCorpus(corpus, kind, config.pvalue, embeddings);
  json rows = json::array();
  double observed_sum = 0.0;
  for (const auto& s : sig.instances) {
    rows.push_back(json{{"id", s.id},
                        {"observed", s.observed},
                        {"p", s.p},
                        {"log10_p", s.log10_p},
                        {"mode", std::string(PValueModeName(s.mode))},
                        {"evaluations", s.evaluations},
                        {"extreme_count", s.extreme_count}});
    observed_sum += s.observed;
  }
  json cfg = MetricConfig(config);
  cfg["mode"] = std::string(PValueModeName(config.pvalue.mode));
  if (config.pvalue.mode == PValueMode::kMonteCarlo) {
    cfg["samples"] = config.pvalue.samples;
    cfg["seed"] = config.pvalue.seed;
  } else {
    cfg["exact_limit"] = config.pvalue.exact_limit;
  }
  json report;
  report["tool_version"] = kToolVersion;
  report["command"] = "pvalue";
  report["config"] = cfg;
  report["statistic"] = kind.Label();
  report["instances"] = rows;
  report["hmp"] = sig.hmp;
  report["log10_hmp"] = sig.log10_hmp;
  report["mean_observed"] =
      observed_sum / static_cast<double>(sig.instances.size());
  return report;
}

std::string DistancesCsv(const EvalInstance& instance, const MetricSpec& spec,
                         const EmbeddingTable* embeddings) {
  const DistanceMatrix matrix = PairwiseMatrix(instance, spec, embeddings);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < matrix.n(); ++i) names.push_back("c" + std::to_string(i));
  for (std::size_t j = 0; j < matrix.m(); ++j) names.push_back("r" + std::to_string(j));
  std::string out = "label,text";
  for (const auto& name : names) out += "," + name;
  out += "\n";
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    out += names[i] + "," + CsvField(matrix.labels()[i]);
    for (std::size_t j = 0; j < matrix.size(); ++j) {
      out += "," + FormatDouble(matrix(i, j));
    }
    out += "\n";
  }
  return out;
}

void RunScore(const RunConfig& config) {
  config.Validate();
  const Corpus corpus = LoadCorpus(config.corpus);
  const auto table = MaybeLoadEmbeddings(config);
  WriteReport(ScoreReport(config, corpus, table ? &*table : nullptr), config.out);
}

void RunPValue(const RunConfig& config) {
  config.Validate();
  const Corpus corpus = LoadCorpus(config.corpus);
  const auto table = MaybeLoadEmbeddings(config);
  WriteReport(PValueReport(config, corpus, table ? &*table : nullptr),
              config.out);
}

void RunSensitivity(const RunConfig& config) {
  config.Validate();
  if (config.k_max == 0) {
    throw Error(ErrorCode::kInvalidArgument, "--k-max must be at least 1");
  }
  const Corpus corpus = LoadCorpus(config.corpus);
  const auto table = MaybeLoadEmbeddings(config);
  const StatisticKind kind = ResolveKind(
      config, corpus, config.statistic.value_or(StatisticFamily::kTrm));
  const auto rows = SensitivityCurve(corpus, kind, config.k_max, config.pvalue,
                                     table ? &*table : nullptr);
  WriteCurve(rows, config.out);
}

void RunDistances(const RunConfig& config) {
  config.Validate();
  const Corpus corpus = LoadCorpus(config.corpus);
  const EvalInstance* instance = corpus.Find(config.instance_id);
  if (instance == nullptr) {
    throw Error(ErrorCode::kValidation,
                "unknown instance id '" + config.instance_id + "'");
  }
  const auto table = MaybeLoadEmbeddings(config);
  const StatisticKind kind =
      ResolveKind(config, corpus, StatisticFamily::kTrm);
  WriteTextFile(config.out,
                DistancesCsv(*instance, kind.metric, table ? &*table : nullptr));
}

int RunMain(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Set-versus-set evaluation of generated text."};
  app.name("trmeval");
  app.require_subcommand(1);

  RunConfig config;
  std::string corpus;
  std::string embeddings;
  std::string output = "-";
  std::string metric = "meteor_lite";
  std::string statistic;
  std::string mode = "exact";
  std::string tie_policy = "fractional";
  std::string symmetrization = "average";
  double mmd_sigma = 0.0;
  bool no_timing = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--corpus", corpus, "Corpus JSON Lines file")->required();
    sub->add_option("--embeddings", embeddings, "Embedding JSON Lines file");
    sub->add_option("--metric", metric,
                    "bleu|rouge_l|meteor_lite|cider_d|embedding_cosine")
        ->capture_default_str();
    sub->add_option("--statistic", statistic, "trm|mean_agg|frechet|mmd");
    sub->add_option("--tie-policy", tie_policy, "fractional|inclusive")
        ->capture_default_str();
    sub->add_option("--symmetrization", symmetrization, "average|directed-both")
        ->capture_default_str();
    sub->add_option("--max-n", config.kind.metric.max_n,
                    "Largest n-gram order for bleu and cider_d")
        ->capture_default_str();
    sub->add_option("--bleu-eps", config.kind.metric.smoothing_eps,
                    "Floor for zero n-gram matches in bleu")
        ->capture_default_str();
    sub->add_option("--rouge-beta", config.kind.metric.beta,
                    "Recall weight for rouge_l")
        ->capture_default_str();
    sub->add_option("--cider-sigma", config.kind.metric.sigma_len,
                    "Length penalty width for cider_d")
        ->capture_default_str();
    sub->add_option("--mmd-sigma", mmd_sigma,
                    "RBF bandwidth for mmd (median heuristic when omitted)");
    sub->add_option("--threads", config.pvalue.threads, "Worker threads")
        ->capture_default_str();
  };
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--out", output, "Output path, - for stdout")
        ->capture_default_str();
  };
  auto add_pvalue = [&](CLI::App* sub) {
    sub->add_option("--mode", mode, "exact|montecarlo")->capture_default_str();
    sub->add_option("--samples", config.pvalue.samples,
                    "Monte-Carlo draws per instance")
        ->capture_default_str();
    sub->add_option("--seed", config.pvalue.seed, "Monte-Carlo seed")
        ->capture_default_str();
    sub->add_option("--exact-limit", config.pvalue.exact_limit,
                    "Largest partition count enumerated in exact mode")
        ->capture_default_str();
  };

  CLI::App* validate = app.add_subcommand("validate", "Check inputs");
  add_common(validate);
  CLI::App* score = app.add_subcommand("score", "Per-instance statistics");
  add_common(score);
  add_output(score);
  score->add_flag("--no-timing", no_timing, "Omit wall-clock timing");
  CLI::App* pvalue = app.add_subcommand("pvalue", "Permutation p-values");
  add_common(pvalue);
  add_output(pvalue);
  add_pvalue(pvalue);
  CLI::App* sensitivity =
      app.add_subcommand("sensitivity", "p-value curve over candidate count");
  add_common(sensitivity);
  add_output(sensitivity);
  add_pvalue(sensitivity);
  sensitivity->add_option("--k-max", config.k_max, "Largest candidate count")
      ->required();
  CLI::App* distances =
      app.add_subcommand("distances", "Dump one distance matrix");
  add_common(distances);
  add_output(distances);
  distances->add_option("--instance", config.instance_id, "Instance id")
      ->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    for (CLI::App* sub : app.get_subcommands()) config.command = sub->get_name();
    config.corpus = corpus;
    if (!embeddings.empty()) config.embeddings = embeddings;
    config.out = output;
    config.timing = !no_timing;
    config.kind.metric.kind = *ParseOrThrow(ParseMetricKind(metric), "--metric", metric);
    if (!statistic.empty()) {
      config.statistic =
          ParseOrThrow(ParseStatisticFamily(statistic), "--statistic", statistic);
    }
    config.pvalue.mode = *ParseOrThrow(ParsePValueMode(mode), "--mode", mode);
    config.kind.trm.tie_policy =
        *ParseOrThrow(ParseTiePolicy(tie_policy), "--tie-policy", tie_policy);
    config.kind.trm.symmetrization = *ParseOrThrow(
        ParseSymmetrization(symmetrization), "--symmetrization", symmetrization);
    if (mmd_sigma != 0.0) config.kind.mmd_sigma = mmd_sigma;
    config.Validate();

    if (config.command == "validate") return RunValidate(config, out, err);
    if (config.command == "score") RunScore(config);
    if (config.command == "pvalue") RunPValue(config);
    if (config.command == "sensitivity") RunSensitivity(config);
    if (config.command == "distances") RunDistances(config);
    return kExitOk;
  } catch (const Error& e) {
    err << "error (" << ErrorCodeName(e.code()) << "): " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace trmeval
