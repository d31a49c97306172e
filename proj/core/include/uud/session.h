// Copyright 2026 The uudiscover Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Session configuration and the end-to-end pipeline:
// ingest -> discretize -> mine -> tune lambda -> partition -> explore ->
// report.

#ifndef UUD_SESSION_H_
#define UUD_SESSION_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uud/bandit.h"
#include "uud/corpus.h"
#include "uud/dsp.h"
#include "uud/oracle.h"
#include "uud/patterns.h"

namespace uud {

struct MinerConfig {
  // 0 selects max(2, ceil(0.05 * |search space|)).
  std::size_t min_support = 0;
  std::size_t max_length = 3;
  int bins = 4;
};

struct LambdaConfig {
  bool tune = true;
  std::vector<double> grid = DefaultLambdaGrid();
  double validation_fraction = 0.05;
  LambdaWeights fixed;  // used when tune is false
};

struct CostConfig {
  std::string kind = "uniform";  // uniform | variable | column
  // Range for the variable model; taken from the data when absent.
  std::optional<double> min_length;
  std::optional<double> max_length;
};

enum class OracleMode { kSimulated, kInteractive };

struct SessionConfig {
  std::filesystem::path instances;
  std::filesystem::path schema;
  std::filesystem::path training;  // optional; similarity baselines only
  std::string critical_class;
  double tau = kDefaultTau;
  double gamma = kDefaultGamma;
  double budget_fraction = 0.2;
  std::optional<std::size_t> budget;
  std::string policy = "uub";
  MinerConfig miner;
  LambdaConfig lambda;
  unsigned long long seed = 0;
  OracleMode oracle = OracleMode::kSimulated;
  CostConfig cost;
  std::filesystem::path output_dir = "uud-out";

  // Throws ConfigError / ValidationError naming the offending field.
  void Validate() const;
};

// JSON object with the fields above; unknown keys are rejected. Relative
// paths are resolved against `base_dir`. Interactive sessions default to the
// uniform cost model.
SessionConfig ParseSessionConfig(const std::string& json_text,
                                 const std::filesystem::path& base_dir);
SessionConfig LoadSessionConfig(const std::filesystem::path& path);
std::string SessionConfigToJson(const SessionConfig& config);

std::string OracleModeName(OracleMode mode);

// Everything computed before exploration starts.
struct PreparedSession {
  Dataset dataset;         // as loaded (raw feature values)
  SearchSpace raw_space;   // undiscretized, for display and baselines
  SearchSpace space;       // discretized, for mining and partitioning
  PatternSet patterns;
  std::optional<TuneResult> tuning;
  Partitioning partitioning;
  std::vector<std::vector<std::string>> arms;
  std::size_t budget = 0;
  CostModel cost_model;
  std::vector<std::string> warnings;
};

PreparedSession Prepare(const SessionConfig& config, Dataset dataset);
PreparedSession Prepare(const SessionConfig& config);

struct RunOutcome {
  PreparedSession prepared;
  ExplorationTrace trace;
  std::string summary_json;
};

// Explores with the simulated oracle.
RunOutcome RunSimulated(const SessionConfig& config, PreparedSession prepared);

// Summary of a finished or partial exploration: budget, steps, discovered
// unknown unknowns per partition, total utility.
std::string SummaryJson(const SessionConfig& config,
                        const PreparedSession& prepared,
                        const ExplorationTrace& trace);

// Writes partitions.tsv, trace.jsonl and summary.json into the output
// directory. Each file is written to a temporary name and renamed, so a
// failed run never leaves a truncated artifact behind.
void WriteRunArtifacts(const SessionConfig& config, const RunOutcome& outcome);

}  // namespace uud

#endif  // UUD_SESSION_H_
