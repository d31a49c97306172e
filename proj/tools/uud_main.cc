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

// uud: command line front end.
//
//   uud run --config c.json [--seed 7]
//   uud partition --config c.json
//   uud eval-entropy --config c.json [--trials 50]
//   uud eval-regret --config c.json --policies uub,random,ucb1 --runs 100
//   uud eval-baselines --config c.json --runs 100
//   uud generate --kind bias --seed 1 --out-dir data/
//   uud plot-regret --input regret.tsv --output regret.svg
//   uud serve [--port 8080] [--data-dir sessions/]

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uud/corpus.h"
#include "uud/error.h"
#include "uud/eval.h"
#include "uud/service.h"
#include "uud/session.h"
#include "uud/text.h"

namespace {

using uud::SessionConfig;

struct CommonFlags {
  std::string config_path;
  std::optional<unsigned long long> seed;
  std::optional<std::string> policy;
  std::optional<std::string> output_dir;
  std::optional<std::size_t> budget;
};

void AddCommonFlags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Session config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "Override the config seed");
  cmd->add_option("--policy", flags.policy, "Override the exploration policy");
  cmd->add_option("--output-dir", flags.output_dir,
                  "Override the output directory");
  cmd->add_option("--budget", flags.budget, "Absolute query budget");
}

SessionConfig LoadConfig(const CommonFlags& flags) {
  SessionConfig config = uud::LoadSessionConfig(flags.config_path);
  if (flags.seed) config.seed = *flags.seed;
  if (flags.policy) config.policy = *flags.policy;
  if (flags.output_dir) config.output_dir = *flags.output_dir;
  if (flags.budget) config.budget = *flags.budget;
  config.Validate();
  return config;
}

void PrintWarnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

int Run(const CommonFlags& flags) {
  const SessionConfig config = LoadConfig(flags);
  if (config.oracle == uud::OracleMode::kInteractive) {
    throw uud::ConfigError(
        "interactive sessions are driven through `uud serve`");
  }
  uud::PreparedSession prepared = uud::Prepare(config);
  PrintWarnings(prepared.warnings);
  const uud::RunOutcome outcome =
      uud::RunSimulated(config, std::move(prepared));
  uud::WriteRunArtifacts(config, outcome);
  std::cout << "partitions: " << outcome.prepared.partitioning.size()
            << "  steps: " << outcome.trace.steps.size() << "/"
            << outcome.prepared.budget
            << "  total utility: " << uud::FormatFixed(outcome.trace.total_utility(), 4)
            << (outcome.trace.truncated ? "  (truncated)" : "") << "\n";
  std::cout << "wrote " << (config.output_dir / "summary.json").string()
            << "\n";
  return 0;
}

int Partition(const CommonFlags& flags) {
  const SessionConfig config = LoadConfig(flags);
  const uud::PreparedSession prepared = uud::Prepare(config);
  PrintWarnings(prepared.warnings);
  const std::string report =
      uud::FormatPartitioningReport(prepared.partitioning, prepared.space);
  uud::WriteFileAtomic(config.output_dir / "partitions.tsv", report);
  uud::WriteFileAtomic(config.output_dir / "patterns.txt",
                       uud::FormatPatternSet(prepared.patterns, prepared.space));
  std::cout << report;
  return 0;
}

int EvalEntropy(const CommonFlags& flags, std::size_t trials) {
  const SessionConfig config = LoadConfig(flags);
  const uud::PreparedSession prepared = uud::Prepare(config);
  PrintWarnings(prepared.warnings);
  const uud::EntropyReport report = uud::CompareEntropy(
      prepared.partitioning, prepared.space, prepared.raw_space,
      prepared.dataset.truth, trials, config.seed);
  if (report.empty) std::cerr << "warning: no unknown unknowns in the space\n";
  std::cout << "# partitions=" << prepared.partitioning.size()
            << " unknown_unknowns_per_partition=";
  for (std::size_t i = 0; i < report.uu_counts.size(); ++i) {
    std::cout << (i ? "," : "") << report.uu_counts[i];
  }
  std::cout << "\n" << uud::FormatEntropyTable(report);
  return 0;
}

std::vector<double> OptimalMean(const SessionConfig& config,
                                const uud::PreparedSession& prepared,
                                uud::SimulatedOracle& oracle,
                                std::size_t runs) {
  const uud::UtilityConfig utility{config.gamma, config.critical_class};
  return uud::MeanCumulativeUtility(uud::RunMany(
      [&]() -> std::unique_ptr<uud::Policy> {
        return uud::OptimalPolicy::FromOracle(oracle, prepared.space,
                                              config.gamma);
      },
      prepared.arms, oracle, utility, prepared.budget, runs, config.seed));
}

std::vector<uud::RegretCurve> RegretCurves(
    const SessionConfig& config, const uud::PreparedSession& prepared,
    uud::SimulatedOracle& oracle, const std::vector<double>& optimal,
    const std::vector<std::string>& policies, std::size_t runs) {
  const uud::UtilityConfig utility{config.gamma, config.critical_class};
  std::vector<uud::RegretCurve> curves;
  for (const std::string& name : policies) {
    const uud::PolicySpec spec = uud::PolicySpec::Parse(name);
    const auto traces = uud::RunMany([&] { return uud::MakePolicy(spec); },
                                     prepared.arms, oracle, utility,
                                     prepared.budget, runs, config.seed);
    curves.push_back(uud::CumulativeRegret(
        spec.Name(), uud::MeanCumulativeUtility(traces), optimal, runs));
  }
  return curves;
}

void WriteCurves(const std::vector<uud::RegretCurve>& curves,
                 const std::string& table_path, const std::string& svg_path,
                 const std::string& title) {
  if (!table_path.empty()) {
    uud::WriteFileAtomic(table_path, uud::FormatRegretTable(curves));
  }
  if (!svg_path.empty()) {
    uud::WriteFileAtomic(svg_path, uud::RenderRegretSvg(curves, title));
  }
}

void PrintFinalRegret(const std::vector<uud::RegretCurve>& curves,
                      std::size_t budget) {
  std::cout << "# budget=" << budget << " runs="
            << (curves.empty() ? 0 : curves.front().run_count) << "\n";
  std::cout << "policy\tfinal_regret\n";
  for (const auto& c : curves) {
    std::cout << c.policy << "\t" << uud::FormatFixed(c.final_regret(), 4)
              << "\n";
  }
}

int EvalRegret(const CommonFlags& flags, const std::string& policy_list,
               std::size_t runs, const std::string& table_path,
               const std::string& svg_path) {
  const SessionConfig config = LoadConfig(flags);
  const uud::PreparedSession prepared = uud::Prepare(config);
  PrintWarnings(prepared.warnings);
  std::vector<std::string> policies;
  for (const std::string& p : uud::Split(policy_list, ',')) {
    if (!uud::Trim(p).empty()) policies.emplace_back(uud::Trim(p));
  }
  if (policies.empty()) throw uud::ConfigError("no policies given");
  uud::SimulatedOracle oracle(prepared.space, prepared.dataset.truth,
                              prepared.cost_model, prepared.budget);
  const std::vector<double> optimal =
      OptimalMean(config, prepared, oracle, runs);
  const auto curves =
      RegretCurves(config, prepared, oracle, optimal, policies, runs);
  PrintFinalRegret(curves, prepared.budget);
  WriteCurves(curves, table_path, svg_path, "Cumulative regret");
  return 0;
}

int EvalBaselines(const CommonFlags& flags, std::size_t runs,
                  const std::string& table_path, const std::string& svg_path) {
  const SessionConfig config = LoadConfig(flags);
  const uud::PreparedSession prepared = uud::Prepare(config);
  PrintWarnings(prepared.warnings);
  std::vector<uud::Instance> training;
  if (!config.training.empty()) {
    training = uud::LoadFeatureRows(config.training, prepared.raw_space.schema);
  }
  uud::SimulatedOracle oracle(prepared.space, prepared.dataset.truth,
                              prepared.cost_model, prepared.budget);
  const uud::UtilityConfig utility{config.gamma, config.critical_class};
  const std::vector<double> optimal =
      OptimalMean(config, prepared, oracle, runs);
  std::vector<uud::RegretCurve> curves = RegretCurves(
      config, prepared, oracle, optimal, {config.policy}, runs);
  for (uud::BaselineKind kind : uud::AllBaselineKinds()) {
    const bool needs_training = kind == uud::BaselineKind::kLeastAverageSimilarity ||
                                kind == uud::BaselineKind::kLeastMaximumSimilarity;
    if (needs_training && training.empty()) {
      std::cerr << "skipping " << uud::BaselineKindName(kind)
                << ": config has no training file\n";
      continue;
    }
    std::vector<uud::ExplorationTrace> traces;
    for (std::size_t r = 0; r < runs; ++r) {
      oracle.Reset(prepared.budget);
      traces.push_back(uud::BaselineTrace(kind, prepared.raw_space, training,
                                          oracle, utility, prepared.budget,
                                          config.seed + r));
    }
    curves.push_back(uud::CumulativeRegret(uud::BaselineKindName(kind),
                                           uud::MeanCumulativeUtility(traces),
                                           optimal, runs));
  }
  PrintFinalRegret(curves, prepared.budget);
  WriteCurves(curves, table_path, svg_path, "End-to-end cumulative regret");
  return 0;
}

int Generate(const std::string& kind, unsigned long long seed,
             const std::filesystem::path& out_dir) {
  uud::GeneratedData data;
  if (kind == "bias") {
    data = uud::InjectBias(uud::DefaultBiasConfig(), seed);
  } else if (kind == "skewed") {
    data = uud::GenerateSkewed(uud::SkewedConfig{}, seed);
  } else {
    throw uud::ConfigError("unknown generator '" + kind +
                           "' (expected bias or skewed)");
  }
  std::ostringstream instances;
  uud::WriteDataset(instances, data.dataset.schema, data.dataset.instances,
                    &data.dataset.truth);
  std::ostringstream training;
  uud::WriteFeatureRows(training, data.dataset.schema, data.training);
  uud::WriteFileAtomic(out_dir / "schema.json",
                       uud::SchemaToJson(data.dataset.schema));
  uud::WriteFileAtomic(out_dir / "instances.csv", instances.str());
  uud::WriteFileAtomic(out_dir / "training.csv", training.str());
  SessionConfig config;
  config.instances = "instances.csv";
  config.schema = "schema.json";
  config.training = "training.csv";
  config.critical_class = data.critical_class;
  config.seed = seed;
  config.output_dir = "out";
  uud::WriteFileAtomic(out_dir / "config.json",
                       uud::SessionConfigToJson(config) + "\n");
  std::cout << "wrote " << data.dataset.instances.size() << " instances and "
            << data.training.size() << " training rows to " << out_dir.string()
            << "\n";
  return 0;
}

int PlotRegret(const std::string& input, const std::string& output,
               const std::string& title) {
  std::istringstream in(uud::ReadFile(input));
  std::string line;
  std::vector<uud::RegretCurve> curves;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> cells = uud::Split(line, '\t');
    if (curves.empty()) {
      if (cells.empty() || cells[0] != "step") {
        throw uud::ParseError(input, line_no, "expected a 'step' header");
      }
      for (std::size_t c = 1; c < cells.size(); ++c) {
        curves.push_back(uud::RegretCurve{cells[c], 0, {}});
      }
      continue;
    }
    for (std::size_t c = 1; c < cells.size() && c <= curves.size(); ++c) {
      if (cells[c].empty()) continue;
      try {
        curves[c - 1].mean_cumulative_regret.push_back(std::stod(cells[c]));
      } catch (const std::exception&) {
        throw uud::ParseError(input, line_no, "bad number '" + cells[c] + "'");
      }
    }
  }
  if (curves.empty()) throw uud::ParseError(input, 0, "no curves found");
  uud::WriteFileAtomic(output, uud::RenderRegretSvg(curves, title));
  return 0;
}

uud::Service* g_service = nullptr;

void HandleSignal(int) {
  if (g_service != nullptr) g_service->Stop();
}

int Serve(uud::ServiceOptions options) {
  uud::SessionManager sessions(options.data_dir);
  for (const std::string& e : sessions.load_errors()) {
    std::cerr << "warning: could not reopen session " << e << "\n";
  }
  uud::Service service(sessions);
  g_service = &service;
  std::signal(SIGINT, HandleSignal);
  std::signal(SIGTERM, HandleSignal);
  std::cout << "serving " << sessions.Ids().size() << " session(s) from "
            << options.data_dir.string() << " on " << options.host << ":"
            << options.port << std::endl;
  const bool ok = service.Listen(options.host, options.port);
  g_service = nullptr;
  if (!ok) {
    std::cerr << "error: cannot listen on " << options.host << ":"
              << options.port << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discover confident model mistakes with a labeling budget"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  auto* run = app.add_subcommand("run", "Partition, explore and report");
  AddCommonFlags(run, run_flags);

  CommonFlags partition_flags;
  auto* partition =
      app.add_subcommand("partition", "Mine patterns and partition only");
  AddCommonFlags(partition, partition_flags);

  CommonFlags entropy_flags;
  std::size_t trials = 50;
  auto* entropy = app.add_subcommand(
      "eval-entropy", "Entropy of partitions against k-means and random");
  AddCommonFlags(entropy, entropy_flags);
  entropy->add_option("--trials", trials, "Random reassignment trials")
      ->check(CLI::PositiveNumber);

  CommonFlags regret_flags;
  std::string policies = "uub,random,ucb1";
  std::size_t runs = 100;
  std::string table_path;
  std::string svg_path;
  auto* regret =
      app.add_subcommand("eval-regret", "Cumulative regret of policies");
  AddCommonFlags(regret, regret_flags);
  regret->add_option("--policies", policies, "Comma separated policy list");
  regret->add_option("--runs", runs, "Runs to average")
      ->check(CLI::PositiveNumber);
  regret->add_option("--table", table_path, "Write per-step regret table");
  regret->add_option("--svg", svg_path, "Write an SVG plot");

  CommonFlags baseline_flags;
  auto* baselines = app.add_subcommand(
      "eval-baselines", "Configured policy against ranking baselines");
  AddCommonFlags(baselines, baseline_flags);
  baselines->add_option("--runs", runs, "Runs to average")
      ->check(CLI::PositiveNumber);
  baselines->add_option("--table", table_path, "Write per-step regret table");
  baselines->add_option("--svg", svg_path, "Write an SVG plot");

  std::string kind = "bias";
  unsigned long long gen_seed = 1;
  std::string out_dir = "data";
  auto* generate =
      app.add_subcommand("generate", "Write a synthetic benchmark");
  generate->add_option("--kind", kind, "bias or skewed")
      ->check(CLI::IsMember({"bias", "skewed"}));
  generate->add_option("--seed", gen_seed, "Generator seed");
  generate->add_option("--out-dir", out_dir, "Output directory");

  std::string plot_input;
  std::string plot_output = "regret.svg";
  std::string plot_title = "Cumulative regret";
  auto* plot = app.add_subcommand("plot-regret", "Render a regret table");
  plot->add_option("--input", plot_input, "Table from eval-regret --table")
      ->required()
      ->check(CLI::ExistingFile);
  plot->add_option("--output", plot_output, "SVG path");
  plot->add_option("--title", plot_title, "Plot title");

  uud::ServiceOptions serve_options;
  std::optional<int> port;
  std::optional<std::string> data_dir;
  std::string host = serve_options.host;
  auto* serve = app.add_subcommand(
      "serve", "HTTP service for interactive sessions (env UUD_PORT, "
               "UUD_DATA_DIR)");
  serve->add_option("--port", port, "Port (default 8080)");
  serve->add_option("--data-dir", data_dir, "Session directory");
  serve->add_option("--host", host, "Bind address");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*run) return Run(run_flags);
    if (*partition) return Partition(partition_flags);
    if (*entropy) return EvalEntropy(entropy_flags, trials);
    if (*regret) {
      return EvalRegret(regret_flags, policies, runs, table_path, svg_path);
    }
    if (*baselines) {
      return EvalBaselines(baseline_flags, runs, table_path, svg_path);
    }
    if (*generate) return Generate(kind, gen_seed, out_dir);
    if (*plot) return PlotRegret(plot_input, plot_output, plot_title);
    if (*serve) {
      serve_options.ApplyEnvironment();
      if (port) serve_options.port = *port;
      if (data_dir) serve_options.data_dir = *data_dir;
      serve_options.host = host;
      return Serve(serve_options);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
