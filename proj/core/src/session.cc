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

#include "uud/session.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

#include "uud/error.h"
#include "uud/text.h"

namespace uud {

namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

void RejectUnknownKeys(const Json& object, const std::set<std::string>& known,
                       const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    if (!known.contains(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::string& path) {
  const std::filesystem::path p(path);
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

template <typename T>
T Get(const Json& object, const char* key, const std::string& where) {
  try {
    return object.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + where);
  }
}

}  // namespace

std::string OracleModeName(OracleMode mode) {
  return mode == OracleMode::kInteractive ? "interactive" : "simulated";
}

void SessionConfig::Validate() const {
  if (critical_class.empty()) throw ConfigError("critical_class is required");
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw ValidationError("tau must lie in [0,1], got " + FormatDouble(tau));
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ValidationError("gamma must lie in [0,1], got " +
                          FormatDouble(gamma));
  }
  if (!(budget_fraction > 0.0 && budget_fraction <= 1.0)) {
    throw ValidationError("budget_fraction must lie in (0,1]");
  }
  if (budget && *budget < 1) throw ValidationError("budget must be >= 1");
  PolicySpec::Parse(policy);
  if (miner.bins < 2) throw ValidationError("miner.bins must be >= 2");
  if (miner.max_length < 1) {
    throw ValidationError("miner.max_length must be >= 1");
  }
  if (lambda.tune) {
    if (lambda.grid.empty()) throw ConfigError("lambda.grid is empty");
    for (double v : lambda.grid) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ConfigError("lambda.grid values must be finite and >= 0");
      }
    }
    if (!(lambda.validation_fraction > 0.0 &&
          lambda.validation_fraction <= 1.0)) {
      throw ValidationError("lambda.validation_fraction must lie in (0,1]");
    }
  } else {
    lambda.fixed.Validate();
  }
  const CostModel model = CostModel::Parse(cost.kind);
  if (model.kind == CostModel::Kind::kVariable && cost.min_length &&
      cost.max_length && !(*cost.min_length < *cost.max_length)) {
    throw ValidationError("degenerate cost range");
  }
  if (oracle == OracleMode::kInteractive &&
      model.kind == CostModel::Kind::kColumn) {
    throw ConfigError("the column cost model needs recorded costs and is "
                      "not available to interactive sessions");
  }
}

SessionConfig ParseSessionConfig(const std::string& json_text,
                                 const std::filesystem::path& base_dir) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ParseError("config", 0, e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  RejectUnknownKeys(root,
                    {"instances", "schema", "training", "critical_class",
                     "tau", "gamma", "budget_fraction", "budget", "policy",
                     "miner", "lambda", "seed", "oracle", "cost_model",
                     "output_dir"},
                    "config");
  SessionConfig config;
  const std::string where = "config";
  if (root.contains("instances")) {
    config.instances =
        Resolve(base_dir, Get<std::string>(root, "instances", where));
  }
  if (root.contains("schema")) {
    config.schema = Resolve(base_dir, Get<std::string>(root, "schema", where));
  }
  if (root.contains("training")) {
    config.training =
        Resolve(base_dir, Get<std::string>(root, "training", where));
  }
  if (root.contains("critical_class")) {
    config.critical_class = Get<std::string>(root, "critical_class", where);
  }
  if (root.contains("tau")) config.tau = Get<double>(root, "tau", where);
  if (root.contains("gamma")) config.gamma = Get<double>(root, "gamma", where);
  if (root.contains("budget_fraction")) {
    config.budget_fraction = Get<double>(root, "budget_fraction", where);
  }
  if (root.contains("budget")) {
    const auto b = Get<long long>(root, "budget", where);
    if (b < 1) throw ValidationError("budget must be >= 1");
    config.budget = static_cast<std::size_t>(b);
  }
  if (root.contains("policy")) {
    config.policy = Get<std::string>(root, "policy", where);
  }
  if (root.contains("seed")) {
    config.seed = Get<unsigned long long>(root, "seed", where);
  }
  if (root.contains("oracle")) {
    const auto mode = Get<std::string>(root, "oracle", where);
    if (mode == "simulated") {
      config.oracle = OracleMode::kSimulated;
    } else if (mode == "interactive") {
      config.oracle = OracleMode::kInteractive;
    } else {
      throw ConfigError("oracle must be 'simulated' or 'interactive'");
    }
  }
  if (root.contains("output_dir")) {
    config.output_dir =
        Resolve(base_dir, Get<std::string>(root, "output_dir", where));
  }
  if (root.contains("miner")) {
    const Json& m = root.at("miner");
    RejectUnknownKeys(m, {"min_support", "max_length", "bins"}, "miner");
    if (m.contains("min_support")) {
      config.miner.min_support = Get<std::size_t>(m, "min_support", "miner");
    }
    if (m.contains("max_length")) {
      config.miner.max_length = Get<std::size_t>(m, "max_length", "miner");
    }
    if (m.contains("bins")) config.miner.bins = Get<int>(m, "bins", "miner");
  }
  if (root.contains("lambda")) {
    const Json& l = root.at("lambda");
    RejectUnknownKeys(l, {"tune", "grid", "validation_fraction", "values"},
                      "lambda");
    if (l.contains("tune")) config.lambda.tune = Get<bool>(l, "tune", "lambda");
    if (l.contains("grid")) {
      config.lambda.grid = Get<std::vector<double>>(l, "grid", "lambda");
    }
    if (l.contains("validation_fraction")) {
      config.lambda.validation_fraction =
          Get<double>(l, "validation_fraction", "lambda");
    }
    if (l.contains("values")) {
      const auto values = Get<std::vector<double>>(l, "values", "lambda");
      if (values.size() != 5) {
        throw ConfigError("lambda.values needs exactly five weights");
      }
      std::copy(values.begin(), values.end(),
                config.lambda.fixed.values.begin());
      if (!l.contains("tune")) config.lambda.tune = false;
    }
  }
  if (root.contains("cost_model")) {
    const Json& c = root.at("cost_model");
    if (c.is_string()) {
      config.cost.kind = c.get<std::string>();
    } else {
      RejectUnknownKeys(c, {"kind", "min_length", "max_length"}, "cost_model");
      if (c.contains("kind")) {
        config.cost.kind = Get<std::string>(c, "kind", "cost_model");
      }
      if (c.contains("min_length")) {
        config.cost.min_length = Get<double>(c, "min_length", "cost_model");
      }
      if (c.contains("max_length")) {
        config.cost.max_length = Get<double>(c, "max_length", "cost_model");
      }
    }
  }
  config.Validate();
  return config;
}

SessionConfig LoadSessionConfig(const std::filesystem::path& path) {
  return ParseSessionConfig(ReadFile(path), path.parent_path());
}

std::string SessionConfigToJson(const SessionConfig& config) {
  OrderedJson j;
  j["instances"] = config.instances.string();
  j["schema"] = config.schema.string();
  if (!config.training.empty()) j["training"] = config.training.string();
  j["critical_class"] = config.critical_class;
  j["tau"] = config.tau;
  j["gamma"] = config.gamma;
  j["budget_fraction"] = config.budget_fraction;
  if (config.budget) j["budget"] = *config.budget;
  j["policy"] = config.policy;
  j["miner"] = {{"min_support", config.miner.min_support},
                {"max_length", config.miner.max_length},
                {"bins", config.miner.bins}};
  if (config.lambda.tune) {
    j["lambda"] = {{"tune", true},
                   {"grid", config.lambda.grid},
                   {"validation_fraction", config.lambda.validation_fraction}};
  } else {
    j["lambda"] = {{"tune", false},
                   {"values", std::vector<double>(
                                  config.lambda.fixed.values.begin(),
                                  config.lambda.fixed.values.end())}};
  }
  j["seed"] = config.seed;
  j["oracle"] = OracleModeName(config.oracle);
  OrderedJson cost;
  cost["kind"] = config.cost.kind;
  if (config.cost.min_length) cost["min_length"] = *config.cost.min_length;
  if (config.cost.max_length) cost["max_length"] = *config.cost.max_length;
  j["cost_model"] = cost;
  j["output_dir"] = config.output_dir.string();
  return j.dump(2);
}

PreparedSession Prepare(const SessionConfig& config, Dataset dataset) {
  config.Validate();
  PreparedSession out;
  const Dataset binned = Discretize(dataset, config.miner.bins);
  out.raw_space = BuildSearchSpace(dataset, config.critical_class, config.tau);
  out.space = BuildSearchSpace(binned, config.critical_class, config.tau);
  out.warnings = binned.warnings;

  MinerOptions options = MinerOptions::Defaults(out.space.size());
  if (config.miner.min_support > 0) {
    options.min_support = config.miner.min_support;
  }
  options.max_length = config.miner.max_length;
  out.patterns = MinePatterns(out.space, options);
  out.warnings.insert(out.warnings.end(), out.patterns.warnings.begin(),
                      out.patterns.warnings.end());

  LambdaWeights lambda = config.lambda.fixed;
  if (config.lambda.tune) {
    const SearchSpace validation = ValidationSplit(
        out.space, config.lambda.validation_fraction, config.seed);
    out.tuning = TuneLambda(validation, out.patterns, config.lambda.grid);
    lambda = out.tuning->lambda;
    out.warnings.insert(out.warnings.end(), out.tuning->warnings.begin(),
                        out.tuning->warnings.end());
  }
  out.partitioning = GreedyPartition(out.space, out.patterns, lambda);
  out.arms = PartitionMemberIds(out.partitioning, out.space);
  out.budget = config.budget
                   ? *config.budget
                   : DefaultBudget(out.space.size(), config.budget_fraction);

  out.cost_model = CostModel::Parse(config.cost.kind);
  if (out.cost_model.kind == CostModel::Kind::kVariable) {
    if (config.cost.min_length && config.cost.max_length) {
      out.cost_model =
          CostModel::Variable(*config.cost.min_length, *config.cost.max_length);
    } else {
      out.cost_model = CostModel::VariableFrom(dataset.instances);
    }
  }
  out.dataset = std::move(dataset);
  return out;
}

PreparedSession Prepare(const SessionConfig& config) {
  if (config.instances.empty() || config.schema.empty()) {
    throw ConfigError("config needs 'instances' and 'schema' paths");
  }
  const DatasetSchema schema = LoadSchema(config.schema);
  Dataset dataset = LoadDataset(config.instances, schema);
  std::vector<std::string> warnings = dataset.warnings;
  PreparedSession prepared = Prepare(config, std::move(dataset));
  prepared.warnings.insert(prepared.warnings.begin(), warnings.begin(),
                           warnings.end());
  return prepared;
}

RunOutcome RunSimulated(const SessionConfig& config, PreparedSession prepared) {
  SimulatedOracle oracle(prepared.space, prepared.dataset.truth,
                         prepared.cost_model, prepared.budget);
  const UtilityConfig utility{config.gamma, config.critical_class};
  RunOutcome outcome;
  outcome.trace =
      RunPolicy(PolicySpec::Parse(config.policy), prepared.arms, oracle,
                utility, prepared.budget, config.seed);
  outcome.summary_json = SummaryJson(config, prepared, outcome.trace);
  outcome.prepared = std::move(prepared);
  return outcome;
}

std::string SummaryJson(const SessionConfig& config,
                        const PreparedSession& prepared,
                        const ExplorationTrace& trace) {
  std::vector<std::size_t> queried(prepared.arms.size(), 0);
  std::vector<std::size_t> found(prepared.arms.size(), 0);
  std::size_t total_found = 0;
  for (const TraceStep& step : trace.steps) {
    if (step.arm < queried.size()) {
      ++queried[step.arm];
      found[step.arm] += step.is_unknown_unknown ? 1 : 0;
    }
    total_found += step.is_unknown_unknown ? 1 : 0;
  }
  OrderedJson j;
  j["policy"] = trace.policy;
  j["seed"] = config.seed;
  j["critical_class"] = config.critical_class;
  j["tau"] = config.tau;
  j["gamma"] = config.gamma;
  j["search_space_size"] = prepared.space.size();
  j["budget"] = prepared.budget;
  j["steps"] = trace.steps.size();
  j["truncated"] = trace.truncated;
  j["suspended"] = trace.suspended;
  j["unknown_unknowns_found"] = total_found;
  j["total_utility"] = trace.total_utility();
  j["lambda"] = prepared.partitioning.lambda.ToString();
  j["objective"] = prepared.partitioning.objective_value;
  OrderedJson parts = OrderedJson::array();
  for (std::size_t k = 0; k < prepared.partitioning.size(); ++k) {
    OrderedJson p;
    p["partition"] = k;
    p["description"] = DescribePattern(
        prepared.partitioning.partitions[k].pattern, prepared.space);
    p["size"] = prepared.arms[k].size();
    p["queried"] = queried[k];
    p["unknown_unknowns_found"] = found[k];
    parts.push_back(std::move(p));
  }
  j["partitions"] = std::move(parts);
  j["warnings"] = prepared.warnings;
  return j.dump(2) + "\n";
}

void WriteRunArtifacts(const SessionConfig& config, const RunOutcome& outcome) {
  const std::filesystem::path dir = config.output_dir;
  WriteFileAtomic(dir / "partitions.tsv",
                  FormatPartitioningReport(outcome.prepared.partitioning,
                                           outcome.prepared.space));
  WriteFileAtomic(dir / "trace.jsonl", TraceToJsonl(outcome.trace));
  WriteFileAtomic(dir / "summary.json", outcome.summary_json);
}

}  // namespace uud
