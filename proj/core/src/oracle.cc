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

#include "uud/oracle.h"

#include <algorithm>
#include <cmath>

#include "uud/error.h"

namespace uud {

void UtilityConfig::Validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ValidationError("gamma must lie in [0,1]");
  }
  if (critical_class.empty()) throw ValidationError("critical class is empty");
}

double Utility(const OracleVerdict& verdict, const UtilityConfig& config) {
  return (verdict.is_unknown_unknown ? 1.0 : 0.0) - config.gamma * verdict.cost;
}

double UniformCost(const Instance&) { return 1.0; }

double VariableCost(const Instance& instance, double min_length,
                    double max_length) {
  if (!(min_length < max_length)) {
    throw ValidationError("degenerate cost range");
  }
  if (!instance.length) {
    throw ValidationError("instance '" + instance.id +
                          "' has no length attribute");
  }
  const double c = (*instance.length - min_length) / (max_length - min_length);
  return std::clamp(c, 0.0, 1.0);
}

CostModel CostModel::Variable(double min_length, double max_length) {
  if (!(min_length < max_length)) {
    throw ValidationError("degenerate cost range");
  }
  return {Kind::kVariable, min_length, max_length};
}

CostModel CostModel::VariableFrom(std::span<const Instance> rows) {
  bool any = false;
  double lo = 0.0;
  double hi = 0.0;
  for (const Instance& row : rows) {
    if (!row.length) continue;
    lo = any ? std::min(lo, *row.length) : *row.length;
    hi = any ? std::max(hi, *row.length) : *row.length;
    any = true;
  }
  if (!any) throw ValidationError("no instance carries a length attribute");
  return Variable(lo, hi);
}

CostModel CostModel::Parse(const std::string& name) {
  if (name == "uniform") return Uniform();
  if (name == "variable") return {Kind::kVariable, 0.0, 0.0};
  if (name == "column") return Column();
  throw ConfigError("unknown cost model '" + name + "'");
}

std::string CostModel::name() const {
  switch (kind) {
    case Kind::kUniform:
      return "uniform";
    case Kind::kVariable:
      return "variable";
    case Kind::kColumn:
      return "column";
  }
  return "uniform";
}

double CostModel::Cost(const Instance& instance,
                       const HiddenTruth* hidden) const {
  switch (kind) {
    case Kind::kUniform:
      return UniformCost(instance);
    case Kind::kVariable:
      return VariableCost(instance, min_length, max_length);
    case Kind::kColumn:
      if (hidden == nullptr || !hidden->cost) {
        throw ValidationError("instance '" + instance.id +
                              "' has no recorded cost");
      }
      return *hidden->cost;
  }
  return 1.0;
}

SimulatedOracle::SimulatedOracle(const SearchSpace& space,
                                 const TruthTable& truth, CostModel cost_model,
                                 std::size_t budget)
    : budget_(budget) {
  for (const Instance& inst : space.instances) {
    const HiddenTruth* hidden = truth.Find(inst.id);
    if (hidden == nullptr || !hidden->true_label) {
      throw ValidationError("instance '" + inst.id + "' has no true label");
    }
    OracleVerdict v;
    v.instance_id = inst.id;
    v.true_label = *hidden->true_label;
    v.cost = cost_model.Cost(inst, hidden);
    v.is_unknown_unknown = v.true_label != space.critical_class;
    verdicts_.emplace(inst.id, std::move(v));
  }
}

QueryResult SimulatedOracle::Query(const std::string& instance_id) {
  auto it = verdicts_.find(instance_id);
  if (it == verdicts_.end()) {
    throw Error("query for unknown instance '" + instance_id + "'");
  }
  if (queries_ >= budget_) return {QueryStatus::kBudgetExhausted, std::nullopt};
  ++queries_;
  return {QueryStatus::kAnswered, it->second};
}

OracleVerdict SimulatedOracle::Peek(const std::string& instance_id) const {
  auto it = verdicts_.find(instance_id);
  if (it == verdicts_.end()) {
    throw Error("query for unknown instance '" + instance_id + "'");
  }
  return it->second;
}

void SimulatedOracle::Reset(std::size_t budget) {
  budget_ = budget;
  queries_ = 0;
}

InteractiveOracle::InteractiveOracle(std::string session_id,
                                     DatasetSchema schema,
                                     std::span<const Instance> display_rows,
                                     std::string critical_class,
                                     CostModel cost_model, std::size_t budget,
                                     std::chrono::milliseconds timeout)
    : session_id_(std::move(session_id)),
      schema_(std::move(schema)),
      critical_class_(std::move(critical_class)),
      cost_model_(cost_model),
      budget_(budget),
      timeout_(timeout) {
  for (const Instance& row : display_rows) rows_.emplace(row.id, row);
}

std::size_t InteractiveOracle::queries_made() const {
  std::lock_guard lock(mu_);
  return answered_;
}

Question InteractiveOracle::Post(const std::string& instance_id) {
  std::lock_guard lock(mu_);
  auto it = rows_.find(instance_id);
  if (it == rows_.end()) {
    throw Error("query for unknown instance '" + instance_id + "'");
  }
  if (pending_) {
    if (pending_->instance_id == instance_id) return *pending_;
    throw Error("another question is already pending");
  }
  Question q;
  q.session_id = session_id_;
  q.step = answered_ + 1;
  q.instance_id = instance_id;
  q.predicted_label = it->second.predicted_label;
  for (std::size_t f = 0; f < schema_.num_features(); ++f) {
    q.features.emplace_back(schema_.feature_names[f],
                            FormatValue(it->second.features[f]));
  }
  pending_ = q;
  verdict_.reset();
  return q;
}

std::optional<OracleVerdict> InteractiveOracle::TakeVerdict() {
  std::lock_guard lock(mu_);
  std::optional<OracleVerdict> out = std::move(verdict_);
  verdict_.reset();
  return out;
}

std::optional<Question> InteractiveOracle::Pending() const {
  std::lock_guard lock(mu_);
  return pending_;
}

OracleVerdict InteractiveOracle::MakeVerdict(const std::string& id,
                                             const std::string& label) const {
  OracleVerdict v;
  v.instance_id = id;
  v.true_label = label;
  v.cost = cost_model_.Cost(rows_.at(id), nullptr);
  v.is_unknown_unknown = label != critical_class_;
  return v;
}

AnswerStatus InteractiveOracle::Submit(std::size_t step,
                                       const std::string& label) {
  {
    std::lock_guard lock(mu_);
    if (!pending_ || pending_->step != step) return AnswerStatus::kStale;
    if (!schema_.HasClass(label)) return AnswerStatus::kMalformed;
    verdict_ = MakeVerdict(pending_->instance_id, label);
    pending_.reset();
    ++answered_;
  }
  answered_cv_.notify_all();
  return AnswerStatus::kAccepted;
}

void InteractiveOracle::SetAnswered(std::size_t answered) {
  std::lock_guard lock(mu_);
  answered_ = answered;
}

QueryResult InteractiveOracle::Query(const std::string& instance_id) {
  {
    std::lock_guard lock(mu_);
    if (answered_ >= budget_ && !pending_) {
      return {QueryStatus::kBudgetExhausted, std::nullopt};
    }
  }
  const std::size_t step = Post(instance_id).step;
  std::unique_lock lock(mu_);
  const bool done = answered_cv_.wait_for(lock, timeout_, [&] {
    return answered_ >= step && verdict_.has_value();
  });
  if (!done) return {QueryStatus::kTimedOut, std::nullopt};
  std::optional<OracleVerdict> v = std::move(verdict_);
  verdict_.reset();
  return {QueryStatus::kAnswered, std::move(v)};
}

}  // namespace uud
