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

// Truth sources. A query reveals the true label and the labeling cost of one
// instance; the discovery utility of that query is
//
//   u = 1{true_label != critical_class} - gamma * cost,   gamma, cost in [0,1].
//
// Budgets count queries, not cost.

#ifndef UUD_ORACLE_H_
#define UUD_ORACLE_H_

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "uud/corpus.h"

namespace uud {

inline constexpr double kDefaultGamma = 0.2;

struct OracleVerdict {
  std::string instance_id;
  std::string true_label;
  double cost = 0.0;
  bool is_unknown_unknown = false;
};

struct UtilityConfig {
  double gamma = kDefaultGamma;
  std::string critical_class;

  void Validate() const;
};

double Utility(const OracleVerdict& verdict, const UtilityConfig& config);

double UniformCost(const Instance& instance);
// (length - min_length) / (max_length - min_length), clamped to [0,1].
// Throws ValidationError if the range is degenerate or the instance has no
// length attribute.
double VariableCost(const Instance& instance, double min_length,
                    double max_length);

struct CostModel {
  enum class Kind { kUniform, kVariable, kColumn };

  Kind kind = Kind::kUniform;
  double min_length = 0.0;
  double max_length = 1.0;

  static CostModel Uniform() { return {}; }
  static CostModel Variable(double min_length, double max_length);
  // Range taken from the shortest and longest instance in `rows`.
  static CostModel VariableFrom(std::span<const Instance> rows);
  static CostModel Column() { return {Kind::kColumn, 0.0, 1.0}; }
  static CostModel Parse(const std::string& name);

  std::string name() const;
  // `hidden` supplies the recorded cost for the column model.
  double Cost(const Instance& instance, const HiddenTruth* hidden) const;
};

enum class QueryStatus { kAnswered, kBudgetExhausted, kTimedOut };

struct QueryResult {
  QueryStatus status = QueryStatus::kAnswered;
  std::optional<OracleVerdict> verdict;
};

class Oracle {
 public:
  virtual ~Oracle() = default;

  // Throws Error for ids outside the search space.
  virtual QueryResult Query(const std::string& instance_id) = 0;
  virtual std::size_t queries_made() const = 0;
  virtual std::size_t budget() const = 0;
};

// Answers instantly from hidden ground truth.
class SimulatedOracle : public Oracle {
 public:
  // Throws ValidationError if some search-space instance lacks a true label.
  SimulatedOracle(const SearchSpace& space, const TruthTable& truth,
                  CostModel cost_model, std::size_t budget);

  QueryResult Query(const std::string& instance_id) override;
  std::size_t queries_made() const override { return queries_; }
  std::size_t budget() const override { return budget_; }

  // Verdict without touching the query counter; for evaluation code that
  // needs ground truth (optimal policy, entropy).
  OracleVerdict Peek(const std::string& instance_id) const;
  void Reset(std::size_t budget);

 private:
  std::unordered_map<std::string, OracleVerdict> verdicts_;
  std::size_t budget_;
  std::size_t queries_ = 0;
};

// One pending question shown to a human.
struct Question {
  std::string session_id;
  std::size_t step = 0;
  std::string instance_id;
  std::vector<std::pair<std::string, std::string>> features;
  std::string predicted_label;
};

enum class AnswerStatus { kAccepted, kStale, kMalformed };

// Defers each query to a person. The exploration side posts a question (and
// may block on it); the human side reads the pending question and submits a
// label tagged with its step number. Only one question is pending at a time,
// and an answer whose step does not match it is rejected as stale.
class InteractiveOracle : public Oracle {
 public:
  // `display_rows` carry the feature values shown to the human (typically
  // the undiscretized search space).
  InteractiveOracle(std::string session_id, DatasetSchema schema,
                    std::span<const Instance> display_rows,
                    std::string critical_class, CostModel cost_model,
                    std::size_t budget,
                    std::chrono::milliseconds timeout = std::chrono::minutes(30));

  // Posts the question for `instance_id` and waits for the answer. On
  // timeout the question stays pending and a later Query for the same id
  // resumes waiting.
  QueryResult Query(const std::string& instance_id) override;
  std::size_t queries_made() const override;
  std::size_t budget() const override { return budget_; }

  // Non-blocking producer side. Re-posting the pending id returns the same
  // question; posting a different id while one is pending throws.
  Question Post(const std::string& instance_id);
  std::optional<OracleVerdict> TakeVerdict();

  std::optional<Question> Pending() const;
  AnswerStatus Submit(std::size_t step, const std::string& label);

  // Marks `answered` steps as already completed (used when resuming).
  void SetAnswered(std::size_t answered);

 private:
  OracleVerdict MakeVerdict(const std::string& id, const std::string& label) const;

  std::string session_id_;
  DatasetSchema schema_;
  std::unordered_map<std::string, Instance> rows_;
  std::string critical_class_;
  CostModel cost_model_;
  std::size_t budget_;
  std::chrono::milliseconds timeout_;

  mutable std::mutex mu_;
  std::condition_variable answered_cv_;
  std::size_t answered_ = 0;
  std::optional<Question> pending_;
  std::optional<OracleVerdict> verdict_;
};

}  // namespace uud

#endif  // UUD_ORACLE_H_
