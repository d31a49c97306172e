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

// Explore-exploit over partitions treated as arms with finite, shrinking
// populations. Each pull samples one unqueried member of the chosen arm
// uniformly without replacement and asks the oracle about it.
//
// The default policy (UUB) is a discounted UCB whose discount for a reward
// observed at step j, evaluated at step t, is the ratio of the arm's
// remaining population:
//
//   theta(j, t) = (N_i - pulls_i(1..t)) / (N_i - pulls_i(1..j))
//
// so theta = 1 while the arm is not pulled, and past rewards fade as the arm
// is depleted. With weights theta the arm statistics are
//
//   n_i  = sum_j theta(j, t)
//   mean = sum_j theta(j, t) u_j / n_i
//   b_i  = sqrt(2 log(sum_k n_k) / n_i)
//
// and after one initial pull of every arm the policy plays argmax mean + b.

#ifndef UUD_BANDIT_H_
#define UUD_BANDIT_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "uud/oracle.h"

namespace uud {

using Rng = std::mt19937_64;

struct Pull {
  std::size_t step = 0;
  double utility = 0.0;
};

class ArmState {
 public:
  ArmState(std::size_t id, std::vector<std::string> members);

  std::size_t id() const { return id_; }
  std::size_t initial_size() const { return initial_size_; }
  const std::vector<std::string>& remaining() const { return remaining_; }
  const std::vector<Pull>& pulls() const { return pulls_; }
  std::size_t pull_count() const { return pulls_.size(); }
  bool exhausted() const { return remaining_.empty(); }

  // Number of pulls at steps <= `step`.
  std::size_t PullsThrough(std::size_t step) const;

  // Removes remaining()[index] and records its utility at `step`.
  void Consume(std::size_t index, std::size_t step, double utility);

 private:
  std::size_t id_;
  std::size_t initial_size_;
  std::vector<std::string> remaining_;
  std::vector<Pull> pulls_;
};

struct ArmStatistics {
  double mean_utility = 0.0;
  double bonus = 0.0;
  double effective_count = 0.0;
};

// (initial - pulls_t) / (initial - pulls_j); 0 when the denominator is 0.
double PopulationDiscount(std::size_t initial_size, std::size_t pulls_through_j,
                          std::size_t pulls_through_t);
// Throws Error unless j <= t.
double DiscountFactor(const ArmState& arm, std::size_t j, std::size_t t);

// sqrt(2 log(total) / effective); 0 when log(total) <= 0.
double ConfidenceBonus(double total_effective, double effective_count);

// Weighted statistics where `weight(k)` is the discount of the k-th pull
// (0-based). Throws Error for an arm that was never pulled.
ArmStatistics WeightedStatistics(const ArmState& arm,
                                 const std::function<double(std::size_t)>& weight,
                                 double total_effective);

// Statistics at step t under the population discount.
double UubEffectiveCount(const ArmState& arm, std::size_t t);
ArmStatistics UubStatistics(const ArmState& arm, std::size_t t,
                            double total_effective);

// Statistics at step t under the geometric discount gamma^(t-j).
double DiscountedEffectiveCount(const ArmState& arm, std::size_t t,
                                double gamma);
ArmStatistics DiscountedStatistics(const ArmState& arm, std::size_t t,
                                   double gamma, double total_effective);

// Plain empirical mean and sqrt(2 ln(total_pulls) / pulls).
ArmStatistics Ucb1Statistics(const ArmState& arm, std::size_t total_pulls);

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  // Arm to pull at step `t` (1-based) given the state after t-1 pulls, or
  // nullopt when every arm is exhausted.
  virtual std::optional<std::size_t> Choose(std::span<const ArmState> arms,
                                            std::size_t t, Rng& rng) = 0;
};

enum class PolicyKind {
  kUub,
  kRandom,
  kGreedy,
  kEpsilonGreedy,
  kUcb1,
  kDiscountedUcb,
  kSlidingWindowUcb,
};

struct PolicySpec {
  PolicyKind kind = PolicyKind::kUub;
  double epsilon = 0.1;
  double gamma = 0.5;
  std::size_t window = 50;

  // Accepts "uub", "random", "greedy", "epsilon_greedy(0.1)", "ucb1",
  // "discounted_ucb(0.5)" and "sliding_window_ucb(50)". Throws ConfigError.
  static PolicySpec Parse(const std::string& text);
  std::string Name() const;
};

std::unique_ptr<Policy> MakePolicy(const PolicySpec& spec);

// First arm (lowest index) that has members left and was never pulled.
std::optional<std::size_t> InitializationArm(std::span<const ArmState> arms);

// Argmax over non-exhausted arms; ties go to the lowest index.
std::optional<std::size_t> ArgmaxArm(
    std::span<const ArmState> arms,
    const std::function<double(const ArmState&)>& score);

struct TraceStep {
  std::size_t t = 0;
  std::size_t arm = 0;
  std::string instance_id;
  bool is_unknown_unknown = false;
  double cost = 0.0;
  double utility = 0.0;
  double cumulative_utility = 0.0;

  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

struct ExplorationTrace {
  std::string policy;
  unsigned long long seed = 0;
  std::size_t budget = 0;
  std::vector<TraceStep> steps;
  // Stopped before the budget because every arm ran dry or the oracle
  // refused further queries.
  bool truncated = false;
  // Stopped because an interactive oracle timed out; resumable.
  bool suspended = false;

  double total_utility() const;
  // Cumulative utility after each of `budget` steps; a truncated trace
  // stays flat after its last step.
  std::vector<double> CumulativeCurve() const;
};

struct Proposal {
  std::size_t t = 0;
  std::size_t arm = 0;
  std::string instance_id;
};

// Step-wise driver shared by the batch runner and the interactive service.
// Next() chooses an arm and samples a member (idempotent until Commit), and
// Commit() applies the oracle's verdict for that proposal.
class Explorer {
 public:
  Explorer(std::vector<std::vector<std::string>> arms,
           std::unique_ptr<Policy> policy, UtilityConfig utility,
           std::size_t budget, unsigned long long seed);

  std::optional<Proposal> Next();
  const TraceStep& Commit(const OracleVerdict& verdict);

  bool done() const { return done_; }
  const ExplorationTrace& trace() const { return trace_; }
  std::span<const ArmState> arms() const { return arms_; }
  const std::optional<Proposal>& pending() const { return pending_; }
  void MarkTruncated() { trace_.truncated = true; done_ = true; }
  void MarkSuspended() { trace_.suspended = true; }

 private:
  std::vector<ArmState> arms_;
  std::unique_ptr<Policy> policy_;
  UtilityConfig utility_;
  Rng sampler_rng_;
  Rng policy_rng_;
  ExplorationTrace trace_;
  std::optional<Proposal> pending_;
  std::size_t pending_index_ = 0;
  bool done_ = false;
};

// ceil(0.2 * n), at least 1.
std::size_t DefaultBudget(std::size_t n, double fraction = 0.2);

ExplorationTrace RunPolicy(std::unique_ptr<Policy> policy,
                           const std::vector<std::vector<std::string>>& arms,
                           Oracle& oracle, const UtilityConfig& utility,
                           std::size_t budget, unsigned long long seed);
ExplorationTrace RunPolicy(const PolicySpec& spec,
                           const std::vector<std::vector<std::string>>& arms,
                           Oracle& oracle, const UtilityConfig& utility,
                           std::size_t budget, unsigned long long seed);

// One JSON object per line: t, arm, instance, unknown_unknown, cost,
// utility, cumulative.
std::string TraceStepToJson(const TraceStep& step);
TraceStep TraceStepFromJson(const std::string& line);
std::string TraceToJsonl(const ExplorationTrace& trace);

}  // namespace uud

#endif  // UUD_BANDIT_H_
