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

#include "uud/bandit.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <nlohmann/json.hpp>

#include "uud/error.h"
#include "uud/text.h"

namespace uud {

ArmState::ArmState(std::size_t id, std::vector<std::string> members)
    : id_(id), initial_size_(members.size()), remaining_(std::move(members)) {
  if (initial_size_ == 0) throw Error("arm " + std::to_string(id) + " is empty");
}

std::size_t ArmState::PullsThrough(std::size_t step) const {
  // Pulls are recorded in increasing step order.
  return static_cast<std::size_t>(
      std::upper_bound(pulls_.begin(), pulls_.end(), step,
                       [](std::size_t s, const Pull& p) { return s < p.step; }) -
      pulls_.begin());
}

void ArmState::Consume(std::size_t index, std::size_t step, double utility) {
  if (index >= remaining_.size()) throw Error("arm member index out of range");
  if (!pulls_.empty() && step <= pulls_.back().step) {
    throw Error("pulls must be recorded in increasing step order");
  }
  remaining_.erase(remaining_.begin() + static_cast<std::ptrdiff_t>(index));
  pulls_.push_back(Pull{step, utility});
}

double PopulationDiscount(std::size_t initial_size, std::size_t pulls_through_j,
                          std::size_t pulls_through_t) {
  if (pulls_through_j >= initial_size) return 0.0;
  return static_cast<double>(initial_size - pulls_through_t) /
         static_cast<double>(initial_size - pulls_through_j);
}

double DiscountFactor(const ArmState& arm, std::size_t j, std::size_t t) {
  if (j > t) throw Error("discount factor needs j <= t");
  return PopulationDiscount(arm.initial_size(), arm.PullsThrough(j),
                            arm.PullsThrough(t));
}

double ConfidenceBonus(double total_effective, double effective_count) {
  if (effective_count <= 0.0) return 0.0;
  const double log_total = std::log(total_effective);
  if (!(log_total > 0.0)) return 0.0;
  return std::sqrt(2.0 * log_total / effective_count);
}

ArmStatistics WeightedStatistics(
    const ArmState& arm, const std::function<double(std::size_t)>& weight,
    double total_effective) {
  if (arm.pull_count() == 0) {
    throw Error("statistics undefined for an arm that was never pulled");
  }
  ArmStatistics stats;
  double weighted_sum = 0.0;
  for (std::size_t k = 0; k < arm.pull_count(); ++k) {
    const double w = weight(k);
    stats.effective_count += w;
    weighted_sum += w * arm.pulls()[k].utility;
  }
  if (stats.effective_count > 0.0) {
    stats.mean_utility = weighted_sum / stats.effective_count;
    stats.bonus = ConfidenceBonus(total_effective, stats.effective_count);
  }
  return stats;
}

double UubEffectiveCount(const ArmState& arm, std::size_t t) {
  const std::size_t n_t = arm.PullsThrough(t);
  double total = 0.0;
  for (std::size_t k = 1; k <= n_t; ++k) {
    total += PopulationDiscount(arm.initial_size(), k, n_t);
  }
  return total;
}

ArmStatistics UubStatistics(const ArmState& arm, std::size_t t,
                            double total_effective) {
  const std::size_t n_t = arm.PullsThrough(t);
  // The k-th pull of the arm is exactly the moment its own count reaches k.
  return WeightedStatistics(
      arm,
      [&](std::size_t k) {
        return k < n_t ? PopulationDiscount(arm.initial_size(), k + 1, n_t)
                       : 0.0;
      },
      total_effective);
}

double DiscountedEffectiveCount(const ArmState& arm, std::size_t t,
                                double gamma) {
  double total = 0.0;
  for (const Pull& p : arm.pulls()) {
    if (p.step <= t) total += std::pow(gamma, static_cast<double>(t - p.step));
  }
  return total;
}

ArmStatistics DiscountedStatistics(const ArmState& arm, std::size_t t,
                                   double gamma, double total_effective) {
  return WeightedStatistics(
      arm,
      [&](std::size_t k) {
        const std::size_t step = arm.pulls()[k].step;
        return step <= t ? std::pow(gamma, static_cast<double>(t - step)) : 0.0;
      },
      total_effective);
}

ArmStatistics Ucb1Statistics(const ArmState& arm, std::size_t total_pulls) {
  return WeightedStatistics(
      arm, [](std::size_t) { return 1.0; }, static_cast<double>(total_pulls));
}

std::optional<std::size_t> InitializationArm(std::span<const ArmState> arms) {
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (!arms[i].exhausted() && arms[i].pull_count() == 0) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> ArgmaxArm(
    std::span<const ArmState> arms,
    const std::function<double(const ArmState&)>& score) {
  std::optional<std::size_t> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (arms[i].exhausted()) continue;
    const double s = score(arms[i]);
    if (!best || s > best_score) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

namespace {

std::vector<std::size_t> LiveArms(std::span<const ArmState> arms) {
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (!arms[i].exhausted()) live.push_back(i);
  }
  return live;
}

std::optional<std::size_t> UniformArm(std::span<const ArmState> arms, Rng& rng) {
  const std::vector<std::size_t> live = LiveArms(arms);
  if (live.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, live.size() - 1);
  return live[pick(rng)];
}

double PlainMean(const ArmState& arm) {
  double sum = 0.0;
  for (const Pull& p : arm.pulls()) sum += p.utility;
  return sum / static_cast<double>(arm.pull_count());
}

class UubPolicy : public Policy {
 public:
  std::string name() const override { return "uub"; }
  std::optional<std::size_t> Choose(std::span<const ArmState> arms,
                                    std::size_t t, Rng&) override {
    if (auto init = InitializationArm(arms)) return init;
    const std::size_t now = t - 1;
    double total = 0.0;
    for (const ArmState& arm : arms) total += UubEffectiveCount(arm, now);
    return ArgmaxArm(arms, [&](const ArmState& arm) {
      const ArmStatistics s = UubStatistics(arm, now, total);
      return s.mean_utility + s.bonus;
    });
  }
};

class RandomPolicy : public Policy {
 public:
  std::string name() const override { return "random"; }
  std::optional<std::size_t> Choose(std::span<const ArmState> arms,
                                    std::size_t, Rng& rng) override {
    return UniformArm(arms, rng);
  }
};

class GreedyPolicy : public Policy {
 public:
  std::string name() const override { return "greedy"; }
  std::optional<std::size_t> Choose(std::span<const ArmState> arms,
                                    std::size_t, Rng&) override {
    if (auto init = InitializationArm(arms)) return init;
    return ArgmaxArm(arms, PlainMean);
  }
};

class EpsilonGreedyPolicy : public Policy {
 public:
  explicit EpsilonGreedyPolicy(double epsilon) : epsilon_(epsilon) {}
  std::string name() const override {
    return "epsilon_greedy(" + FormatDouble(epsilon_) + ")";
  }
  std::optional<std::size_t> Choose(std::span<const ArmState> arms,
                                    std::size_t, Rng& rng) override {
    if (auto init = InitializationArm(arms)) return init;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon_) return UniformArm(arms, rng);
    return ArgmaxArm(arms, PlainMean);
  }

 private:
  double epsilon_;
};

class Ucb1Policy : public Policy {
 public:
  std::string name() const override { return "ucb1"; }
  std::optional<std::size_t> Choose(std::span<const ArmState> arms,
                                    std::size_t, Rng&) override {
    if (auto init = InitializationArm(arms)) return init;
    std::size_t total = 0;
    for (const ArmState& arm : arms) total += arm.pull_count();
    return ArgmaxArm(arms, [&](const ArmState& arm) {
      const ArmStatistics s = Ucb1Statistics(arm, total);
      return s.mean_utility + s.bonus;
    });
  }
};

class DiscountedUcbPolicy : public Policy {
 public:
  explicit DiscountedUcbPolicy(double gamma) : gamma_(gamma) {}
  std::string name() const override {
    return "discounted_ucb(" + FormatDouble(gamma_) + ")";
  }
  std::optional<std::size_t> Choose(std::span<const ArmState> arms,
                                    std::size_t t, Rng&) override {
    if (auto init = InitializationArm(arms)) return init;
    const std::size_t now = t - 1;
    double total = 0.0;
    for (const ArmState& arm : arms) {
      total += DiscountedEffectiveCount(arm, now, gamma_);
    }
    return ArgmaxArm(arms, [&](const ArmState& arm) {
      const ArmStatistics s = DiscountedStatistics(arm, now, gamma_, total);
      return s.mean_utility + s.bonus;
    });
  }

 private:
  double gamma_;
};

class SlidingWindowUcbPolicy : public Policy {
 public:
  explicit SlidingWindowUcbPolicy(std::size_t window) : window_(window) {}
  std::string name() const override {
    return "sliding_window_ucb(" + std::to_string(window_) + ")";
  }
  std::optional<std::size_t> Choose(std::span<const ArmState> arms,
                                    std::size_t t, Rng&) override {
    if (auto init = InitializationArm(arms)) return init;
    const std::size_t now = t - 1;
    const std::size_t horizon = std::min(now, window_);
    const std::size_t oldest = now > window_ ? now - window_ : 0;
    return ArgmaxArm(arms, [&](const ArmState& arm) {
      double sum = 0.0;
      std::size_t count = 0;
      for (const Pull& p : arm.pulls()) {
        if (p.step > oldest) {
          sum += p.utility;
          ++count;
        }
      }
      // An arm with no pull inside the window is re-explored first.
      if (count == 0) return std::numeric_limits<double>::infinity();
      const double n = static_cast<double>(count);
      return sum / n + ConfidenceBonus(static_cast<double>(horizon), n);
    });
  }

 private:
  std::size_t window_;
};

double ParseParameter(const std::string& text, const std::string& kind) {
  const auto open = text.find('(');
  const auto close = text.rfind(')');
  if (open == std::string::npos || close != text.size() - 1 || close < open) {
    throw ConfigError("policy '" + kind + "' needs a parameter, e.g. " + kind +
                      "(0.5)");
  }
  const std::string arg = text.substr(open + 1, close - open - 1);
  try {
    std::size_t used = 0;
    const double v = std::stod(arg, &used);
    if (used != arg.size()) throw std::invalid_argument(arg);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad policy parameter '" + arg + "'");
  }
}

}  // namespace

PolicySpec PolicySpec::Parse(const std::string& raw) {
  const std::string text(Trim(raw));
  const std::string kind = text.substr(0, text.find('('));
  PolicySpec spec;
  if (kind == "uub") {
    spec.kind = PolicyKind::kUub;
  } else if (kind == "random") {
    spec.kind = PolicyKind::kRandom;
  } else if (kind == "greedy") {
    spec.kind = PolicyKind::kGreedy;
  } else if (kind == "ucb1" || kind == "ucb") {
    spec.kind = PolicyKind::kUcb1;
  } else if (kind == "epsilon_greedy") {
    spec.kind = PolicyKind::kEpsilonGreedy;
    spec.epsilon = ParseParameter(text, kind);
    if (!(spec.epsilon >= 0.0 && spec.epsilon <= 1.0)) {
      throw ConfigError("epsilon must lie in [0,1]");
    }
  } else if (kind == "discounted_ucb") {
    spec.kind = PolicyKind::kDiscountedUcb;
    spec.gamma = ParseParameter(text, kind);
    if (!(spec.gamma > 0.0 && spec.gamma <= 1.0)) {
      throw ConfigError("discount gamma must lie in (0,1]");
    }
  } else if (kind == "sliding_window_ucb") {
    spec.kind = PolicyKind::kSlidingWindowUcb;
    const double w = ParseParameter(text, kind);
    if (!(w >= 1.0) || w != std::floor(w)) {
      throw ConfigError("window must be a positive integer");
    }
    spec.window = static_cast<std::size_t>(w);
  } else {
    throw ConfigError("unknown policy kind '" + text + "'");
  }
  if (kind != text && (spec.kind == PolicyKind::kUub ||
                       spec.kind == PolicyKind::kRandom ||
                       spec.kind == PolicyKind::kGreedy ||
                       spec.kind == PolicyKind::kUcb1)) {
    throw ConfigError("policy '" + kind + "' takes no parameter");
  }
  return spec;
}

std::string PolicySpec::Name() const { return MakePolicy(*this)->name(); }

std::unique_ptr<Policy> MakePolicy(const PolicySpec& spec) {
  switch (spec.kind) {
    case PolicyKind::kUub:
      return std::make_unique<UubPolicy>();
    case PolicyKind::kRandom:
      return std::make_unique<RandomPolicy>();
    case PolicyKind::kGreedy:
      return std::make_unique<GreedyPolicy>();
    case PolicyKind::kEpsilonGreedy:
      return std::make_unique<EpsilonGreedyPolicy>(spec.epsilon);
    case PolicyKind::kUcb1:
      return std::make_unique<Ucb1Policy>();
    case PolicyKind::kDiscountedUcb:
      return std::make_unique<DiscountedUcbPolicy>(spec.gamma);
    case PolicyKind::kSlidingWindowUcb:
      return std::make_unique<SlidingWindowUcbPolicy>(spec.window);
  }
  throw ConfigError("unknown policy kind");
}

double ExplorationTrace::total_utility() const {
  return steps.empty() ? 0.0 : steps.back().cumulative_utility;
}

std::vector<double> ExplorationTrace::CumulativeCurve() const {
  std::vector<double> curve(budget, 0.0);
  double last = 0.0;
  for (std::size_t i = 0; i < budget; ++i) {
    if (i < steps.size()) last = steps[i].cumulative_utility;
    curve[i] = last;
  }
  return curve;
}

namespace {

// Policy decisions and member sampling draw from separate streams so that
// policies consuming randomness (epsilon-greedy) do not perturb which
// member a given arm yields.
constexpr unsigned long long kPolicyStreamSalt = 0x9E3779B97F4A7C15ULL;

}  // namespace

Explorer::Explorer(std::vector<std::vector<std::string>> arms,
                   std::unique_ptr<Policy> policy, UtilityConfig utility,
                   std::size_t budget, unsigned long long seed)
    : policy_(std::move(policy)),
      utility_(std::move(utility)),
      sampler_rng_(seed),
      policy_rng_(seed ^ kPolicyStreamSalt) {
  utility_.Validate();
  if (budget < 1) throw ValidationError("budget must be >= 1");
  if (arms.empty()) throw ValidationError("no arms to explore");
  arms_.reserve(arms.size());
  for (std::size_t i = 0; i < arms.size(); ++i) {
    arms_.emplace_back(i, std::move(arms[i]));
  }
  trace_.policy = policy_->name();
  trace_.seed = seed;
  trace_.budget = budget;
}

std::optional<Proposal> Explorer::Next() {
  if (done_) return std::nullopt;
  if (pending_) return pending_;
  if (trace_.steps.size() >= trace_.budget) {
    done_ = true;
    return std::nullopt;
  }
  const std::size_t t = trace_.steps.size() + 1;
  const std::optional<std::size_t> arm = policy_->Choose(arms_, t, policy_rng_);
  if (!arm) {
    MarkTruncated();
    return std::nullopt;
  }
  if (*arm >= arms_.size() || arms_[*arm].exhausted()) {
    throw Error("policy chose an exhausted or unknown arm");
  }
  const auto& remaining = arms_[*arm].remaining();
  std::uniform_int_distribution<std::size_t> pick(0, remaining.size() - 1);
  pending_index_ = pick(sampler_rng_);
  pending_ = Proposal{t, *arm, remaining[pending_index_]};
  return pending_;
}

const TraceStep& Explorer::Commit(const OracleVerdict& verdict) {
  if (!pending_) throw Error("no pending proposal to commit");
  if (verdict.instance_id != pending_->instance_id) {
    throw Error("verdict for '" + verdict.instance_id +
                "' does not match pending instance '" +
                pending_->instance_id + "'");
  }
  const double u = Utility(verdict, utility_);
  arms_[pending_->arm].Consume(pending_index_, pending_->t, u);
  TraceStep step;
  step.t = pending_->t;
  step.arm = pending_->arm;
  step.instance_id = verdict.instance_id;
  step.is_unknown_unknown = verdict.is_unknown_unknown;
  step.cost = verdict.cost;
  step.utility = u;
  step.cumulative_utility = trace_.total_utility() + u;
  trace_.steps.push_back(std::move(step));
  trace_.suspended = false;
  pending_.reset();
  if (trace_.steps.size() >= trace_.budget) done_ = true;
  return trace_.steps.back();
}

std::size_t DefaultBudget(std::size_t n, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("budget fraction must lie in (0,1]");
  }
  const auto b = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(n) - 1e-9));
  return std::max<std::size_t>(1, b);
}

ExplorationTrace RunPolicy(std::unique_ptr<Policy> policy,
                           const std::vector<std::vector<std::string>>& arms,
                           Oracle& oracle, const UtilityConfig& utility,
                           std::size_t budget, unsigned long long seed) {
  Explorer explorer(arms, std::move(policy), utility, budget, seed);
  while (auto proposal = explorer.Next()) {
    QueryResult result = oracle.Query(proposal->instance_id);
    if (result.status == QueryStatus::kBudgetExhausted) {
      explorer.MarkTruncated();
      break;
    }
    if (result.status == QueryStatus::kTimedOut) {
      explorer.MarkSuspended();
      break;
    }
    explorer.Commit(*result.verdict);
  }
  return explorer.trace();
}

ExplorationTrace RunPolicy(const PolicySpec& spec,
                           const std::vector<std::vector<std::string>>& arms,
                           Oracle& oracle, const UtilityConfig& utility,
                           std::size_t budget, unsigned long long seed) {
  return RunPolicy(MakePolicy(spec), arms, oracle, utility, budget, seed);
}

std::string TraceStepToJson(const TraceStep& step) {
  nlohmann::ordered_json j;
  j["t"] = step.t;
  j["arm"] = step.arm;
  j["instance"] = step.instance_id;
  j["unknown_unknown"] = step.is_unknown_unknown;
  j["cost"] = step.cost;
  j["utility"] = step.utility;
  j["cumulative"] = step.cumulative_utility;
  return j.dump();
}

TraceStep TraceStepFromJson(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    TraceStep step;
    step.t = j.at("t").get<std::size_t>();
    step.arm = j.at("arm").get<std::size_t>();
    step.instance_id = j.at("instance").get<std::string>();
    step.is_unknown_unknown = j.at("unknown_unknown").get<bool>();
    step.cost = j.at("cost").get<double>();
    step.utility = j.at("utility").get<double>();
    step.cumulative_utility = j.at("cumulative").get<double>();
    return step;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("trace", 0, e.what());
  }
}

std::string TraceToJsonl(const ExplorationTrace& trace) {
  std::string out;
  for (const TraceStep& step : trace.steps) {
    out += TraceStepToJson(step);
    out += '\n';
  }
  return out;
}

}  // namespace uud
