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

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "uud/error.h"

namespace uud {
namespace {

// Answers from a fixed id -> unknown-unknown map with cost 0.
class MapOracle : public Oracle {
 public:
  MapOracle(std::map<std::string, bool> uu, std::size_t budget,
            double cost = 0.0)
      : uu_(std::move(uu)), budget_(budget), cost_(cost) {}

  QueryResult Query(const std::string& id) override {
    auto it = uu_.find(id);
    if (it == uu_.end()) throw Error("unknown id " + id);
    if (queries_ >= budget_) return {QueryStatus::kBudgetExhausted, {}};
    ++queries_;
    OracleVerdict v;
    v.instance_id = id;
    v.is_unknown_unknown = it->second;
    v.true_label = it->second ? "neg" : "pos";
    v.cost = cost_;
    return {QueryStatus::kAnswered, v};
  }
  std::size_t queries_made() const override { return queries_; }
  std::size_t budget() const override { return budget_; }

 private:
  std::map<std::string, bool> uu_;
  std::size_t budget_;
  double cost_;
  std::size_t queries_ = 0;
};

// Arms of `sizes[i]` members each; the first round(conc[i] * size) members
// of arm i are unknown unknowns.
struct Population {
  std::vector<std::vector<std::string>> arms;
  std::map<std::string, bool> uu;
};

Population MakePopulation(const std::vector<std::size_t>& sizes,
                          const std::vector<double>& concentrations) {
  Population pop;
  for (std::size_t a = 0; a < sizes.size(); ++a) {
    std::vector<std::string> members;
    const auto bad = static_cast<std::size_t>(
        std::lround(concentrations[a] * static_cast<double>(sizes[a])));
    for (std::size_t i = 0; i < sizes[a]; ++i) {
      const std::string id = "a" + std::to_string(a) + "_" + std::to_string(i);
      members.push_back(id);
      pop.uu[id] = i < bad;
    }
    pop.arms.push_back(std::move(members));
  }
  return pop;
}

ArmState ArmWithPulls(std::size_t size, const std::vector<Pull>& pulls) {
  std::vector<std::string> members;
  for (std::size_t i = 0; i < size; ++i) members.push_back(std::to_string(i));
  ArmState arm(0, members);
  for (const Pull& p : pulls) arm.Consume(0, p.step, p.utility);
  return arm;
}

const UtilityConfig kUtility{0.2, "pos"};

TEST(ArmStateTest, ConsumeAndCounts) {
  ArmState arm(3, {"x", "y", "z"});
  EXPECT_EQ(arm.id(), 3u);
  arm.Consume(1, 2, 1.0);
  EXPECT_EQ(arm.remaining(), (std::vector<std::string>{"x", "z"}));
  arm.Consume(0, 5, 0.0);
  EXPECT_EQ(arm.pull_count(), 2u);
  EXPECT_EQ(arm.initial_size(), 3u);
  EXPECT_EQ(arm.PullsThrough(1), 0u);
  EXPECT_EQ(arm.PullsThrough(2), 1u);
  EXPECT_EQ(arm.PullsThrough(4), 1u);
  EXPECT_EQ(arm.PullsThrough(5), 2u);
  EXPECT_THROW(arm.Consume(0, 5, 0.0), Error);
  EXPECT_THROW(ArmState(0, {}), Error);
}

TEST(DiscountFactorTest, Examples) {
  // Pulled at steps 1, 4, 6 of a 10-member arm.
  const ArmState arm = ArmWithPulls(10, {{1, 0}, {4, 0}, {6, 0}});
  EXPECT_EQ(DiscountFactor(arm, 1, 3), 1.0);  // no pull in (1, 3]
  EXPECT_DOUBLE_EQ(DiscountFactor(arm, 1, 6), 7.0 / 9.0);
  EXPECT_EQ(DiscountFactor(arm, 4, 4), 1.0);
  EXPECT_THROW(DiscountFactor(arm, 5, 4), Error);
  EXPECT_DOUBLE_EQ(PopulationDiscount(10, 1, 3), 7.0 / 9.0);
  EXPECT_EQ(PopulationDiscount(4, 4, 4), 0.0);
}

TEST(DiscountFactorTest, RandomizedExactRatioAndMonotone) {
  std::mt19937_64 rng(2024);
  for (int c = 0; c < 10000; ++c) {
    const std::size_t n = 1 + rng() % 500;
    const std::size_t pj = rng() % n;  // the arm still has members at j
    const std::size_t pt = pj + rng() % (n - pj + 1);
    const double theta = PopulationDiscount(n, pj, pt);
    // Exact rational (n - pt) / (n - pj) by cross multiplication.
    EXPECT_NEAR(theta * static_cast<double>(n - pj),
                static_cast<double>(n - pt), 1e-12 * static_cast<double>(n));
    EXPECT_GE(theta, 0.0);
    EXPECT_LE(theta, 1.0);
    EXPECT_EQ(theta == 1.0, pt == pj);
    if (pt < n) {
      EXPECT_LE(PopulationDiscount(n, pj, pt + 1), theta);
    }
  }
}

TEST(ArmStatisticsTest, SinglePullNoDecay) {
  const ArmState arm = ArmWithPulls(5, {{1, 1.0}});
  const ArmStatistics s = UubStatistics(arm, 7, 4.0);
  EXPECT_EQ(s.mean_utility, 1.0);
  EXPECT_EQ(s.effective_count, 1.0);
  EXPECT_DOUBLE_EQ(s.bonus, std::sqrt(2 * std::log(4.0) / 1.0));
}

TEST(ArmStatisticsTest, UnitWeightsGiveArithmeticMean) {
  const ArmState arm = ArmWithPulls(5, {{1, 1.0}, {2, 0.0}});
  const ArmStatistics s =
      WeightedStatistics(arm, [](std::size_t) { return 1.0; }, 3.0);
  EXPECT_EQ(s.mean_utility, 0.5);
  EXPECT_EQ(s.effective_count, 2.0);
}

TEST(ArmStatisticsTest, HandEvaluatedPopulationDiscount) {
  const ArmState arm = ArmWithPulls(4, {{1, 1.0}, {2, 1.0}, {3, 0.0}});
  const ArmStatistics s = UubStatistics(arm, 3, 11.0 / 6.0);
  EXPECT_NEAR(s.effective_count, 11.0 / 6.0, 1e-12);
  EXPECT_NEAR(s.mean_utility, 5.0 / 11.0, 1e-12);
  EXPECT_NEAR(UubEffectiveCount(arm, 3), 11.0 / 6.0, 1e-12);
  EXPECT_GE(s.bonus, 0.0);
}

TEST(ArmStatisticsTest, NeverPulledThrows) {
  const ArmState arm = ArmWithPulls(3, {});
  EXPECT_THROW(UubStatistics(arm, 1, 2.0), Error);
  EXPECT_EQ(ConfidenceBonus(1.0, 1.0), 0.0);
  EXPECT_EQ(ConfidenceBonus(5.0, 0.0), 0.0);
}

TEST(ArmStatisticsTest, DiscountedNearOneMatchesUcb1) {
  std::mt19937_64 rng(5);
  std::vector<ArmState> arms;
  for (int a = 0; a < 3; ++a) arms.push_back(ArmWithPulls(20, {}));
  std::bernoulli_distribution coin(0.5);
  for (std::size_t t = 1; t <= 12; ++t) {
    arms[rng() % 3].Consume(0, t, coin(rng) ? 1.0 : -0.2);
  }
  for (const ArmState& arm : arms) ASSERT_GT(arm.pull_count(), 0u);
  double discounted_total = 0.0;
  for (const ArmState& arm : arms) {
    discounted_total += DiscountedEffectiveCount(arm, 12, 0.99999);
  }
  for (const ArmState& arm : arms) {
    const ArmStatistics d =
        DiscountedStatistics(arm, 12, 0.99999, discounted_total);
    const ArmStatistics u = Ucb1Statistics(arm, 12);
    EXPECT_NEAR(d.mean_utility, u.mean_utility, 1e-3);
    EXPECT_NEAR(d.bonus, u.bonus, 1e-3);
    EXPECT_NEAR(d.effective_count, u.effective_count, 1e-3);
  }
}

TEST(ArmStatisticsTest, UubMeanIsPlainWhenArmIdleSinceItsOnlyPull) {
  const ArmState arm = ArmWithPulls(6, {{2, -0.2}});
  EXPECT_EQ(UubStatistics(arm, 9, 3.0).mean_utility, -0.2);
}

TEST(SelectionTest, InitializationAndTies) {
  std::vector<ArmState> arms{ArmWithPulls(2, {}), ArmWithPulls(2, {}),
                             ArmWithPulls(2, {})};
  EXPECT_EQ(InitializationArm(arms), 0u);
  arms[0].Consume(0, 1, 0);
  arms[0].Consume(0, 2, 0);  // exhausted, never eligible again
  EXPECT_EQ(InitializationArm(arms), 1u);
  const std::vector<double> scores{1.9, 1.2, 1.9};
  const std::vector<ArmState> fresh{ArmState(0, {"m"}), ArmState(1, {"m"}),
                                    ArmState(2, {"m"})};
  EXPECT_EQ(ArgmaxArm(fresh, [&](const ArmState& a) { return scores[a.id()]; }),
            0u);
  // Exhausted arms are skipped even when they score highest.
  EXPECT_EQ(ArgmaxArm(arms, [](const ArmState& a) {
              return a.id() == 0 ? 9.0 : 1.0;
            }),
            1u);
}

TEST(UubPolicyTest, FirstStepPlaysFirstArm) {
  std::vector<ArmState> arms{ArmWithPulls(3, {}), ArmWithPulls(3, {}),
                             ArmWithPulls(3, {})};
  auto policy = MakePolicy(PolicySpec{});
  Rng rng(1);
  EXPECT_EQ(policy->Choose(arms, 1, rng), 0u);
}

TEST(UubPolicyTest, ReturnsNulloptWhenExhausted) {
  std::vector<ArmState> arms{ArmWithPulls(1, {{1, 1.0}})};
  auto policy = MakePolicy(PolicySpec{});
  Rng rng(1);
  EXPECT_FALSE(policy->Choose(arms, 2, rng).has_value());
}

TEST(UubPolicyTest, PrefersTheRicherArm) {
  const Population pop = MakePopulation({50, 50}, {0.9, 0.1});
  int wins = 0;
  for (unsigned long long seed = 0; seed < 100; ++seed) {
    MapOracle oracle(pop.uu, 20);
    const ExplorationTrace trace =
        RunPolicy(PolicySpec{}, pop.arms, oracle, kUtility, 20, seed);
    std::size_t pulls[2] = {0, 0};
    for (const TraceStep& s : trace.steps) ++pulls[s.arm];
    wins += pulls[0] > pulls[1];
  }
  EXPECT_GE(wins, 95);
}

TEST(PolicySpecTest, ParseAndNames) {
  EXPECT_EQ(PolicySpec::Parse("uub").Name(), "uub");
  EXPECT_EQ(PolicySpec::Parse("ucb").Name(), "ucb1");
  EXPECT_EQ(PolicySpec::Parse("random").Name(), "random");
  EXPECT_EQ(PolicySpec::Parse("greedy").Name(), "greedy");
  EXPECT_EQ(PolicySpec::Parse("epsilon_greedy(0.1)").Name(),
            "epsilon_greedy(0.1)");
  EXPECT_EQ(PolicySpec::Parse("discounted_ucb(0.5)").Name(),
            "discounted_ucb(0.5)");
  EXPECT_EQ(PolicySpec::Parse("sliding_window_ucb(50)").Name(),
            "sliding_window_ucb(50)");
  for (const char* bad :
       {"thompson", "epsilon_greedy", "epsilon_greedy(2)", "discounted_ucb(0)",
        "sliding_window_ucb(0)", "sliding_window_ucb(2.5)", "uub(1)",
        "discounted_ucb(abc)"}) {
    EXPECT_THROW(PolicySpec::Parse(bad), ConfigError) << bad;
  }
}

std::vector<std::string> Ids(const ExplorationTrace& trace) {
  std::vector<std::string> ids;
  for (const auto& s : trace.steps) ids.push_back(s.instance_id);
  return ids;
}

std::vector<std::string> AllPolicies() {
  return {"uub", "random", "greedy", "epsilon_greedy(0.2)", "ucb1",
          "discounted_ucb(0.5)", "sliding_window_ucb(5)"};
}

TEST(RunPolicyTest, SmallestRun) {
  MapOracle oracle({{"only", true}}, 1);
  const ExplorationTrace t =
      RunPolicy(PolicySpec{}, {{"only"}}, oracle, kUtility, 1, 0);
  ASSERT_EQ(t.steps.size(), 1u);
  EXPECT_EQ(t.steps[0].utility, 1.0);
  EXPECT_FALSE(t.truncated);
}

TEST(RunPolicyTest, FullBudgetQueriesEverythingOnce) {
  const Population pop = MakePopulation({4, 7, 1, 3}, {0.5, 0.2, 1.0, 0.0});
  for (const std::string& name : AllPolicies()) {
    MapOracle oracle(pop.uu, 15);
    const ExplorationTrace t =
        RunPolicy(PolicySpec::Parse(name), pop.arms, oracle, kUtility, 15, 3);
    std::vector<std::string> ids = Ids(t);
    std::sort(ids.begin(), ids.end());
    std::vector<std::string> all;
    for (const auto& [id, uu] : pop.uu) all.push_back(id);
    EXPECT_EQ(ids, all) << name;
    EXPECT_FALSE(t.truncated) << name;
  }
}

TEST(RunPolicyTest, BudgetBeyondPopulationTruncates) {
  const Population pop = MakePopulation({2, 2}, {0.5, 0.5});
  MapOracle oracle(pop.uu, 100);
  const ExplorationTrace t =
      RunPolicy(PolicySpec{}, pop.arms, oracle, kUtility, 10, 0);
  EXPECT_EQ(t.steps.size(), 4u);
  EXPECT_TRUE(t.truncated);
  const std::vector<double> curve = t.CumulativeCurve();
  ASSERT_EQ(curve.size(), 10u);
  EXPECT_EQ(curve[9], curve[3]);
}

TEST(RunPolicyTest, OracleRefusalTruncates) {
  const Population pop = MakePopulation({5, 5}, {0.5, 0.5});
  MapOracle oracle(pop.uu, 3);
  const ExplorationTrace t =
      RunPolicy(PolicySpec{}, pop.arms, oracle, kUtility, 6, 0);
  EXPECT_EQ(t.steps.size(), 3u);
  EXPECT_TRUE(t.truncated);
}

TEST(RunPolicyTest, TraceInvariantsAndReproducibility) {
  const Population pop =
      MakePopulation({30, 20, 25, 10}, {0.6, 0.1, 0.3, 0.0});
  for (const std::string& name : AllPolicies()) {
    for (unsigned long long seed : {1ull, 77ull}) {
      MapOracle o1(pop.uu, 40, 0.5);
      MapOracle o2(pop.uu, 40, 0.5);
      const auto spec = PolicySpec::Parse(name);
      const ExplorationTrace a = RunPolicy(spec, pop.arms, o1, kUtility, 40, seed);
      const ExplorationTrace b = RunPolicy(spec, pop.arms, o2, kUtility, 40, seed);
      EXPECT_EQ(a.steps, b.steps) << name;
      EXPECT_EQ(a.policy, spec.Name());
      const auto ids = Ids(a);
      EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(),
                ids.size());
      double cumulative = 0.0;
      std::vector<std::size_t> per_arm(pop.arms.size(), 0);
      for (std::size_t i = 0; i < a.steps.size(); ++i) {
        const TraceStep& s = a.steps[i];
        EXPECT_EQ(s.t, i + 1);
        EXPECT_EQ(s.utility, (s.is_unknown_unknown ? 1.0 : 0.0) - 0.2 * 0.5);
        EXPECT_GE(s.utility, -0.2);
        EXPECT_LE(s.utility, 1.0);
        cumulative += s.utility;
        EXPECT_DOUBLE_EQ(s.cumulative_utility, cumulative);
        ++per_arm[s.arm];
      }
      for (std::size_t k = 0; k < per_arm.size(); ++k) {
        EXPECT_LE(per_arm[k], pop.arms[k].size());
      }
      EXPECT_LE(a.total_utility(), static_cast<double>(a.steps.size()));
    }
  }
}

TEST(RunPolicyTest, EpsilonZeroIsGreedy) {
  const Population pop = MakePopulation({10, 10, 10}, {0.2, 0.7, 0.4});
  for (unsigned long long seed = 0; seed < 5; ++seed) {
    MapOracle o1(pop.uu, 15);
    MapOracle o2(pop.uu, 15);
    const auto greedy =
        RunPolicy(PolicySpec::Parse("greedy"), pop.arms, o1, kUtility, 15, seed);
    const auto eps0 = RunPolicy(PolicySpec::Parse("epsilon_greedy(0)"),
                                pop.arms, o2, kUtility, 15, seed);
    EXPECT_EQ(greedy.steps, eps0.steps);
  }
}

TEST(ExplorerTest, NextIsIdempotentUntilCommit) {
  const Population pop = MakePopulation({3, 3}, {0.5, 0.5});
  Explorer explorer(pop.arms, MakePolicy(PolicySpec{}), kUtility, 4, 9);
  const auto p1 = explorer.Next();
  const auto p2 = explorer.Next();
  ASSERT_TRUE(p1 && p2);
  EXPECT_EQ(p1->instance_id, p2->instance_id);
  EXPECT_EQ(p1->t, 1u);
  OracleVerdict wrong;
  wrong.instance_id = "nope";
  EXPECT_THROW(explorer.Commit(wrong), Error);
  OracleVerdict v;
  v.instance_id = p1->instance_id;
  v.is_unknown_unknown = pop.uu.at(p1->instance_id);
  const TraceStep& step = explorer.Commit(v);
  EXPECT_EQ(step.t, 1u);
  EXPECT_EQ(explorer.Next()->t, 2u);
}

TEST(ExplorerTest, RejectsBadArguments) {
  EXPECT_THROW(Explorer({{"a"}}, MakePolicy(PolicySpec{}), kUtility, 0, 1),
               Error);
  EXPECT_THROW(Explorer({}, MakePolicy(PolicySpec{}), kUtility, 1, 1), Error);
  EXPECT_THROW(Explorer({{"a"}}, MakePolicy(PolicySpec{}), {2.0, "pos"}, 1, 1),
               Error);
}

TEST(DefaultBudgetTest, TwentyPercentRoundedUp) {
  EXPECT_EQ(DefaultBudget(10), 2u);
  EXPECT_EQ(DefaultBudget(11), 3u);
  EXPECT_EQ(DefaultBudget(400), 80u);
  EXPECT_EQ(DefaultBudget(1), 1u);
}

TEST(TraceJsonTest, RoundTrip) {
  TraceStep s;
  s.t = 3;
  s.arm = 1;
  s.instance_id = "id,\"q\"";
  s.is_unknown_unknown = true;
  s.cost = 0.25;
  s.utility = 0.95;
  s.cumulative_utility = 1.7;
  const std::string line = TraceStepToJson(s);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_EQ(TraceStepFromJson(line), s);
  EXPECT_THROW(TraceStepFromJson("{\"t\":1}"), ParseError);
  EXPECT_THROW(TraceStepFromJson("not json"), ParseError);
}

}  // namespace
}  // namespace uud
