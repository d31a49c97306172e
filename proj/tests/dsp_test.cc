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

#include "uud/dsp.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "test_support.h"
#include "uud/error.h"

namespace uud {
namespace {

using testing::MakeSchema;
using testing::SpaceFromCsv;

Pattern Eq(std::size_t feature, FeatureValue value) {
  return Pattern{{Predicate{feature, CompareOp::kEq, std::move(value)}}, 0};
}

TEST(GoodnessMetricsTest, TwoIdenticalPointsAgainstOneOtherCentroid) {
  const SearchSpace space =
      SpaceFromCsv(MakeSchema({{"x", FeatureKind::kNumeric}}),
                   "id,predicted_label,confidence,x\n"
                   "a,pos,0.8,0\nb,pos,0.8,0\nc,pos,0.6,1\n");
  PatternSet set;
  set.patterns = {Eq(0, 0.0), Eq(0, 1.0)};
  const GoodnessMetrics g = ComputeGoodnessMetrics(0, space, set);
  EXPECT_DOUBLE_EQ(g.g1, 0.0);
  EXPECT_DOUBLE_EQ(g.g3, 0.0);
  EXPECT_DOUBLE_EQ(g.g2, 2.0);
  EXPECT_NEAR(g.g4, 2 * 0.2, 1e-12);
  EXPECT_DOUBLE_EQ(g.g5, 1.0);
}

TEST(GoodnessMetricsTest, SingletonHasNoIntraDistance) {
  const SearchSpace space =
      SpaceFromCsv(MakeSchema({{"x", FeatureKind::kNumeric}}),
                   "id,predicted_label,confidence,x\n"
                   "a,pos,0.8,0\nb,pos,0.7,3\n");
  PatternSet set;
  set.patterns = {Eq(0, 3.0), Eq(0, 0.0)};
  const GoodnessMetrics g = ComputeGoodnessMetrics(0, space, set);
  EXPECT_EQ(g.g1, 0.0);
  EXPECT_EQ(g.g3, 0.0);
}

SearchSpace RandomMixedSpace(unsigned seed, std::size_t n) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> level(0, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::ostringstream csv;
  csv << "id,predicted_label,confidence,c,b,x\n";
  for (std::size_t i = 0; i < n; ++i) {
    csv << "r" << i << ",pos," << 0.6 + 0.4 * unit(rng) << ",v" << level(rng)
        << "," << (unit(rng) < 0.5 ? 1 : 0) << "," << level(rng) << "\n";
  }
  return SpaceFromCsv(MakeSchema({{"c", FeatureKind::kCategorical},
                                  {"b", FeatureKind::kBinary},
                                  {"x", FeatureKind::kNumeric}}),
                      csv.str());
}

TEST(GoodnessMetricsTest, BatchScoringAgreesWithDirectSums) {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const SearchSpace space = RandomMixedSpace(seed, 30);
    const PatternSet set = MinePatterns(space, {2, 2});
    const ScoredPatterns scored = ScorePatterns(space, set);
    ASSERT_EQ(scored.metrics.size(), set.size());
    for (std::size_t q = 0; q < set.size(); ++q) {
      const GoodnessMetrics direct = ComputeGoodnessMetrics(q, space, set);
      const GoodnessMetrics& batch = scored.metrics[q];
      EXPECT_NEAR(batch.g1, direct.g1, 1e-9 * (1 + direct.g1));
      EXPECT_NEAR(batch.g2, direct.g2, 1e-9 * (1 + direct.g2));
      EXPECT_NEAR(batch.g3, direct.g3, 1e-9 * (1 + direct.g3));
      EXPECT_NEAR(batch.g4, direct.g4, 1e-9 * (1 + direct.g4));
      EXPECT_EQ(batch.g5, direct.g5);
    }
  }
}

TEST(CombinedGoodnessTest, Substitution) {
  const GoodnessMetrics singleton{0, 7, 0, 3, 2};
  LambdaWeights lambda;
  lambda.values = {1, 0, 1, 0, 1};
  EXPECT_DOUBLE_EQ(CombinedGoodness(singleton, lambda), 2.0);
  lambda.values = {0, 0, 0, 0, 1};
  EXPECT_DOUBLE_EQ(CombinedGoodness({4, 5, 6, 7, 3}, lambda), 3.0);
  lambda.values = {1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(CombinedGoodness({1, 1, 1, 1, 1}, lambda), 1 - 2 + 3 - 4 + 5);
}

TEST(SelectionWeightsTest, ShiftWhenMinimumIsNotPositive) {
  LambdaWeights lambda;
  lambda.values = {0, 1, 0, 0, 1};
  // Raw values: 1 - 6 = -5 and 2 - 1 = 1.
  const SelectionWeights w =
      ComputeSelectionWeights({{0, 6, 0, 0, 1}, {0, 1, 0, 0, 2}}, lambda);
  EXPECT_DOUBLE_EQ(w.raw[0], -5.0);
  EXPECT_DOUBLE_EQ(w.shift, 5.0 + kWeightEpsilon);
  EXPECT_DOUBLE_EQ(w.shifted[0], kWeightEpsilon);
  EXPECT_DOUBLE_EQ(w.shifted[1], 6.0 + kWeightEpsilon);

  const SelectionWeights positive =
      ComputeSelectionWeights({{0, 0, 0, 0, 1}, {0, 0, 0, 0, 2}}, lambda);
  EXPECT_EQ(positive.shift, 0.0);
  EXPECT_EQ(positive.shifted, positive.raw);
}

TEST(LambdaWeightsTest, Validation) {
  LambdaWeights lambda;
  EXPECT_NO_THROW(lambda.Validate());
  lambda.values = {0, 0, 0, 0, 0};
  EXPECT_THROW(lambda.Validate(), ValidationError);
  lambda.values = {1, -1, 0, 0, 0};
  EXPECT_THROW(lambda.Validate(), ValidationError);
  EXPECT_EQ(LambdaWeights{}.ToString(), "(1,1,1,1,1)");
}

// Scored patterns with hand-set coverage, one-dimensional positions and
// weights carried entirely by g5.
ScoredPatterns HandScored(std::size_t n,
                          const std::vector<std::vector<std::size_t>>& cover,
                          const std::vector<double>& weights) {
  ScoredPatterns scored;
  for (std::size_t i = 0; i < n; ++i) {
    scored.encoded.push_back({static_cast<double>(i)});
  }
  for (std::size_t q = 0; q < cover.size(); ++q) {
    Pattern p = Eq(0, static_cast<double>(q));
    scored.patterns.push_back(p);
    PatternStats stats;
    stats.covered = cover[q];
    double sum = 0;
    for (std::size_t i : cover[q]) sum += static_cast<double>(i);
    stats.centroid = {sum / static_cast<double>(cover[q].size())};
    scored.stats.push_back(stats);
    GoodnessMetrics g;
    g.g5 = weights[q];
    scored.metrics.push_back(g);
  }
  return scored;
}

LambdaWeights LengthOnly() {
  LambdaWeights lambda;
  lambda.values = {0, 0, 0, 0, 1};
  return lambda;
}

TEST(GreedyPartitionTest, HandSimulatedSixInstances) {
  const ScoredPatterns scored = HandScored(
      6, {{0, 1, 2}, {2, 3}, {3, 4, 5}, {0, 1, 2, 3, 4, 5}, {5}},
      {3, 1, 2, 10, 0.4});
  const Partitioning p = GreedyPartition(scored, LengthOnly());
  // Ratios by step: P4 (2.5), P1 (2), P0 (2/3), P2 (1/2).
  EXPECT_EQ(p.selected, (std::vector<std::size_t>{4, 1, 0, 2}));
  EXPECT_DOUBLE_EQ(p.selected_weight, 6.4);
  ASSERT_EQ(p.size(), 4u);
  // Instance 2 sits 0.5 from P1's centroid and 1 from P0's; 3 is 0.5 from
  // P1 and 1 from P2; 5 coincides with P4.
  EXPECT_EQ(p.partitions[0].members, std::vector<std::size_t>{5});
  EXPECT_EQ(p.partitions[1].members, (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(p.partitions[2].members, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(p.partitions[3].members, std::vector<std::size_t>{4});
  EXPECT_TRUE(IsValidPartitioning(p, 6));
  // Cheapest cover is P0 + P2 = 5; H(6) = 2.45.
  EXPECT_LE(p.selected_weight, (1 + 0.5 + 1.0 / 3 + 0.25 + 0.2 + 1.0 / 6) * 5);
}

TEST(GreedyPartitionTest, SinglePatternCoveringEverything) {
  const ScoredPatterns scored = HandScored(4, {{0, 1, 2, 3}}, {1});
  const Partitioning p = GreedyPartition(scored, LengthOnly());
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p.partitions[0].members.size(), 4u);
}

TEST(GreedyPartitionTest, TwoDisjointHalves) {
  const ScoredPatterns scored = HandScored(4, {{0, 1}, {2, 3}}, {1, 1});
  const Partitioning p = GreedyPartition(scored, LengthOnly());
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p.partitions[0].members, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(p.partitions[1].members, (std::vector<std::size_t>{2, 3}));
}

TEST(GreedyPartitionTest, EqualDistanceKeepsEarlierSelection) {
  // Instance 1 is equidistant from both centroids (0.5 and 1.5).
  const ScoredPatterns scored = HandScored(3, {{0, 1}, {1, 2}}, {1, 1});
  const Partitioning p = GreedyPartition(scored, LengthOnly());
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p.partitions[0].members, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(p.partitions[1].members, std::vector<std::size_t>{2});
}

TEST(GreedyPartitionTest, UncoverableSpaceThrows) {
  const ScoredPatterns scored = HandScored(3, {{0, 1}}, {1});
  EXPECT_THROW(GreedyPartition(scored, LengthOnly()), Error);
}

TEST(ObjectiveValueTest, SumsRawGoodness) {
  const ScoredPatterns one = HandScored(2, {{0, 1}}, {2});
  EXPECT_DOUBLE_EQ(GreedyPartition(one, LengthOnly()).objective_value, 2.0);
  const ScoredPatterns two = HandScored(4, {{0, 1}, {2, 3}}, {2, 3});
  EXPECT_DOUBLE_EQ(GreedyPartition(two, LengthOnly()).objective_value, 5.0);
}

TEST(ObjectiveValueTest, EqualsShiftedSumMinusShiftTimesK) {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const SearchSpace space = RandomMixedSpace(seed, 25);
    const PatternSet set = MinePatterns(space, {2, 2});
    const ScoredPatterns scored = ScorePatterns(space, set);
    const Partitioning p = GreedyPartition(scored, LambdaWeights{});
    ASSERT_GT(p.shift, 0.0);
    const SelectionWeights w = ComputeSelectionWeights(scored.metrics, p.lambda);
    double shifted_sum = 0;
    for (const Partition& part : p.partitions) {
      shifted_sum += w.shifted[part.pattern_index];
    }
    EXPECT_NEAR(p.objective_value,
                shifted_sum - p.shift * static_cast<double>(p.size()),
                1e-9 * std::abs(p.objective_value));
    EXPECT_DOUBLE_EQ(p.objective_value, ObjectiveValue(p));
  }
}

// Cheapest cover by enumeration of all pattern subsets.
double BruteForceCoverWeight(const std::vector<std::vector<std::size_t>>& cover,
                             const std::vector<double>& weights,
                             std::size_t n) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t m = cover.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
    std::vector<bool> hit(n, false);
    double w = 0;
    for (std::size_t q = 0; q < m; ++q) {
      if (!(mask >> q & 1)) continue;
      w += weights[q];
      for (std::size_t i : cover[q]) hit[i] = true;
    }
    bool all = true;
    for (bool h : hit) all = all && h;
    if (all) best = std::min(best, w);
  }
  return best;
}

TEST(GreedyPartitionTest, WithinLogFactorOfBruteForceOnSmallSpaces) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const SearchSpace space = RandomMixedSpace(100 + trial, 4 + trial % 7);
    const PatternSet set = MinePatterns(space, {1, 2});
    if (set.size() > 12) continue;
    const ScoredPatterns scored = ScorePatterns(space, set);
    LambdaWeights lambda;
    std::uniform_int_distribution<int> pick(0, 4);
    for (double& v : lambda.values) v = DefaultLambdaGrid()[pick(rng)];
    if (lambda.values[4] == 0) lambda.values[4] = 1;
    const Partitioning p = GreedyPartition(scored, lambda);
    ASSERT_TRUE(IsValidPartitioning(p, space.size()));
    std::vector<std::vector<std::size_t>> cover;
    for (const auto& s : scored.stats) cover.push_back(s.covered);
    const SelectionWeights w = ComputeSelectionWeights(scored.metrics, lambda);
    const double optimum = BruteForceCoverWeight(cover, w.shifted, space.size());
    const double bound =
        (std::log(static_cast<double>(space.size())) + 1) * optimum;
    EXPECT_LE(p.selected_weight, bound * (1 + 1e-12)) << "trial " << trial;
  }
}

TEST(TuneLambdaTest, SingleCandidateGrid) {
  const SearchSpace space = RandomMixedSpace(1, 20);
  const PatternSet set = MinePatterns(space, {2, 2});
  const TuneResult r = TuneLambda(space, set, {1.0});
  EXPECT_EQ(r.lambda, LambdaWeights{});
  EXPECT_EQ(r.cycles, 1);
}

TEST(TuneLambdaTest, FlatCoordinatesKeepTheirStartingValue) {
  // Every pattern covers identical points with identical confidences, so g1
  // and g3 vanish and their weights cannot change the objective.
  const SearchSpace space =
      SpaceFromCsv(MakeSchema({{"c", FeatureKind::kCategorical}}),
                   "id,predicted_label,confidence,c\n"
                   "a,pos,0.9,u\nb,pos,0.9,u\nc,pos,0.7,v\nd,pos,0.7,v\n");
  const PatternSet set = MinePatterns(space, {1, 1});
  const TuneResult r = TuneLambda(space, set, DefaultLambdaGrid());
  EXPECT_EQ(r.lambda[0], 1.0);
  EXPECT_EQ(r.lambda[2], 1.0);
}

TEST(TuneLambdaTest, TwoPatternSpaceMatchesExhaustiveGrid) {
  const SearchSpace space =
      SpaceFromCsv(MakeSchema({{"b", FeatureKind::kBinary}}),
                   "id,predicted_label,confidence,b\n"
                   "a,pos,0.9,1\nb,pos,0.8,1\nc,pos,0.7,0\n");
  const PatternSet set = MinePatterns(space, {1, 1});
  ASSERT_EQ(set.size(), 2u);
  const ScoredPatterns scored = ScorePatterns(space, set);
  double best = std::numeric_limits<double>::infinity();
  std::vector<LambdaWeights> argmins;
  for (int mask = 1; mask < 32; ++mask) {
    LambdaWeights lambda;
    for (int c = 0; c < 5; ++c) lambda.values[c] = (mask >> c) & 1;
    const double objective = GreedyPartition(scored, lambda).objective_value;
    if (objective < best - 1e-12) {
      best = objective;
      argmins = {lambda};
    } else if (std::abs(objective - best) <= 1e-12) {
      argmins.push_back(lambda);
    }
  }
  const TuneResult r = TuneLambda(space, set, {0.0, 1.0});
  EXPECT_NEAR(r.objective, best, 1e-12);
  EXPECT_NE(std::find(argmins.begin(), argmins.end(), r.lambda), argmins.end())
      << r.lambda.ToString();
}

TEST(TuneLambdaTest, EmptyValidationFallsBack) {
  SearchSpace space = RandomMixedSpace(2, 10);
  const PatternSet set = MinePatterns(space, {2, 1});
  space.instances.clear();
  const TuneResult r = TuneLambda(space, set, DefaultLambdaGrid());
  EXPECT_EQ(r.lambda, LambdaWeights{});
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_THROW(TuneLambda(space, set, {}), ConfigError);
}

TEST(TuneLambdaTest, Deterministic) {
  const SearchSpace space = RandomMixedSpace(4, 30);
  const PatternSet set = MinePatterns(space, {2, 2});
  const TuneResult a = TuneLambda(space, set, DefaultLambdaGrid());
  const TuneResult b = TuneLambda(space, set, DefaultLambdaGrid());
  EXPECT_EQ(a.lambda, b.lambda);
  EXPECT_EQ(a.objective, b.objective);
}

TEST(ValidationSplitTest, SeededSubsetOfRequestedSize) {
  const SearchSpace space = RandomMixedSpace(5, 101);
  const SearchSpace a = ValidationSplit(space, 0.05, 9);
  const SearchSpace b = ValidationSplit(space, 0.05, 9);
  ASSERT_EQ(a.size(), 6u);
  std::set<std::string> ids;
  for (const auto& inst : space.instances) ids.insert(inst.id);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.instances[i].id, b.instances[i].id);
    EXPECT_TRUE(ids.count(a.instances[i].id));
  }
  SearchSpace tiny = space;
  tiny.instances.resize(3);
  EXPECT_EQ(ValidationSplit(tiny, 0.05, 1).size(), 1u);
  EXPECT_THROW(ValidationSplit(space, 0.0, 1), ConfigError);
}

TEST(PartitioningReportTest, OneLinePerPartition) {
  const SearchSpace space =
      SpaceFromCsv(MakeSchema({{"c", FeatureKind::kCategorical}}),
                   "id,predicted_label,confidence,c\n"
                   "a,pos,0.9,u\nb,pos,0.7,u\nc,pos,0.8,v\n");
  const PatternSet set = MinePatterns(space, {1, 1});
  const Partitioning p = GreedyPartition(space, set, LambdaWeights{});
  const std::string report = FormatPartitioningReport(p, space);
  EXPECT_NE(report.find("c=u"), std::string::npos);
  EXPECT_NE(report.find("c=v"), std::string::npos);
  EXPECT_NE(report.find("0.8000"), std::string::npos);
  const auto ids = PartitionMemberIds(p, space);
  std::size_t total = 0;
  for (const auto& arm : ids) total += arm.size();
  EXPECT_EQ(total, 3u);
}

}  // namespace
}  // namespace uud
