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

// Evaluation harness: partition entropy against k-means and random
// reassignment, cumulative regret against a ground-truth policy, ranking
// baselines, and synthetic data generators with planted blind spots.

#ifndef UUD_EVAL_H_
#define UUD_EVAL_H_

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "uud/bandit.h"
#include "uud/corpus.h"
#include "uud/dsp.h"
#include "uud/oracle.h"

namespace uud {

// Groups of search-space indices. Partitionings and k-means clusterings are
// both compared in this form.
using Grouping = std::vector<std::vector<std::size_t>>;

Grouping GroupingOf(const Partitioning& partitioning);

// mask[i] is true when search-space instance i is an unknown unknown.
// Throws ValidationError if some instance has no true label.
std::vector<bool> UnknownUnknownMask(const SearchSpace& space,
                                     const TruthTable& truth);

struct EntropyReport {
  std::vector<std::size_t> uu_counts;  // per group
  double entropy = 0.0;                // bits
  bool empty = false;                  // no unknown unknown anywhere
  std::map<std::string, double> baseline_entropies;
};

// -sum p log2 p over the normalized counts; 0 log 0 = 0. Sets *empty when
// every count is zero.
double EntropyOfCounts(std::span<const std::size_t> counts,
                       bool* empty = nullptr);
EntropyReport Entropy(const Grouping& groups, const std::vector<bool>& uu);

// Mean entropy over `trials` random reassignments of all points that keep
// every group's size.
double RandomReassignmentEntropy(const Grouping& groups,
                                 const std::vector<bool>& uu,
                                 std::size_t trials, unsigned long long seed);

struct KMeansResult {
  std::vector<std::size_t> assignment;
  std::vector<std::vector<double>> centers;
  double inertia = 0.0;
};

// Lloyd's algorithm with k-means++ seeding; the best of `restarts` runs by
// inertia. Empty clusters are refilled with the point farthest from its
// center, so every cluster is non-empty. Throws ValidationError if k is 0
// or exceeds the number of points.
KMeansResult KMeans(const std::vector<std::vector<double>>& points,
                    std::size_t k, unsigned long long seed,
                    int restarts = 25, int max_iterations = 100);

enum class KMeansKind { kFeatures, kConfidence, kBoth };

std::string KMeansKindName(KMeansKind kind);
std::vector<KMeansKind> AllKMeansKinds();

// k-means groups of the search space. `features` clusters one-hot encoded
// features, `conf` clusters the confidence score, `both` clusters on
// confidence into round(sqrt(k)) groups and splits each of them on features
// so that k groups result in total.
Grouping KMeansPartitions(const SearchSpace& space, KMeansKind kind,
                          std::size_t k, unsigned long long seed);

// Full entropy comparison for one partitioning: DSP, random reassignment
// and the three k-means variants at the same group count. `space` is the
// space that was partitioned; k-means runs on `feature_space`, which lists
// the same instances in the same order (typically with raw, undiscretized
// values).
EntropyReport CompareEntropy(const Partitioning& partitioning,
                             const SearchSpace& space,
                             const SearchSpace& feature_space,
                             const TruthTable& truth, std::size_t trials,
                             unsigned long long seed);

// Plays the arm whose remaining members have the highest expected one-step
// utility, computed from ground truth: uu fraction - gamma * mean cost.
class OptimalPolicy : public Policy {
 public:
  OptimalPolicy(std::unordered_map<std::string, OracleVerdict> truth,
                double gamma);
  // Reads the verdicts of every search-space instance from `oracle`.
  static std::unique_ptr<OptimalPolicy> FromOracle(
      const SimulatedOracle& oracle, const SearchSpace& space, double gamma);

  std::string name() const override { return "optimal"; }
  std::optional<std::size_t> Choose(std::span<const ArmState> arms,
                                    std::size_t t, Rng& rng) override;

  double ExpectedUtility(const ArmState& arm) const;

 private:
  std::unordered_map<std::string, OracleVerdict> truth_;
  double gamma_;
};

using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

// `runs` independent explorations with seeds seed, seed+1, ...; the oracle
// is reset to `budget` before each run.
std::vector<ExplorationTrace> RunMany(const PolicyFactory& factory,
                                      const std::vector<std::vector<std::string>>& arms,
                                      SimulatedOracle& oracle,
                                      const UtilityConfig& utility,
                                      std::size_t budget, std::size_t runs,
                                      unsigned long long seed);

// Per-step mean of the cumulative utility curves. Throws ValidationError if
// the traces disagree on the budget or the list is empty.
std::vector<double> MeanCumulativeUtility(
    const std::vector<ExplorationTrace>& traces);

struct RegretCurve {
  std::string policy;
  std::size_t run_count = 0;
  std::vector<double> mean_cumulative_regret;  // entry s-1 is step s
  double final_regret() const;
};

// mean optimal cumulative utility - mean policy cumulative utility, per
// step. Throws ValidationError on mismatched budgets.
RegretCurve CumulativeRegret(const std::vector<ExplorationTrace>& policy_runs,
                             const std::vector<ExplorationTrace>& optimal_runs);
RegretCurve CumulativeRegret(const std::string& policy,
                             const std::vector<double>& policy_mean,
                             const std::vector<double>& optimal_mean,
                             std::size_t run_count);

enum class BaselineKind {
  kRandom,
  kLeastAverageSimilarity,
  kLeastMaximumSimilarity,
  kMostUncertain,
};

std::string BaselineKindName(BaselineKind kind);
BaselineKind ParseBaselineKind(const std::string& name);
std::vector<BaselineKind> AllBaselineKinds();

// Query order over the whole search space. Similarity kinds rank by mean
// (resp. minimum) Euclidean distance to the training rows, farthest first;
// most-uncertain ranks by confidence, lowest first; random shuffles with
// `seed`. Ties keep search-space order. Throws ConfigError when a
// similarity kind gets no training rows.
std::vector<std::size_t> RankBaseline(BaselineKind kind,
                                      const SearchSpace& space,
                                      std::span<const Instance> training,
                                      unsigned long long seed);

// Queries the first `budget` ranked instances in order.
ExplorationTrace BaselineTrace(BaselineKind kind, const SearchSpace& space,
                               std::span<const Instance> training,
                               Oracle& oracle, const UtilityConfig& utility,
                               std::size_t budget, unsigned long long seed);

// A synthetic population: a scored instance file with hidden truth and a
// training feature file, plus the planted group of every instance.
struct GeneratedData {
  Dataset dataset;
  std::vector<Instance> training;
  std::vector<std::size_t> group_of;  // parallel to dataset.instances
  std::vector<std::string> group_names;
  std::string critical_class;
};

struct SubgroupSpec {
  std::string name;
  std::string label;
  std::vector<std::string> categorical;  // one level per categorical feature
  std::vector<double> numeric_mean;      // one mean per numeric feature
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  bool removed = false;  // absent from training
};

struct BiasConfig {
  DatasetSchema schema;
  std::string critical_class;
  std::vector<std::vector<std::string>> levels;  // per categorical feature
  std::vector<SubgroupSpec> subgroups;
  double numeric_sd = 1.0;
  // Probability that a categorical value is redrawn uniformly from its
  // levels.
  double categorical_noise = 0.05;
};

// Cats and dogs by color and size; training keeps black dogs and non-black
// cats only, so white dogs become confident "cat" mistakes.
BiasConfig DefaultBiasConfig();

// Samples training and test rows from the subgroups, fits a nearest-centroid
// scorer on the training rows (confidence = softmax of negated distances)
// and scores the test rows. Throws ValidationError if the removal leaves a
// class without training rows.
GeneratedData InjectBias(const BiasConfig& config, unsigned long long seed);

struct SkewedConfig {
  std::vector<double> concentrations{0.8, 0.5, 0.2, 0.1, 0.05, 0.0};
  // Mean model confidence per group; deliberately not ordered by
  // concentration.
  std::vector<double> mean_confidence{0.88, 0.80, 0.92, 0.72, 0.85, 0.76};
  double confidence_sd = 0.04;
  std::size_t group_size = 100;
  std::size_t training_rows = 300;
};

// Groups that differ only in their segment value and their share of
// mistakes. Every test row is a confident critical-class prediction, and
// training rows are drawn from the same feature distribution as the test
// rows.
GeneratedData GenerateSkewed(const SkewedConfig& config,
                             unsigned long long seed);

// Arms made of the planted groups (members listed by instance id).
std::vector<std::vector<std::string>> GroupArms(const GeneratedData& data);

std::string FormatEntropyTable(const EntropyReport& report);
// Columns: step, then one column per curve.
std::string FormatRegretTable(const std::vector<RegretCurve>& curves);
std::string RenderRegretSvg(const std::vector<RegretCurve>& curves,
                            const std::string& title);

}  // namespace uud

#endif  // UUD_EVAL_H_
