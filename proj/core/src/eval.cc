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

#include "uud/eval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <utility>

#include "uud/encoding.h"
#include "uud/error.h"
#include "uud/text.h"

namespace uud {

Grouping GroupingOf(const Partitioning& partitioning) {
  Grouping groups;
  groups.reserve(partitioning.size());
  for (const Partition& p : partitioning.partitions) groups.push_back(p.members);
  return groups;
}

std::vector<bool> UnknownUnknownMask(const SearchSpace& space,
                                     const TruthTable& truth) {
  std::vector<bool> mask(space.size(), false);
  for (std::size_t i = 0; i < space.size(); ++i) {
    const HiddenTruth* hidden = truth.Find(space.instances[i].id);
    if (hidden == nullptr || !hidden->true_label) {
      throw ValidationError("instance '" + space.instances[i].id +
                            "' has no true label");
    }
    mask[i] = *hidden->true_label != space.critical_class;
  }
  return mask;
}

double EntropyOfCounts(std::span<const std::size_t> counts, bool* empty) {
  const std::size_t total =
      std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (empty != nullptr) *empty = total == 0;
  if (total == 0) return 0.0;
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  // A single non-empty cell evaluates to -0.0.
  return h > 0.0 ? h : 0.0;
}

namespace {

std::vector<std::size_t> CountUnknownUnknowns(const Grouping& groups,
                                              const std::vector<bool>& uu) {
  std::vector<std::size_t> counts;
  counts.reserve(groups.size());
  for (const auto& group : groups) {
    std::size_t c = 0;
    for (std::size_t i : group) {
      if (i >= uu.size()) throw Error("group member out of range");
      c += uu[i] ? 1 : 0;
    }
    counts.push_back(c);
  }
  return counts;
}

}  // namespace

EntropyReport Entropy(const Grouping& groups, const std::vector<bool>& uu) {
  EntropyReport report;
  report.uu_counts = CountUnknownUnknowns(groups, uu);
  report.entropy = EntropyOfCounts(report.uu_counts, &report.empty);
  return report;
}

double RandomReassignmentEntropy(const Grouping& groups,
                                 const std::vector<bool>& uu,
                                 std::size_t trials, unsigned long long seed) {
  if (trials < 1) throw ValidationError("trials must be >= 1");
  std::vector<std::size_t> points;
  for (const auto& group : groups) {
    points.insert(points.end(), group.begin(), group.end());
  }
  Rng rng(seed);
  double sum = 0.0;
  std::vector<std::size_t> counts(groups.size());
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::shuffle(points.begin(), points.end(), rng);
    std::size_t next = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      counts[g] = 0;
      for (std::size_t m = 0; m < groups[g].size(); ++m) {
        counts[g] += uu[points[next++]] ? 1 : 0;
      }
    }
    sum += EntropyOfCounts(counts);
  }
  return sum / static_cast<double>(trials);
}

namespace {

double SquaredDistance(const std::vector<double>& a,
                       const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

std::size_t NearestCenter(const std::vector<double>& point,
                          const std::vector<std::vector<double>>& centers,
                          double* squared = nullptr) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double d = SquaredDistance(point, centers[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (squared != nullptr) *squared = best_d;
  return best;
}

std::vector<std::vector<double>> SeedCenters(
    const std::vector<std::vector<double>>& points, std::size_t k, Rng& rng) {
  const std::size_t n = points.size();
  std::vector<std::vector<double>> centers;
  std::vector<bool> chosen(n, false);
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  std::size_t pick = first(rng);
  centers.push_back(points[pick]);
  chosen[pick] = true;
  std::vector<double> d2(n);
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      NearestCenter(points[i], centers, &d2[i]);
      total += d2[i];
    }
    if (total > 0.0) {
      std::discrete_distribution<std::size_t> draw(d2.begin(), d2.end());
      pick = draw(rng);
    } else {
      // Only duplicates of existing centers are left.
      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) free.push_back(i);
      }
      std::uniform_int_distribution<std::size_t> any(0, free.size() - 1);
      pick = free[any(rng)];
    }
    centers.push_back(points[pick]);
    chosen[pick] = true;
  }
  return centers;
}

KMeansResult LloydOnce(const std::vector<std::vector<double>>& points,
                       std::size_t k, Rng& rng, int max_iterations) {
  const std::size_t n = points.size();
  const std::size_t dim = points.front().size();
  KMeansResult result;
  result.centers = SeedCenters(points, k, rng);
  result.assignment.assign(n, 0);
  std::vector<std::size_t> previous;
  for (int iter = 0; iter < max_iterations; ++iter) {
    std::vector<double> d2(n);
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      result.assignment[i] = NearestCenter(points[i], result.centers, &d2[i]);
      ++sizes[result.assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[result.assignment[i]] < 2) continue;
        if (far == n || d2[i] > d2[far]) far = i;
      }
      --sizes[result.assignment[far]];
      result.assignment[far] = c;
      sizes[c] = 1;
      d2[far] = 0.0;
      result.centers[c] = points[far];
    }
    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = sums[result.assignment[i]];
      for (std::size_t d = 0; d < dim; ++d) s[d] += points[i][d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t d = 0; d < dim; ++d) {
        result.centers[c][d] = sums[c][d] / static_cast<double>(sizes[c]);
      }
    }
    if (result.assignment == previous) break;
    previous = result.assignment;
  }
  result.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    result.inertia +=
        SquaredDistance(points[i], result.centers[result.assignment[i]]);
  }
  return result;
}

Grouping GroupsFromAssignment(const std::vector<std::size_t>& assignment,
                              std::size_t k,
                              const std::vector<std::size_t>& index_map) {
  Grouping groups(k);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    groups[assignment[i]].push_back(index_map[i]);
  }
  return groups;
}

// Splits k into one share per cluster, proportional to size, each share in
// [1, size].
std::vector<std::size_t> AllocateShares(const std::vector<std::size_t>& sizes,
                                        std::size_t k) {
  const double total = static_cast<double>(
      std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}));
  std::vector<std::size_t> share(sizes.size());
  std::vector<double> remainder(sizes.size());
  std::size_t used = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double exact = static_cast<double>(k) *
                         static_cast<double>(sizes[i]) / total;
    share[i] = std::clamp<std::size_t>(static_cast<std::size_t>(exact), 1,
                                       sizes[i]);
    remainder[i] = exact - static_cast<double>(share[i]);
    used += share[i];
  }
  while (used < k) {
    std::size_t best = sizes.size();
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      if (share[i] >= sizes[i]) continue;
      if (best == sizes.size() || remainder[i] > remainder[best]) best = i;
    }
    ++share[best];
    remainder[best] -= 1.0;
    ++used;
  }
  while (used > k) {
    std::size_t best = sizes.size();
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      if (share[i] <= 1) continue;
      if (best == sizes.size() || remainder[i] < remainder[best]) best = i;
    }
    --share[best];
    remainder[best] += 1.0;
    --used;
  }
  return share;
}

}  // namespace

KMeansResult KMeans(const std::vector<std::vector<double>>& points,
                    std::size_t k, unsigned long long seed, int restarts,
                    int max_iterations) {
  if (k < 1) throw ValidationError("k must be >= 1");
  if (k > points.size()) {
    throw ValidationError("k = " + std::to_string(k) + " exceeds the " +
                          std::to_string(points.size()) + " points");
  }
  Rng rng(seed);
  KMeansResult best;
  for (int r = 0; r < std::max(1, restarts); ++r) {
    KMeansResult candidate = LloydOnce(points, k, rng, max_iterations);
    if (r == 0 || candidate.inertia < best.inertia) best = std::move(candidate);
  }
  return best;
}

std::string KMeansKindName(KMeansKind kind) {
  switch (kind) {
    case KMeansKind::kFeatures:
      return "kmeans-features";
    case KMeansKind::kConfidence:
      return "kmeans-conf";
    case KMeansKind::kBoth:
      return "kmeans-both";
  }
  return "kmeans";
}

std::vector<KMeansKind> AllKMeansKinds() {
  return {KMeansKind::kFeatures, KMeansKind::kConfidence, KMeansKind::kBoth};
}

Grouping KMeansPartitions(const SearchSpace& space, KMeansKind kind,
                          std::size_t k, unsigned long long seed) {
  const std::size_t n = space.size();
  if (k < 1) throw ValidationError("k must be >= 1");
  if (k > n) {
    throw ValidationError("k = " + std::to_string(k) + " exceeds the " +
                          std::to_string(n) + " instances");
  }
  const FeatureEncoder encoder(space.schema, space.instances);
  const std::vector<std::vector<double>> features =
      encoder.EncodeAll(space.instances);
  std::vector<std::vector<double>> confidence(n);
  for (std::size_t i = 0; i < n; ++i) {
    confidence[i] = {space.instances[i].confidence};
  }
  std::vector<std::size_t> identity(n);
  std::iota(identity.begin(), identity.end(), 0);

  if (kind == KMeansKind::kFeatures) {
    return GroupsFromAssignment(KMeans(features, k, seed).assignment, k,
                                identity);
  }
  if (kind == KMeansKind::kConfidence) {
    return GroupsFromAssignment(KMeans(confidence, k, seed).assignment, k,
                                identity);
  }
  const std::size_t k_conf = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(k)))),
      1, k);
  const Grouping coarse = GroupsFromAssignment(
      KMeans(confidence, k_conf, seed).assignment, k_conf, identity);
  std::vector<std::size_t> sizes;
  for (const auto& g : coarse) sizes.push_back(g.size());
  const std::vector<std::size_t> shares = AllocateShares(sizes, k);
  Grouping groups;
  for (std::size_t c = 0; c < coarse.size(); ++c) {
    std::vector<std::vector<double>> sub;
    sub.reserve(coarse[c].size());
    for (std::size_t i : coarse[c]) sub.push_back(features[i]);
    const KMeansResult fine = KMeans(sub, shares[c], seed + c + 1);
    Grouping split = GroupsFromAssignment(fine.assignment, shares[c], coarse[c]);
    for (auto& g : split) groups.push_back(std::move(g));
  }
  return groups;
}

EntropyReport CompareEntropy(const Partitioning& partitioning,
                             const SearchSpace& space,
                             const SearchSpace& feature_space,
                             const TruthTable& truth, std::size_t trials,
                             unsigned long long seed) {
  if (feature_space.size() != space.size()) {
    throw ValidationError("feature space does not match the partitioned space");
  }
  const std::vector<bool> uu = UnknownUnknownMask(space, truth);
  const Grouping dsp = GroupingOf(partitioning);
  EntropyReport report = Entropy(dsp, uu);
  report.baseline_entropies["random-reassignment"] =
      RandomReassignmentEntropy(dsp, uu, trials, seed);
  for (KMeansKind kind : AllKMeansKinds()) {
    report.baseline_entropies[KMeansKindName(kind)] =
        Entropy(KMeansPartitions(feature_space, kind, dsp.size(), seed), uu)
            .entropy;
  }
  return report;
}

OptimalPolicy::OptimalPolicy(
    std::unordered_map<std::string, OracleVerdict> truth, double gamma)
    : truth_(std::move(truth)), gamma_(gamma) {}

std::unique_ptr<OptimalPolicy> OptimalPolicy::FromOracle(
    const SimulatedOracle& oracle, const SearchSpace& space, double gamma) {
  std::unordered_map<std::string, OracleVerdict> truth;
  for (const Instance& inst : space.instances) {
    truth.emplace(inst.id, oracle.Peek(inst.id));
  }
  return std::make_unique<OptimalPolicy>(std::move(truth), gamma);
}

double OptimalPolicy::ExpectedUtility(const ArmState& arm) const {
  if (arm.exhausted()) return -std::numeric_limits<double>::infinity();
  double uu = 0.0;
  double cost = 0.0;
  for (const std::string& id : arm.remaining()) {
    auto it = truth_.find(id);
    if (it == truth_.end()) throw Error("no ground truth for '" + id + "'");
    uu += it->second.is_unknown_unknown ? 1.0 : 0.0;
    cost += it->second.cost;
  }
  const double n = static_cast<double>(arm.remaining().size());
  return uu / n - gamma_ * cost / n;
}

std::optional<std::size_t> OptimalPolicy::Choose(
    std::span<const ArmState> arms, std::size_t, Rng&) {
  return ArgmaxArm(arms,
                   [&](const ArmState& arm) { return ExpectedUtility(arm); });
}

std::vector<ExplorationTrace> RunMany(
    const PolicyFactory& factory,
    const std::vector<std::vector<std::string>>& arms, SimulatedOracle& oracle,
    const UtilityConfig& utility, std::size_t budget, std::size_t runs,
    unsigned long long seed) {
  std::vector<ExplorationTrace> traces;
  traces.reserve(runs);
  for (std::size_t r = 0; r < runs; ++r) {
    oracle.Reset(budget);
    traces.push_back(RunPolicy(factory(), arms, oracle, utility, budget,
                               seed + r));
  }
  return traces;
}

std::vector<double> MeanCumulativeUtility(
    const std::vector<ExplorationTrace>& traces) {
  if (traces.empty()) throw ValidationError("no traces to average");
  const std::size_t budget = traces.front().budget;
  std::vector<double> mean(budget, 0.0);
  for (const ExplorationTrace& trace : traces) {
    if (trace.budget != budget) {
      throw ValidationError("traces disagree on the budget");
    }
    const std::vector<double> curve = trace.CumulativeCurve();
    for (std::size_t s = 0; s < budget; ++s) mean[s] += curve[s];
  }
  for (double& v : mean) v /= static_cast<double>(traces.size());
  return mean;
}

double RegretCurve::final_regret() const {
  return mean_cumulative_regret.empty() ? 0.0 : mean_cumulative_regret.back();
}

RegretCurve CumulativeRegret(const std::string& policy,
                             const std::vector<double>& policy_mean,
                             const std::vector<double>& optimal_mean,
                             std::size_t run_count) {
  if (policy_mean.size() != optimal_mean.size()) {
    throw ValidationError("regret needs equal budgets (" +
                          std::to_string(policy_mean.size()) + " vs " +
                          std::to_string(optimal_mean.size()) + ")");
  }
  RegretCurve curve;
  curve.policy = policy;
  curve.run_count = run_count;
  curve.mean_cumulative_regret.resize(policy_mean.size());
  for (std::size_t s = 0; s < policy_mean.size(); ++s) {
    curve.mean_cumulative_regret[s] = optimal_mean[s] - policy_mean[s];
  }
  return curve;
}

RegretCurve CumulativeRegret(const std::vector<ExplorationTrace>& policy_runs,
                             const std::vector<ExplorationTrace>& optimal_runs) {
  if (policy_runs.empty() || optimal_runs.empty()) {
    throw ValidationError("no traces to compare");
  }
  return CumulativeRegret(policy_runs.front().policy,
                          MeanCumulativeUtility(policy_runs),
                          MeanCumulativeUtility(optimal_runs),
                          policy_runs.size());
}

std::string BaselineKindName(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kRandom:
      return "random-sampling";
    case BaselineKind::kLeastAverageSimilarity:
      return "least-average-similarity";
    case BaselineKind::kLeastMaximumSimilarity:
      return "least-maximum-similarity";
    case BaselineKind::kMostUncertain:
      return "most-uncertain";
  }
  return "random-sampling";
}

BaselineKind ParseBaselineKind(const std::string& name) {
  for (BaselineKind kind : AllBaselineKinds()) {
    if (name == BaselineKindName(kind)) return kind;
  }
  if (name == "random") return BaselineKind::kRandom;
  throw ConfigError("unknown baseline '" + name + "'");
}

std::vector<BaselineKind> AllBaselineKinds() {
  return {BaselineKind::kRandom, BaselineKind::kLeastAverageSimilarity,
          BaselineKind::kLeastMaximumSimilarity, BaselineKind::kMostUncertain};
}

std::vector<std::size_t> RankBaseline(BaselineKind kind,
                                      const SearchSpace& space,
                                      std::span<const Instance> training,
                                      unsigned long long seed) {
  std::vector<std::size_t> order(space.size());
  std::iota(order.begin(), order.end(), 0);
  if (kind == BaselineKind::kRandom) {
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    return order;
  }
  if (kind == BaselineKind::kMostUncertain) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return space.instances[a].confidence <
                              space.instances[b].confidence;
                     });
    return order;
  }
  if (training.empty()) {
    throw ConfigError(BaselineKindName(kind) + " needs training features");
  }
  FeatureEncoder encoder(space.schema, space.instances);
  encoder.AddLevels(training);
  const auto x = encoder.EncodeAll(space.instances);
  const auto t = encoder.EncodeAll(training);
  std::vector<double> score(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    double sum = 0.0;
    double min = std::numeric_limits<double>::infinity();
    for (const auto& row : t) {
      const double d = EuclideanDistance(x[i], row);
      sum += d;
      min = std::min(min, d);
    }
    score[i] = kind == BaselineKind::kLeastAverageSimilarity
                   ? sum / static_cast<double>(t.size())
                   : min;
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return score[a] > score[b];
                   });
  return order;
}

ExplorationTrace BaselineTrace(BaselineKind kind, const SearchSpace& space,
                               std::span<const Instance> training,
                               Oracle& oracle, const UtilityConfig& utility,
                               std::size_t budget, unsigned long long seed) {
  utility.Validate();
  ExplorationTrace trace;
  trace.policy = BaselineKindName(kind);
  trace.seed = seed;
  trace.budget = budget;
  const std::vector<std::size_t> order =
      RankBaseline(kind, space, training, seed);
  double cumulative = 0.0;
  for (std::size_t s = 0; s < budget; ++s) {
    if (s >= order.size()) {
      trace.truncated = true;
      break;
    }
    const std::string& id = space.instances[order[s]].id;
    QueryResult result = oracle.Query(id);
    if (result.status == QueryStatus::kBudgetExhausted) {
      trace.truncated = true;
      break;
    }
    if (result.status == QueryStatus::kTimedOut) {
      trace.suspended = true;
      break;
    }
    TraceStep step;
    step.t = s + 1;
    step.arm = 0;
    step.instance_id = id;
    step.is_unknown_unknown = result.verdict->is_unknown_unknown;
    step.cost = result.verdict->cost;
    step.utility = Utility(*result.verdict, utility);
    cumulative += step.utility;
    step.cumulative_utility = cumulative;
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

namespace {

double Round2(double v) { return std::round(v * 100.0) / 100.0; }

// Nearest-centroid scorer over encoded features.
struct CentroidScorer {
  std::vector<std::string> classes;
  std::vector<std::vector<double>> centroids;

  std::pair<std::string, double> Score(const std::vector<double>& x) const {
    std::vector<double> logits(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
      logits[c] = -EuclideanDistance(x, centroids[c]);
    }
    const double top = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double l : logits) z += std::exp(l - top);
    std::size_t best = 0;
    for (std::size_t c = 1; c < classes.size(); ++c) {
      if (logits[c] > logits[best]) best = c;
    }
    return {classes[best], std::exp(logits[best] - top) / z};
  }
};

}  // namespace

BiasConfig DefaultBiasConfig() {
  BiasConfig config;
  config.schema.feature_names = {"color", "fur", "brightness", "size", "age"};
  config.schema.feature_kinds = {FeatureKind::kCategorical,
                                 FeatureKind::kCategorical,
                                 FeatureKind::kNumeric, FeatureKind::kNumeric,
                                 FeatureKind::kNumeric};
  config.schema.class_set = {"cat", "dog"};
  config.critical_class = "cat";
  config.levels = {{"black", "brown", "white"}, {"long", "short"}};
  config.numeric_sd = 1.0;
  config.categorical_noise = 0.05;
  // "*" draws a categorical level uniformly.
  config.subgroups = {
      {"white-cat", "cat", {"white", "*"}, {8.0, 4.0, 6.0}, 150, 150, false},
      {"brown-cat", "cat", {"brown", "*"}, {5.0, 4.0, 6.0}, 150, 150, false},
      {"black-dog", "dog", {"black", "*"}, {1.5, 7.0, 6.0}, 150, 150, false},
      {"white-dog", "dog", {"white", "*"}, {8.0, 7.0, 6.0}, 150, 100, true},
  };
  return config;
}

GeneratedData InjectBias(const BiasConfig& config, unsigned long long seed) {
  config.schema.Validate();
  if (!config.schema.HasClass(config.critical_class)) {
    throw ValidationError("critical class '" + config.critical_class +
                          "' is not in the class set");
  }
  std::vector<std::size_t> categorical;
  std::vector<std::size_t> numeric;
  for (std::size_t f = 0; f < config.schema.num_features(); ++f) {
    if (config.schema.feature_kinds[f] == FeatureKind::kCategorical) {
      categorical.push_back(f);
    } else {
      numeric.push_back(f);
    }
  }
  if (config.levels.size() != categorical.size()) {
    throw ValidationError("one level list per categorical feature expected");
  }
  for (const std::string& label : config.schema.class_set) {
    bool present = false;
    for (const SubgroupSpec& g : config.subgroups) {
      if (g.label == label && !g.removed && g.train_count > 0) present = true;
    }
    if (!present) {
      throw ValidationError("class '" + label +
                            "' has no training rows after removal");
    }
  }

  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, config.numeric_sd);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  auto sample = [&](const SubgroupSpec& g, const std::string& id) {
    if (g.categorical.size() != categorical.size() ||
        g.numeric_mean.size() != numeric.size()) {
      throw ValidationError("subgroup '" + g.name +
                            "' does not match the schema");
    }
    Instance row;
    row.id = id;
    row.features.resize(config.schema.num_features());
    for (std::size_t c = 0; c < categorical.size(); ++c) {
      const auto& levels = config.levels[c];
      std::uniform_int_distribution<std::size_t> any(0, levels.size() - 1);
      std::string value = g.categorical[c];
      if (value == "*" || coin(rng) < config.categorical_noise) {
        value = levels[any(rng)];
      }
      row.features[categorical[c]] = value;
    }
    for (std::size_t m = 0; m < numeric.size(); ++m) {
      double v = g.numeric_mean[m] + noise(rng);
      if (config.schema.feature_kinds[numeric[m]] == FeatureKind::kBinary) {
        v = v >= 0.5 ? 1.0 : 0.0;
      } else {
        v = Round2(v);
      }
      row.features[numeric[m]] = v;
    }
    return row;
  };

  GeneratedData data;
  data.critical_class = config.critical_class;
  data.dataset.schema = config.schema;
  std::vector<std::string> train_labels;
  for (std::size_t gi = 0; gi < config.subgroups.size(); ++gi) {
    const SubgroupSpec& g = config.subgroups[gi];
    data.group_names.push_back(g.name);
    for (std::size_t i = 0; i < g.train_count; ++i) {
      Instance row = sample(g, "train-" + g.name + "-" + std::to_string(i));
      if (g.removed) continue;
      data.training.push_back(std::move(row));
      train_labels.push_back(g.label);
    }
  }
  for (std::size_t gi = 0; gi < config.subgroups.size(); ++gi) {
    const SubgroupSpec& g = config.subgroups[gi];
    for (std::size_t i = 0; i < g.test_count; ++i) {
      Instance row = sample(g, g.name + "-" + std::to_string(i));
      data.dataset.truth.Set(row.id, HiddenTruth{g.label, std::nullopt});
      data.dataset.instances.push_back(std::move(row));
      data.group_of.push_back(gi);
    }
  }

  FeatureEncoder encoder(config.schema, data.training);
  encoder.AddLevels(data.dataset.instances);
  CentroidScorer scorer;
  scorer.classes = config.schema.class_set;
  scorer.centroids.assign(scorer.classes.size(),
                          std::vector<double>(encoder.dim(), 0.0));
  std::vector<std::size_t> counts(scorer.classes.size(), 0);
  for (std::size_t i = 0; i < data.training.size(); ++i) {
    const auto c = static_cast<std::size_t>(
        std::find(scorer.classes.begin(), scorer.classes.end(),
                  train_labels[i]) -
        scorer.classes.begin());
    const std::vector<double> x = encoder.Encode(data.training[i]);
    for (std::size_t d = 0; d < x.size(); ++d) scorer.centroids[c][d] += x[d];
    ++counts[c];
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    for (double& v : scorer.centroids[c]) {
      v /= static_cast<double>(counts[c]);
    }
  }
  for (Instance& row : data.dataset.instances) {
    auto [label, confidence] = scorer.Score(encoder.Encode(row));
    row.predicted_label = label;
    row.confidence = std::round(confidence * 1e4) / 1e4;
  }
  return data;
}

GeneratedData GenerateSkewed(const SkewedConfig& config,
                             unsigned long long seed) {
  const std::size_t groups = config.concentrations.size();
  if (groups == 0 || config.mean_confidence.size() != groups) {
    throw ValidationError("one confidence mean per group expected");
  }
  if (config.group_size == 0) throw ValidationError("empty groups");
  GeneratedData data;
  data.critical_class = "positive";
  DatasetSchema& schema = data.dataset.schema;
  schema.feature_names = {"segment", "channel", "score", "flag"};
  schema.feature_kinds = {FeatureKind::kCategorical, FeatureKind::kCategorical,
                          FeatureKind::kNumeric, FeatureKind::kBinary};
  schema.class_set = {"positive", "negative"};
  const std::vector<std::string> channels = {"phone", "store", "web"};

  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> channel(0, channels.size() - 1);
  std::uniform_real_distribution<double> score(0.0, 10.0);
  std::bernoulli_distribution flag(0.5);
  auto fill = [&](Instance& row, std::size_t g) {
    row.features = {"s" + std::to_string(g + 1), channels[channel(rng)],
                    std::round(score(rng) * 10.0) / 10.0,
                    flag(rng) ? 1.0 : 0.0};
  };
  const double lo = kDefaultTau + 0.005;
  for (std::size_t g = 0; g < groups; ++g) {
    data.group_names.push_back("s" + std::to_string(g + 1));
    const auto uu_count = static_cast<std::size_t>(std::lround(
        config.concentrations[g] * static_cast<double>(config.group_size)));
    std::vector<bool> is_uu(config.group_size, false);
    std::fill(is_uu.begin(), is_uu.begin() + static_cast<std::ptrdiff_t>(
                                                 std::min(uu_count, is_uu.size())),
              true);
    std::shuffle(is_uu.begin(), is_uu.end(), rng);
    std::normal_distribution<double> conf(config.mean_confidence[g],
                                          config.confidence_sd);
    for (std::size_t i = 0; i < config.group_size; ++i) {
      Instance row;
      row.id = "s" + std::to_string(g + 1) + "-" + std::to_string(i);
      fill(row, g);
      row.predicted_label = data.critical_class;
      row.confidence =
          std::round(std::clamp(conf(rng), lo, 0.995) * 1e4) / 1e4;
      data.dataset.truth.Set(
          row.id, HiddenTruth{is_uu[i] ? "negative" : "positive", std::nullopt});
      data.dataset.instances.push_back(std::move(row));
      data.group_of.push_back(g);
    }
  }
  std::uniform_int_distribution<std::size_t> any_group(0, groups - 1);
  for (std::size_t i = 0; i < config.training_rows; ++i) {
    Instance row;
    row.id = "train-" + std::to_string(i);
    fill(row, any_group(rng));
    data.training.push_back(std::move(row));
  }
  return data;
}

std::vector<std::vector<std::string>> GroupArms(const GeneratedData& data) {
  std::vector<std::vector<std::string>> arms(data.group_names.size());
  for (std::size_t i = 0; i < data.dataset.instances.size(); ++i) {
    arms[data.group_of[i]].push_back(data.dataset.instances[i].id);
  }
  std::erase_if(arms, [](const auto& a) { return a.empty(); });
  return arms;
}

std::string FormatEntropyTable(const EntropyReport& report) {
  std::ostringstream out;
  out << "scheme\tentropy\n";
  out << "dsp\t" << FormatFixed(report.entropy, 4) << "\n";
  for (const auto& [name, value] : report.baseline_entropies) {
    out << name << "\t" << FormatFixed(value, 4) << "\n";
  }
  return out.str();
}

std::string FormatRegretTable(const std::vector<RegretCurve>& curves) {
  std::ostringstream out;
  out << "step";
  std::size_t steps = 0;
  for (const RegretCurve& c : curves) {
    out << "\t" << c.policy;
    steps = std::max(steps, c.mean_cumulative_regret.size());
  }
  out << "\n";
  for (std::size_t s = 0; s < steps; ++s) {
    out << (s + 1);
    for (const RegretCurve& c : curves) {
      out << "\t";
      if (s < c.mean_cumulative_regret.size()) {
        out << FormatFixed(c.mean_cumulative_regret[s], 6);
      }
    }
    out << "\n";
  }
  return out.str();
}

std::string RenderRegretSvg(const std::vector<RegretCurve>& curves,
                            const std::string& title) {
  constexpr double kWidth = 720.0;
  constexpr double kHeight = 440.0;
  constexpr double kLeft = 70.0;
  constexpr double kRight = 190.0;
  constexpr double kTop = 40.0;
  constexpr double kBottom = 50.0;
  static const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                        "#ff7f0e", "#9467bd", "#8c564b",
                                        "#e377c2", "#7f7f7f", "#17becf"};
  std::size_t steps = 1;
  double lo = 0.0;
  double hi = 0.0;
  for (const RegretCurve& c : curves) {
    steps = std::max(steps, c.mean_cumulative_regret.size());
    for (double v : c.mean_cumulative_regret) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi - lo < 1e-9) hi = lo + 1.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto x_of = [&](double step) {
    return kLeft + (steps > 1 ? (step - 1.0) / static_cast<double>(steps - 1)
                              : 0.0) * plot_w;
  };
  auto y_of = [&](double v) { return kTop + (hi - v) / (hi - lo) * plot_h; };
  auto esc = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
      }
    }
    return out;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\" "
      << "font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"15\">"
      << esc(title) << "</text>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\""
      << kLeft + plot_w << "\" y2=\"" << kTop + plot_h
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = lo + (hi - lo) * tick / 4.0;
    const double y = y_of(v);
    svg << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << FormatFixed(y, 2)
        << "\" x2=\"" << kLeft << "\" y2=\"" << FormatFixed(y, 2)
        << "\" stroke=\"black\"/>";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << FormatFixed(y + 4, 2)
        << "\" text-anchor=\"end\">" << FormatFixed(v, 1) << "</text>\n";
    const double step = 1.0 + (static_cast<double>(steps) - 1.0) * tick / 4.0;
    const double x = x_of(step);
    svg << "<text x=\"" << FormatFixed(x, 2) << "\" y=\""
        << kTop + plot_h + 18 << "\" text-anchor=\"middle\">"
        << std::lround(step) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">step</text>\n";
  svg << "<text x=\"16\" y=\"" << kTop + plot_h / 2
      << "\" transform=\"rotate(-90 16 " << kTop + plot_h / 2
      << ")\" text-anchor=\"middle\">mean cumulative regret</text>\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const char* color = kColors[i % std::size(kColors)];
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    const auto& values = curves[i].mean_cumulative_regret;
    for (std::size_t s = 0; s < values.size(); ++s) {
      if (s > 0) svg << " ";
      svg << FormatFixed(x_of(static_cast<double>(s + 1)), 2) << ","
          << FormatFixed(y_of(values[s]), 2);
    }
    svg << "\"/>\n";
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(i);
    svg << "<line x1=\"" << kWidth - kRight + 15 << "\" y1=\"" << ly - 4
        << "\" x2=\"" << kWidth - kRight + 35 << "\" y2=\"" << ly - 4
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
    svg << "<text x=\"" << kWidth - kRight + 40 << "\" y=\"" << ly << "\">"
        << esc(curves[i].policy) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace uud
