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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "uud/encoding.h"
#include "uud/error.h"
#include "uud/text.h"

namespace uud {

void LambdaWeights::Validate() const {
  bool any_positive = false;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError("lambda weights must be finite and >= 0");
    }
    any_positive = any_positive || v > 0.0;
  }
  if (!any_positive) throw ValidationError("lambda weights are all zero");
}

std::string LambdaWeights::ToString() const {
  std::string out = "(";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ",";
    out += FormatDouble(values[i]);
  }
  return out + ")";
}

std::vector<double> DefaultLambdaGrid() { return {0.0, 0.25, 0.5, 1.0, 2.0}; }

ScoredPatterns ScorePatterns(const SearchSpace& space, const PatternSet& set) {
  ScoredPatterns scored;
  scored.patterns = set.patterns;
  const FeatureEncoder encoder(space.schema, space.instances);
  scored.encoded = encoder.EncodeAll(space.instances);
  const std::size_t dim = encoder.dim();
  const std::size_t n = space.size();

  scored.stats.reserve(set.size());
  for (const Pattern& p : set.patterns) {
    PatternStats stats;
    stats.covered = CoveredBy(p, space);
    if (stats.covered.empty()) {
      throw Error("stats undefined on empty coverage: " +
                  DescribePattern(p, space));
    }
    stats.centroid.assign(dim, 0.0);
    double conf = 0.0;
    for (std::size_t i : stats.covered) {
      for (std::size_t d = 0; d < dim; ++d) {
        stats.centroid[d] += scored.encoded[i][d];
      }
      conf += space.instances[i].confidence;
    }
    const double m = static_cast<double>(stats.covered.size());
    for (double& c : stats.centroid) c /= m;
    stats.mean_confidence = conf / m;
    scored.stats.push_back(std::move(stats));
  }

  // The inter-partition sums run over every other pattern, so precompute each
  // row's total distance to all centroids and subtract its own term.
  std::vector<double> feature_total(n, 0.0);
  std::vector<double> confidence_total(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = space.instances[i].confidence;
    for (const PatternStats& stats : scored.stats) {
      feature_total[i] += EuclideanDistance(scored.encoded[i], stats.centroid);
      confidence_total[i] += std::abs(s - stats.mean_confidence);
    }
  }

  scored.metrics.reserve(set.size());
  for (std::size_t q = 0; q < set.size(); ++q) {
    const PatternStats& stats = scored.stats[q];
    GoodnessMetrics g;
    double feature_sum = 0.0;
    double confidence_sum = 0.0;
    for (std::size_t i : stats.covered) {
      g.g1 += EuclideanDistance(scored.encoded[i], stats.centroid);
      g.g3 += std::abs(space.instances[i].confidence - stats.mean_confidence);
      feature_sum += feature_total[i];
      confidence_sum += confidence_total[i];
    }
    g.g2 = std::max(0.0, feature_sum - g.g1);
    g.g4 = std::max(0.0, confidence_sum - g.g3);
    g.g5 = static_cast<double>(set.patterns[q].size());
    scored.metrics.push_back(g);
  }
  return scored;
}

GoodnessMetrics ComputeGoodnessMetrics(std::size_t index,
                                       const SearchSpace& space,
                                       const PatternSet& set) {
  if (index >= set.size()) throw Error("pattern index out of range");
  const FeatureEncoder encoder(space.schema, space.instances);
  const PatternStats own = ComputePatternStats(set.patterns[index], space);
  std::vector<PatternStats> others;
  for (std::size_t q = 0; q < set.size(); ++q) {
    if (q != index) others.push_back(ComputePatternStats(set.patterns[q], space));
  }
  GoodnessMetrics g;
  for (std::size_t i : own.covered) {
    const Instance& inst = space.instances[i];
    const std::vector<double> x = encoder.Encode(inst);
    g.g1 += EuclideanDistance(x, own.centroid);
    g.g3 += std::abs(inst.confidence - own.mean_confidence);
    for (const PatternStats& other : others) {
      g.g2 += EuclideanDistance(x, other.centroid);
      g.g4 += std::abs(inst.confidence - other.mean_confidence);
    }
  }
  g.g5 = static_cast<double>(set.patterns[index].size());
  return g;
}

double CombinedGoodness(const GoodnessMetrics& m, const LambdaWeights& lambda) {
  return lambda[0] * m.g1 - lambda[1] * m.g2 + lambda[2] * m.g3 -
         lambda[3] * m.g4 + lambda[4] * m.g5;
}

SelectionWeights ComputeSelectionWeights(
    const std::vector<GoodnessMetrics>& metrics, const LambdaWeights& lambda) {
  SelectionWeights w;
  w.raw.reserve(metrics.size());
  for (const auto& m : metrics) w.raw.push_back(CombinedGoodness(m, lambda));
  if (w.raw.empty()) return w;
  const double min_raw = *std::min_element(w.raw.begin(), w.raw.end());
  if (min_raw > 0.0) {
    w.shifted = w.raw;
    return w;
  }
  w.shift = kWeightEpsilon - min_raw;
  w.shifted.reserve(w.raw.size());
  // (g - min) + eps rather than g + shift keeps eps from being absorbed
  // when |min| is large.
  for (double g : w.raw) w.shifted.push_back((g - min_raw) + kWeightEpsilon);
  return w;
}

Partitioning GreedyPartition(const ScoredPatterns& scored,
                             const LambdaWeights& lambda) {
  lambda.Validate();
  const std::size_t n = scored.encoded.size();
  const std::size_t q_count = scored.patterns.size();
  const SelectionWeights weights =
      ComputeSelectionWeights(scored.metrics, lambda);

  Partitioning result;
  result.lambda = lambda;
  result.shift = weights.shift;

  std::vector<bool> uncovered(n, true);
  std::size_t remaining = n;
  std::vector<bool> used(q_count, false);
  while (remaining > 0) {
    std::size_t best = q_count;
    double best_ratio = -1.0;
    for (std::size_t q = 0; q < q_count; ++q) {
      if (used[q]) continue;
      std::size_t gain = 0;
      for (std::size_t i : scored.stats[q].covered) gain += uncovered[i];
      if (gain == 0) continue;
      const double ratio = static_cast<double>(gain) / weights.shifted[q];
      if (best == q_count || ratio > best_ratio) {
        best = q;
        best_ratio = ratio;
      }
    }
    if (best == q_count) {
      throw Error("pattern set does not cover the search space");
    }
    used[best] = true;
    result.selected.push_back(best);
    result.selected_weight += weights.shifted[best];
    for (std::size_t i : scored.stats[best].covered) {
      if (uncovered[i]) {
        uncovered[i] = false;
        --remaining;
      }
    }
  }

  // Instances covered by several selected patterns go to the closest
  // centroid; equal distances keep the earlier selection.
  const std::size_t k = result.selected.size();
  std::vector<std::vector<std::size_t>> members(k);
  std::vector<std::vector<std::size_t>> covering(n);
  for (std::size_t s = 0; s < k; ++s) {
    for (std::size_t i : scored.stats[result.selected[s]].covered) {
      covering[i].push_back(s);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best_slot = covering[i].front();
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t s : covering[i]) {
      const double d = EuclideanDistance(
          scored.encoded[i], scored.stats[result.selected[s]].centroid);
      if (d < best_distance) {
        best_distance = d;
        best_slot = s;
      }
    }
    members[best_slot].push_back(i);
  }

  for (std::size_t s = 0; s < k; ++s) {
    if (members[s].empty()) continue;
    const std::size_t q = result.selected[s];
    Partition part;
    part.pattern_index = q;
    part.pattern = scored.patterns[q];
    part.members = std::move(members[s]);
    part.stats = scored.stats[q];
    part.raw_goodness = weights.raw[q];
    result.partitions.push_back(std::move(part));
  }
  result.objective_value = ObjectiveValue(result);
  return result;
}

Partitioning GreedyPartition(const SearchSpace& space, const PatternSet& set,
                             const LambdaWeights& lambda) {
  return GreedyPartition(ScorePatterns(space, set), lambda);
}

double ObjectiveValue(const Partitioning& partitioning) {
  double total = 0.0;
  for (const Partition& p : partitioning.partitions) total += p.raw_goodness;
  return total;
}

bool IsValidPartitioning(const Partitioning& partitioning, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (const Partition& p : partitioning.partitions) {
    if (p.members.empty()) return false;
    for (std::size_t i : p.members) {
      if (i >= n || seen[i]++ > 0) return false;
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

TuneResult TuneLambda(const SearchSpace& validation, const PatternSet& set,
                      const std::vector<double>& grid, int max_cycles) {
  TuneResult result;
  if (grid.empty()) throw ConfigError("lambda grid is empty");
  for (double v : grid) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError("lambda grid values must be finite and >= 0");
    }
  }
  if (validation.size() == 0) {
    result.warnings.push_back(
        "validation space is empty; using lambda (1,1,1,1,1)");
    return result;
  }
  const PatternSet restricted = RestrictToSpace(set, validation);
  const ScoredPatterns scored = ScorePatterns(validation, restricted);
  auto evaluate = [&](const LambdaWeights& lambda) {
    return GreedyPartition(scored, lambda).objective_value;
  };

  LambdaWeights lambda;
  double best = evaluate(lambda);
  for (int cycle = 1; cycle <= max_cycles; ++cycle) {
    result.cycles = cycle;
    bool changed = false;
    for (std::size_t c = 0; c < lambda.values.size(); ++c) {
      const double current = lambda[c];
      double best_value = current;
      double best_objective = best;
      for (double v : grid) {
        if (v == current) continue;
        LambdaWeights candidate = lambda;
        candidate[c] = v;
        if (std::all_of(candidate.values.begin(), candidate.values.end(),
                        [](double x) { return x == 0.0; })) {
          continue;
        }
        const double objective = evaluate(candidate);
        const double tolerance = 1e-12 * std::max(1.0, std::abs(best_objective));
        if (objective < best_objective - tolerance) {
          best_objective = objective;
          best_value = v;
        }
      }
      if (best_value != current) {
        lambda[c] = best_value;
        best = best_objective;
        changed = true;
      }
    }
    if (!changed) break;
  }
  result.lambda = lambda;
  result.objective = best;
  return result;
}

SearchSpace ValidationSplit(const SearchSpace& space, double fraction,
                            unsigned long long seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("validation fraction must lie in (0,1]");
  }
  SearchSpace out = space;
  out.instances.clear();
  if (space.size() == 0) return out;
  const auto take = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::ceil(fraction * static_cast<double>(space.size()))));
  std::vector<std::size_t> order(space.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(std::min(take, order.size()));
  std::sort(order.begin(), order.end());
  for (std::size_t i : order) out.instances.push_back(space.instances[i]);
  return out;
}

std::string FormatPartitioningReport(const Partitioning& partitioning,
                                     const SearchSpace& space) {
  std::ostringstream out;
  out << "# partitions=" << partitioning.size()
      << " objective=" << FormatFixed(partitioning.objective_value, 6)
      << " shift=" << FormatFixed(partitioning.shift, 6)
      << " lambda=" << partitioning.lambda.ToString() << '\n';
  out << "partition\tmembers\tmean_confidence\tcontribution\tdescription\n";
  for (std::size_t k = 0; k < partitioning.partitions.size(); ++k) {
    const Partition& p = partitioning.partitions[k];
    double conf = 0.0;
    for (std::size_t i : p.members) conf += space.instances[i].confidence;
    conf /= static_cast<double>(p.members.size());
    out << k << '\t' << p.members.size() << '\t' << FormatFixed(conf, 4)
        << '\t' << FormatFixed(p.raw_goodness, 6) << '\t'
        << DescribePattern(p.pattern, space) << '\n';
  }
  return out.str();
}

std::vector<std::vector<std::string>> PartitionMemberIds(
    const Partitioning& partitioning, const SearchSpace& space) {
  std::vector<std::vector<std::string>> out;
  out.reserve(partitioning.size());
  for (const Partition& p : partitioning.partitions) {
    std::vector<std::string> ids;
    ids.reserve(p.members.size());
    for (std::size_t i : p.members) ids.push_back(space.instances[i].id);
    out.push_back(std::move(ids));
  }
  return out;
}

}  // namespace uud
