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

// Descriptive space partitioning.
//
// Every candidate pattern q gets five goodness metrics over the search space:
//
//   g1 = sum_{x in cov(q)} d(x, c_q)                 intra feature distance
//   g2 = sum_{x in cov(q)} sum_{q' != q} d(x, c_q')  inter feature distance
//   g3 = sum_{x in cov(q)} |s_x - s_q|               intra confidence distance
//   g4 = sum_{x in cov(q)} sum_{q' != q} |s_x - s_q'| inter confidence distance
//   g5 = number of predicates
//
// with c_q and s_q the centroid and mean confidence of cov(q), d Euclidean on
// the one-hot encoding. The pattern weight is
//
//   g(q) = l1 g1 - l2 g2 + l3 g3 - l4 g4 + l5 g5
//
// and a weighted set cover of the space is found greedily by repeatedly
// taking argmax |uncovered ∩ cov(q)| / w(q). Because g(q) may be <= 0, the
// selection weights w are g shifted so the smallest is 1e-6; reported
// objective values always use the raw g.

#ifndef UUD_DSP_H_
#define UUD_DSP_H_

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "uud/corpus.h"
#include "uud/patterns.h"

namespace uud {

struct LambdaWeights {
  std::array<double, 5> values{1.0, 1.0, 1.0, 1.0, 1.0};

  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }

  // Throws ValidationError unless all entries are >= 0 and one is > 0.
  void Validate() const;
  std::string ToString() const;
  friend bool operator==(const LambdaWeights&, const LambdaWeights&) = default;
};

struct GoodnessMetrics {
  double g1 = 0.0;
  double g2 = 0.0;
  double g3 = 0.0;
  double g4 = 0.0;
  double g5 = 0.0;
};

inline constexpr double kWeightEpsilon = 1e-6;

// Default coordinate-descent grid.
std::vector<double> DefaultLambdaGrid();

// Coverage, statistics and metrics for every pattern of a set, computed once
// and shared by the greedy solver and lambda tuning.
struct ScoredPatterns {
  std::vector<Pattern> patterns;
  std::vector<PatternStats> stats;
  std::vector<GoodnessMetrics> metrics;
  std::vector<std::vector<double>> encoded;  // encoded search-space rows
};

// Throws Error if any pattern has empty coverage.
ScoredPatterns ScorePatterns(const SearchSpace& space, const PatternSet& set);

// Metrics of `set.patterns[index]`.
GoodnessMetrics ComputeGoodnessMetrics(std::size_t index,
                                       const SearchSpace& space,
                                       const PatternSet& set);

double CombinedGoodness(const GoodnessMetrics& metrics,
                        const LambdaWeights& lambda);

struct SelectionWeights {
  std::vector<double> raw;
  std::vector<double> shifted;
  double shift = 0.0;  // epsilon - min raw, or 0 when every raw value > 0
};

SelectionWeights ComputeSelectionWeights(
    const std::vector<GoodnessMetrics>& metrics, const LambdaWeights& lambda);

struct Partition {
  std::size_t pattern_index = 0;  // into the scored pattern set
  Pattern pattern;
  std::vector<std::size_t> members;  // indices into the search space
  PatternStats stats;
  double raw_goodness = 0.0;
};

struct Partitioning {
  std::vector<Partition> partitions;
  // Pattern indices in greedy selection order, including any pattern whose
  // members were all claimed by closer centroids.
  std::vector<std::size_t> selected;
  double selected_weight = 0.0;  // sum of shifted weights over `selected`
  double shift = 0.0;
  double objective_value = 0.0;
  LambdaWeights lambda;

  std::size_t size() const { return partitions.size(); }
};

Partitioning GreedyPartition(const SearchSpace& space, const PatternSet& set,
                             const LambdaWeights& lambda);
Partitioning GreedyPartition(const ScoredPatterns& scored,
                             const LambdaWeights& lambda);

// Sum of raw g(q) over the partitions.
double ObjectiveValue(const Partitioning& partitioning);

// Checks pairwise disjointness and exact coverage of [0, n).
bool IsValidPartitioning(const Partitioning& partitioning, std::size_t n);

struct TuneResult {
  LambdaWeights lambda;
  double objective = 0.0;
  int cycles = 0;
  std::vector<std::string> warnings;
};

// Coordinate descent from (1,1,1,1,1) over `grid`, minimising the partition
// objective on `validation`. A coordinate moves only on strict improvement;
// among equally good improving values the first in grid order wins.
TuneResult TuneLambda(const SearchSpace& validation, const PatternSet& set,
                      const std::vector<double>& grid, int max_cycles = 10);

// Seeded sample of `fraction` of the space (at least one instance when the
// space is non-empty).
SearchSpace ValidationSplit(const SearchSpace& space, double fraction,
                            unsigned long long seed);

// Text report: one line per partition with description, member count, mean
// member confidence and objective contribution.
std::string FormatPartitioningReport(const Partitioning& partitioning,
                                     const SearchSpace& space);

// Member id lists per partition, the form the bandit consumes.
std::vector<std::vector<std::string>> PartitionMemberIds(
    const Partitioning& partitioning, const SearchSpace& space);

}  // namespace uud

#endif  // UUD_DSP_H_
