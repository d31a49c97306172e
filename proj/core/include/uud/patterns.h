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

// Conjunctive patterns over the search space: Apriori mining, coverage and
// per-pattern statistics.

#ifndef UUD_PATTERNS_H_
#define UUD_PATTERNS_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "uud/corpus.h"

namespace uud {

enum class CompareOp { kEq, kNe, kLe, kLt, kGe, kGt };

std::string_view CompareOpSymbol(CompareOp op);

// (feature, operator, value). On a discretized numeric feature an equality
// predicate compares bin indices, while an ordering predicate compares the
// bin's value range against a raw threshold: bin b satisfies `f <= e` iff its
// upper edge is <= e, and `f > e` iff its lower edge is >= e.
struct Predicate {
  std::size_t feature = 0;
  CompareOp op = CompareOp::kEq;
  FeatureValue value;

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct Pattern {
  std::vector<Predicate> predicates;
  std::size_t support = 0;

  std::size_t size() const { return predicates.size(); }
};

struct PatternSet {
  std::vector<Pattern> patterns;
  // Length-1 patterns appended below min_support to keep every instance
  // coverable.
  std::size_t fallback_count = 0;
  std::vector<std::string> warnings;

  std::size_t size() const { return patterns.size(); }
};

struct PatternStats {
  std::vector<double> centroid;  // encoded (one-hot) feature space
  double mean_confidence = 0.0;
  std::vector<std::size_t> covered;  // indices into the search space
};

struct MinerOptions {
  std::size_t min_support = 2;
  std::size_t max_length = 3;

  // max(2, ceil(0.05 * n)) and length 3.
  static MinerOptions Defaults(std::size_t n);
};

// Throws ValidationError for predicates that do not fit the schema.
bool Satisfies(const SearchSpace& space, const Predicate& predicate,
               const Instance& instance);
bool Satisfies(const SearchSpace& space, const Pattern& pattern,
               const Instance& instance);

// Sorted indices of instances satisfying every predicate.
std::vector<std::size_t> CoveredBy(const Pattern& pattern,
                                   const SearchSpace& space);
std::vector<std::string> CoveredIds(const Pattern& pattern,
                                    const SearchSpace& space);

// Throws Error("stats undefined on empty coverage") when nothing is covered.
PatternStats ComputePatternStats(const Pattern& pattern,
                                 const SearchSpace& space);

// All equality conjunctions over distinct features with support >=
// min_support and length <= max_length, sorted lexicographically by
// (feature, value) predicates. Singleton fallback patterns are appended when
// the mined set leaves instances uncovered.
PatternSet MinePatterns(const SearchSpace& space, const MinerOptions& options);

// Appends length-1 equality patterns for every item of every uncovered
// instance. Returns the number of patterns added.
std::size_t EnsureCoverage(const SearchSpace& space, PatternSet& set);

// Keeps patterns with non-empty coverage on `space`, recomputes supports and
// restores coverage with fallback singletons.
PatternSet RestrictToSpace(const PatternSet& set, const SearchSpace& space);

// Human-readable description; discretized bins render as ranges.
std::string DescribePattern(const Pattern& pattern, const SearchSpace& space);
// `f1=v1 AND f2>e2 | support=k`
std::string FormatPatternLine(const Pattern& pattern, const SearchSpace& space);
std::string FormatPatternSet(const PatternSet& set, const SearchSpace& space);

}  // namespace uud

#endif  // UUD_PATTERNS_H_
