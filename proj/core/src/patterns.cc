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

#include "uud/patterns.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "uud/encoding.h"
#include "uud/error.h"
#include "uud/text.h"

namespace uud {
namespace {

// Fixed-width bitset over search-space positions.
class TidSet {
 public:
  explicit TidSet(std::size_t n = 0) : words_((n + 63) / 64, 0) {}

  void Set(std::size_t i) { words_[i / 64] |= uint64_t{1} << (i % 64); }
  bool Test(std::size_t i) const {
    return (words_[i / 64] >> (i % 64)) & uint64_t{1};
  }
  std::size_t Count() const {
    std::size_t c = 0;
    for (uint64_t w : words_) c += std::popcount(w);
    return c;
  }
  TidSet And(const TidSet& other) const {
    TidSet out;
    out.words_.resize(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
      out.words_[i] = words_[i] & other.words_[i];
    }
    return out;
  }

 private:
  std::vector<uint64_t> words_;
};

struct Item {
  std::size_t feature;
  FeatureValue value;

  friend bool operator<(const Item& a, const Item& b) {
    if (a.feature != b.feature) return a.feature < b.feature;
    return a.value < b.value;
  }
};

using ItemSet = std::vector<uint32_t>;

struct FrequentSet {
  ItemSet items;
  TidSet tids;
  std::size_t support;
};

// Items ordered by (feature, value); ids follow that order so sorting item
// id vectors sorts patterns lexicographically by predicates.
struct ItemTable {
  std::vector<Item> items;
  std::vector<TidSet> tids;

  explicit ItemTable(const SearchSpace& space) {
    std::map<Item, std::vector<std::size_t>> occurrences;
    for (std::size_t i = 0; i < space.size(); ++i) {
      const Instance& inst = space.instances[i];
      for (std::size_t f = 0; f < inst.features.size(); ++f) {
        occurrences[Item{f, inst.features[f]}].push_back(i);
      }
    }
    for (auto& [item, rows] : occurrences) {
      TidSet t(space.size());
      for (std::size_t r : rows) t.Set(r);
      items.push_back(item);
      tids.push_back(std::move(t));
    }
  }
};

Pattern ToPattern(const ItemTable& table, const ItemSet& set,
                  std::size_t support) {
  Pattern p;
  p.support = support;
  for (uint32_t id : set) {
    p.predicates.push_back(
        Predicate{table.items[id].feature, CompareOp::kEq, table.items[id].value});
  }
  return p;
}

bool IsOrdering(CompareOp op) {
  return op != CompareOp::kEq && op != CompareOp::kNe;
}

template <typename T>
bool Compare(const T& lhs, CompareOp op, const T& rhs) {
  switch (op) {
    case CompareOp::kEq:
      return lhs == rhs;
    case CompareOp::kNe:
      return lhs != rhs;
    case CompareOp::kLe:
      return lhs <= rhs;
    case CompareOp::kLt:
      return lhs < rhs;
    case CompareOp::kGe:
      return lhs >= rhs;
    case CompareOp::kGt:
      return lhs > rhs;
  }
  return false;
}

}  // namespace

std::string_view CompareOpSymbol(CompareOp op) {
  switch (op) {
    case CompareOp::kEq:
      return "=";
    case CompareOp::kNe:
      return "!=";
    case CompareOp::kLe:
      return "<=";
    case CompareOp::kLt:
      return "<";
    case CompareOp::kGe:
      return ">=";
    case CompareOp::kGt:
      return ">";
  }
  return "=";
}

MinerOptions MinerOptions::Defaults(std::size_t n) {
  MinerOptions options;
  options.min_support = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(n))));
  options.max_length = 3;
  return options;
}

bool Satisfies(const SearchSpace& space, const Predicate& predicate,
               const Instance& instance) {
  const std::size_t f = predicate.feature;
  if (f >= space.schema.num_features()) {
    throw ValidationError("predicate references unknown feature");
  }
  const FeatureKind kind = space.schema.feature_kinds[f];
  const FeatureValue& actual = instance.features[f];
  if (kind == FeatureKind::kCategorical) {
    const auto* want = std::get_if<std::string>(&predicate.value);
    if (want == nullptr || IsOrdering(predicate.op)) {
      throw ValidationError("categorical predicates support only = and !=");
    }
    return Compare(std::get<std::string>(actual), predicate.op, *want);
  }
  const auto* threshold = std::get_if<double>(&predicate.value);
  if (threshold == nullptr) {
    throw ValidationError("predicate on '" + space.schema.feature_names[f] +
                          "' needs a numeric value");
  }
  const double value = std::get<double>(actual);
  if (kind == FeatureKind::kNumeric && space.discretized &&
      IsOrdering(predicate.op)) {
    const auto& edges = space.bin_edges[f];
    const auto bin = static_cast<std::size_t>(value);
    constexpr double kInf = std::numeric_limits<double>::infinity();
    const double lower = bin == 0 ? -kInf : edges[bin - 1];
    const double upper = bin >= edges.size() ? kInf : edges[bin];
    switch (predicate.op) {
      case CompareOp::kLe:
        return upper <= *threshold;
      case CompareOp::kLt:
        return upper < *threshold;
      case CompareOp::kGe:
      case CompareOp::kGt:
        return lower >= *threshold;
      default:
        break;
    }
  }
  return Compare(value, predicate.op, *threshold);
}

bool Satisfies(const SearchSpace& space, const Pattern& pattern,
               const Instance& instance) {
  for (const Predicate& p : pattern.predicates) {
    if (!Satisfies(space, p, instance)) return false;
  }
  return true;
}

std::vector<std::size_t> CoveredBy(const Pattern& pattern,
                                   const SearchSpace& space) {
  std::vector<std::size_t> covered;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (Satisfies(space, pattern, space.instances[i])) covered.push_back(i);
  }
  return covered;
}

std::vector<std::string> CoveredIds(const Pattern& pattern,
                                    const SearchSpace& space) {
  std::vector<std::string> ids;
  for (std::size_t i : CoveredBy(pattern, space)) {
    ids.push_back(space.instances[i].id);
  }
  return ids;
}

PatternStats ComputePatternStats(const Pattern& pattern,
                                 const SearchSpace& space) {
  PatternStats stats;
  stats.covered = CoveredBy(pattern, space);
  if (stats.covered.empty()) {
    throw Error("stats undefined on empty coverage");
  }
  const FeatureEncoder encoder(space.schema, space.instances);
  stats.centroid.assign(encoder.dim(), 0.0);
  double confidence_sum = 0.0;
  for (std::size_t i : stats.covered) {
    const std::vector<double> x = encoder.Encode(space.instances[i]);
    for (std::size_t d = 0; d < x.size(); ++d) stats.centroid[d] += x[d];
    confidence_sum += space.instances[i].confidence;
  }
  const double n = static_cast<double>(stats.covered.size());
  for (double& c : stats.centroid) c /= n;
  stats.mean_confidence = confidence_sum / n;
  return stats;
}

PatternSet MinePatterns(const SearchSpace& space, const MinerOptions& options) {
  const std::size_t n = space.size();
  if (options.min_support < 1 || options.min_support > n) {
    throw ValidationError("min_support must lie in [1, N]");
  }
  if (options.max_length < 1) {
    throw ValidationError("max_length must be >= 1");
  }
  const ItemTable table(space);

  std::vector<FrequentSet> level;
  for (uint32_t id = 0; id < table.items.size(); ++id) {
    const std::size_t support = table.tids[id].Count();
    if (support >= options.min_support) {
      level.push_back(FrequentSet{{id}, table.tids[id], support});
    }
  }
  std::vector<FrequentSet> frequent = level;

  for (std::size_t k = 2; k <= options.max_length && level.size() > 1; ++k) {
    std::set<ItemSet> previous;
    for (const auto& s : level) previous.insert(s.items);
    std::vector<FrequentSet> next;
    for (std::size_t a = 0; a < level.size(); ++a) {
      for (std::size_t b = a + 1; b < level.size(); ++b) {
        const ItemSet& x = level[a].items;
        const ItemSet& y = level[b].items;
        if (!std::equal(x.begin(), x.end() - 1, y.begin())) break;
        const uint32_t last_x = x.back();
        const uint32_t last_y = y.back();
        if (table.items[last_x].feature == table.items[last_y].feature) continue;
        ItemSet candidate = x;
        candidate.push_back(last_y);
        // Apriori pruning: every (k-1)-subset must itself be frequent.
        bool all_frequent = true;
        for (std::size_t drop = 0; drop + 2 < candidate.size(); ++drop) {
          ItemSet subset;
          for (std::size_t i = 0; i < candidate.size(); ++i) {
            if (i != drop) subset.push_back(candidate[i]);
          }
          if (!previous.contains(subset)) {
            all_frequent = false;
            break;
          }
        }
        if (!all_frequent) continue;
        TidSet tids = level[a].tids.And(table.tids[last_y]);
        const std::size_t support = tids.Count();
        if (support >= options.min_support) {
          next.push_back(FrequentSet{std::move(candidate), std::move(tids), support});
        }
      }
    }
    frequent.insert(frequent.end(), next.begin(), next.end());
    level = std::move(next);
  }

  std::sort(frequent.begin(), frequent.end(),
            [](const FrequentSet& a, const FrequentSet& b) {
              return a.items < b.items;
            });
  PatternSet out;
  out.patterns.reserve(frequent.size());
  for (const auto& s : frequent) {
    out.patterns.push_back(ToPattern(table, s.items, s.support));
  }
  if (out.patterns.empty()) {
    out.warnings.push_back("no pattern reaches min_support " +
                           std::to_string(options.min_support));
  }
  EnsureCoverage(space, out);
  return out;
}

std::size_t EnsureCoverage(const SearchSpace& space, PatternSet& set) {
  std::vector<bool> covered(space.size(), false);
  for (const Pattern& p : set.patterns) {
    for (std::size_t i : CoveredBy(p, space)) covered[i] = true;
  }
  std::set<Item> present;
  for (const Pattern& p : set.patterns) {
    if (p.size() == 1 && p.predicates[0].op == CompareOp::kEq) {
      present.insert(Item{p.predicates[0].feature, p.predicates[0].value});
    }
  }
  std::set<Item> needed;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (covered[i]) continue;
    const Instance& inst = space.instances[i];
    for (std::size_t f = 0; f < inst.features.size(); ++f) {
      Item item{f, inst.features[f]};
      if (!present.contains(item)) needed.insert(std::move(item));
    }
  }
  for (const Item& item : needed) {
    Pattern p;
    p.predicates.push_back(Predicate{item.feature, CompareOp::kEq, item.value});
    p.support = CoveredBy(p, space).size();
    set.patterns.push_back(std::move(p));
  }
  if (!needed.empty()) {
    set.fallback_count += needed.size();
    set.warnings.push_back("appended " + std::to_string(needed.size()) +
                           " singleton fallback patterns to cover the space");
  }
  return needed.size();
}

PatternSet RestrictToSpace(const PatternSet& set, const SearchSpace& space) {
  PatternSet out;
  for (const Pattern& p : set.patterns) {
    const std::size_t support = CoveredBy(p, space).size();
    if (support == 0) continue;
    Pattern copy = p;
    copy.support = support;
    out.patterns.push_back(std::move(copy));
  }
  EnsureCoverage(space, out);
  return out;
}

std::string DescribePattern(const Pattern& pattern, const SearchSpace& space) {
  std::vector<std::string> parts;
  for (const Predicate& p : pattern.predicates) {
    const std::string& name = space.schema.feature_names.at(p.feature);
    const bool binned = space.discretized &&
                        space.schema.feature_kinds[p.feature] ==
                            FeatureKind::kNumeric &&
                        p.op == CompareOp::kEq;
    if (binned) {
      const auto& edges = space.bin_edges[p.feature];
      const auto bin = static_cast<std::size_t>(std::get<double>(p.value));
      if (edges.empty()) {
        parts.push_back(name + "=any");
        continue;
      }
      if (bin > 0) parts.push_back(name + ">" + FormatCompact(edges[bin - 1]));
      if (bin < edges.size()) {
        parts.push_back(name + "<=" + FormatCompact(edges[bin]));
      }
      continue;
    }
    parts.push_back(name + std::string(CompareOpSymbol(p.op)) +
                    FormatValue(p.value));
  }
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += " AND ";
    out += parts[i];
  }
  return out;
}

std::string FormatPatternLine(const Pattern& pattern,
                              const SearchSpace& space) {
  return DescribePattern(pattern, space) +
         " | support=" + std::to_string(pattern.support);
}

std::string FormatPatternSet(const PatternSet& set, const SearchSpace& space) {
  std::string out;
  for (const Pattern& p : set.patterns) {
    out += FormatPatternLine(p, space);
    out += '\n';
  }
  return out;
}

}  // namespace uud
