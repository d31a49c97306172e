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

// Ingestion of scored predictions and construction of the high-confidence
// search space.
//
// An instance file is comma-separated text with a header row. Required
// columns are `id`, `predicted_label`, `confidence` and one column per schema
// feature; `true_label`, `cost` and `length` are optional. The hidden
// columns (`true_label`, `cost`) never reach an `Instance`: they are split
// into a `TruthTable` that only the oracle and evaluation code read.
//
// A schema file is JSON:
//
//   {"features": [{"name": "f1", "kind": "binary"}, ...],
//    "classes": ["cat", "dog"]}

#ifndef UUD_CORPUS_H_
#define UUD_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace uud {

enum class FeatureKind { kNumeric, kCategorical, kBinary };

std::string_view FeatureKindName(FeatureKind kind);
FeatureKind ParseFeatureKind(std::string_view name);

// Numeric and binary features hold doubles, categorical features strings.
using FeatureValue = std::variant<double, std::string>;

std::string FormatValue(const FeatureValue& value);

struct DatasetSchema {
  std::vector<std::string> feature_names;
  std::vector<FeatureKind> feature_kinds;
  std::vector<std::string> class_set;

  std::size_t num_features() const { return feature_names.size(); }
  std::optional<std::size_t> FeatureIndex(std::string_view name) const;
  bool HasClass(std::string_view label) const;

  // Throws ValidationError on duplicate names, size mismatch or an empty
  // class set.
  void Validate() const;
};

// The part of a test point that policies may see.
struct Instance {
  std::string id;
  std::vector<FeatureValue> features;
  std::string predicted_label;
  double confidence = 0.0;
  // Designated length attribute for the variable cost model.
  std::optional<double> length;
};

// Fields only the oracle and the evaluation harness may read.
struct HiddenTruth {
  std::optional<std::string> true_label;
  std::optional<double> cost;
};

class TruthTable {
 public:
  void Set(const std::string& id, HiddenTruth truth);
  const HiddenTruth* Find(const std::string& id) const;
  bool HasLabel(const std::string& id) const;
  std::size_t size() const { return rows_.size(); }

 private:
  std::unordered_map<std::string, HiddenTruth> rows_;
};

struct Dataset {
  DatasetSchema schema;
  std::vector<Instance> instances;
  TruthTable truth;
  // Per-feature quantile bin edges; non-empty only for discretized numeric
  // features. Bin b holds values v with edges[b-1] < v <= edges[b].
  std::vector<std::vector<double>> bin_edges;
  bool discretized = false;
  std::vector<std::string> warnings;
};

struct SearchSpace {
  DatasetSchema schema;
  std::vector<std::vector<double>> bin_edges;
  bool discretized = false;
  std::vector<Instance> instances;
  std::string critical_class;
  double tau = 0.65;

  std::size_t size() const { return instances.size(); }
};

inline constexpr double kDefaultTau = 0.65;

DatasetSchema LoadSchema(const std::filesystem::path& path);
DatasetSchema ParseSchema(std::string_view json_text);

// Throws ParseError naming the offending line, ValidationError on duplicate
// ids, out-of-range confidence/cost, or values that do not fit the schema.
Dataset LoadDataset(const std::filesystem::path& path,
                    const DatasetSchema& schema);
Dataset ParseDataset(std::istream& in, const DatasetSchema& schema,
                     const std::string& source_name = "<stream>");

// Feature-only rows (optional `id` column) used by similarity baselines.
std::vector<Instance> LoadFeatureRows(const std::filesystem::path& path,
                                      const DatasetSchema& schema);
std::vector<Instance> ParseFeatureRows(std::istream& in,
                                       const DatasetSchema& schema,
                                       const std::string& source_name);

// Instances predicted as `critical_class` with confidence strictly above
// `tau`, in dataset order.
SearchSpace BuildSearchSpace(const Dataset& dataset,
                             const std::string& critical_class, double tau);
// Re-filters an existing space; idempotent for identical arguments.
SearchSpace BuildSearchSpace(const SearchSpace& space,
                             const std::string& critical_class, double tau);

// Equal-frequency binning of every numeric feature. Categorical and binary
// columns are untouched. A constant column collapses to bin 0 and adds a
// warning.
Dataset Discretize(const Dataset& dataset, int bins_per_feature);

// Quantile edges for one column (exposed for tests and for re-use on
// held-out rows).
std::vector<double> QuantileEdges(std::vector<double> values, int bins);
int BinIndex(const std::vector<double>& edges, double value);

// Maps numeric features of `rows` through `bin_edges` (as produced by
// Discretize) so that they share the discretized scale.
std::vector<Instance> ApplyBins(std::vector<Instance> rows,
                                const DatasetSchema& schema,
                                const std::vector<std::vector<double>>& edges);

// Writes rows back out in the instance-file format, including hidden
// columns when a truth table is given.
void WriteDataset(std::ostream& out, const DatasetSchema& schema,
                  const std::vector<Instance>& instances,
                  const TruthTable* truth);
void WriteFeatureRows(std::ostream& out, const DatasetSchema& schema,
                      const std::vector<Instance>& rows);
std::string SchemaToJson(const DatasetSchema& schema);

}  // namespace uud

#endif  // UUD_CORPUS_H_
