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

#include "uud/corpus.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>
#include <utility>

#include <nlohmann/json.hpp>

#include "uud/error.h"
#include "uud/text.h"

namespace uud {
namespace {

constexpr std::string_view kId = "id";
constexpr std::string_view kPredicted = "predicted_label";
constexpr std::string_view kConfidence = "confidence";
constexpr std::string_view kTrueLabel = "true_label";
constexpr std::string_view kCost = "cost";
constexpr std::string_view kLength = "length";

bool IsReservedColumn(std::string_view name) {
  return name == kId || name == kPredicted || name == kConfidence ||
         name == kTrueLabel || name == kCost || name == kLength;
}

std::optional<double> ParseDouble(std::string_view text) {
  text = Trim(text);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

// Column positions resolved from a header row.
struct ColumnMap {
  std::optional<std::size_t> id;
  std::optional<std::size_t> predicted;
  std::optional<std::size_t> confidence;
  std::optional<std::size_t> true_label;
  std::optional<std::size_t> cost;
  std::optional<std::size_t> length;
  std::vector<std::size_t> features;  // schema order
  std::size_t width = 0;
};

ColumnMap MapHeader(const std::vector<std::string>& header,
                    const DatasetSchema& schema, const std::string& source,
                    bool prediction_columns) {
  ColumnMap map;
  map.width = header.size();
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name(Trim(header[i]));
    if (!position.emplace(name, i).second) {
      throw ParseError(source, 1, "duplicate column '" + name + "'");
    }
  }
  auto find = [&](std::string_view name) -> std::optional<std::size_t> {
    auto it = position.find(std::string(name));
    if (it == position.end()) return std::nullopt;
    return it->second;
  };
  map.id = find(kId);
  if (prediction_columns) {
    map.predicted = find(kPredicted);
    map.confidence = find(kConfidence);
    map.true_label = find(kTrueLabel);
    map.cost = find(kCost);
    map.length = find(kLength);
    if (!map.id || !map.predicted || !map.confidence) {
      throw ParseError(source, 1,
                       "header must contain id, predicted_label and "
                       "confidence columns");
    }
  }
  for (const std::string& name : schema.feature_names) {
    auto pos = find(name);
    if (!pos) {
      throw ParseError(source, 1, "missing feature column '" + name + "'");
    }
    map.features.push_back(*pos);
  }
  return map;
}

FeatureValue ParseFeature(std::string_view cell, FeatureKind kind,
                          const std::string& feature, const std::string& source,
                          std::size_t line) {
  const std::string_view text = Trim(cell);
  if (text.empty()) {
    throw ParseError(source, line, "missing value for feature '" + feature + "'");
  }
  if (kind == FeatureKind::kCategorical) return std::string(text);
  auto value = ParseDouble(text);
  if (!value) {
    throw ParseError(source, line,
                     "feature '" + feature + "' is not numeric: '" +
                         std::string(text) + "'");
  }
  if (kind == FeatureKind::kBinary && *value != 0.0 && *value != 1.0) {
    throw ValidationError(source + ":" + std::to_string(line) +
                          ": binary feature '" + feature + "' must be 0 or 1");
  }
  return *value;
}

std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string_view FeatureKindName(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kNumeric:
      return "numeric";
    case FeatureKind::kCategorical:
      return "categorical";
    case FeatureKind::kBinary:
      return "binary";
  }
  return "numeric";
}

FeatureKind ParseFeatureKind(std::string_view name) {
  if (name == "numeric") return FeatureKind::kNumeric;
  if (name == "categorical") return FeatureKind::kCategorical;
  if (name == "binary") return FeatureKind::kBinary;
  throw ValidationError("unknown feature kind '" + std::string(name) + "'");
}

std::string FormatValue(const FeatureValue& value) {
  if (const auto* s = std::get_if<std::string>(&value)) return *s;
  return FormatDouble(std::get<double>(value));
}

std::optional<std::size_t> DatasetSchema::FeatureIndex(
    std::string_view name) const {
  for (std::size_t i = 0; i < feature_names.size(); ++i) {
    if (feature_names[i] == name) return i;
  }
  return std::nullopt;
}

bool DatasetSchema::HasClass(std::string_view label) const {
  return std::find(class_set.begin(), class_set.end(), label) !=
         class_set.end();
}

void DatasetSchema::Validate() const {
  if (feature_names.size() != feature_kinds.size()) {
    throw ValidationError("schema: feature names and kinds differ in length");
  }
  if (feature_names.empty()) {
    throw ValidationError("schema: at least one feature is required");
  }
  std::unordered_set<std::string> seen;
  for (const std::string& name : feature_names) {
    if (name.empty()) throw ValidationError("schema: empty feature name");
    if (IsReservedColumn(name)) {
      throw ValidationError("schema: feature name '" + name +
                            "' collides with a reserved column");
    }
    if (!seen.insert(name).second) {
      throw ValidationError("schema: duplicate feature name '" + name + "'");
    }
  }
  if (class_set.size() < 2) {
    throw ValidationError("schema: class set needs at least two classes");
  }
  std::unordered_set<std::string> classes(class_set.begin(), class_set.end());
  if (classes.size() != class_set.size()) {
    throw ValidationError("schema: duplicate class identifier");
  }
}

void TruthTable::Set(const std::string& id, HiddenTruth truth) {
  rows_[id] = std::move(truth);
}

const HiddenTruth* TruthTable::Find(const std::string& id) const {
  auto it = rows_.find(id);
  return it == rows_.end() ? nullptr : &it->second;
}

bool TruthTable::HasLabel(const std::string& id) const {
  const HiddenTruth* row = Find(id);
  return row != nullptr && row->true_label.has_value();
}

DatasetSchema ParseSchema(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("schema", 0, e.what());
  }
  DatasetSchema schema;
  try {
    for (const auto& feature : doc.at("features")) {
      schema.feature_names.push_back(feature.at("name").get<std::string>());
      schema.feature_kinds.push_back(
          ParseFeatureKind(feature.value("kind", std::string("numeric"))));
    }
    for (const auto& label : doc.at("classes")) {
      schema.class_set.push_back(label.get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("schema", 0, e.what());
  }
  schema.Validate();
  return schema;
}

DatasetSchema LoadSchema(const std::filesystem::path& path) {
  return ParseSchema(ReadFile(path));
}

std::string SchemaToJson(const DatasetSchema& schema) {
  nlohmann::json doc;
  doc["features"] = nlohmann::json::array();
  for (std::size_t i = 0; i < schema.num_features(); ++i) {
    doc["features"].push_back(
        {{"name", schema.feature_names[i]},
         {"kind", std::string(FeatureKindName(schema.feature_kinds[i]))}});
  }
  doc["classes"] = schema.class_set;
  return doc.dump(2) + "\n";
}

Dataset ParseDataset(std::istream& in, const DatasetSchema& schema,
                     const std::string& source_name) {
  schema.Validate();
  Dataset dataset;
  dataset.schema = schema;
  dataset.bin_edges.assign(schema.num_features(), {});

  std::string line;
  std::size_t line_no = 0;
  std::optional<ColumnMap> columns;
  std::unordered_set<std::string> ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    std::vector<std::string> cells;
    try {
      cells = SplitCsvLine(line);
    } catch (const Error& e) {
      throw ParseError(source_name, line_no, e.what());
    }
    if (!columns) {
      columns = MapHeader(cells, schema, source_name, true);
      continue;
    }
    if (cells.size() != columns->width) {
      throw ParseError(source_name, line_no,
                       "expected " + std::to_string(columns->width) +
                           " fields, found " + std::to_string(cells.size()));
    }
    Instance inst;
    inst.id = std::string(Trim(cells[*columns->id]));
    if (inst.id.empty()) throw ParseError(source_name, line_no, "empty id");
    if (!ids.insert(inst.id).second) {
      throw ValidationError(source_name + ":" + std::to_string(line_no) +
                            ": duplicate id '" + inst.id + "'");
    }
    inst.predicted_label = std::string(Trim(cells[*columns->predicted]));
    if (!schema.HasClass(inst.predicted_label)) {
      throw ValidationError(source_name + ":" + std::to_string(line_no) +
                            ": predicted label '" + inst.predicted_label +
                            "' not in class set");
    }
    auto confidence = ParseDouble(cells[*columns->confidence]);
    if (!confidence) {
      throw ParseError(source_name, line_no, "confidence is not numeric");
    }
    if (*confidence < 0.0 || *confidence > 1.0) {
      throw ValidationError(source_name + ":" + std::to_string(line_no) +
                            ": confidence " + FormatDouble(*confidence) +
                            " outside [0,1]");
    }
    inst.confidence = *confidence;
    if (columns->length) {
      const std::string_view cell = Trim(cells[*columns->length]);
      if (!cell.empty()) {
        auto length = ParseDouble(cell);
        if (!length) throw ParseError(source_name, line_no, "bad length");
        inst.length = *length;
      }
    }
    inst.features.reserve(schema.num_features());
    for (std::size_t f = 0; f < schema.num_features(); ++f) {
      inst.features.push_back(ParseFeature(cells[columns->features[f]],
                                           schema.feature_kinds[f],
                                           schema.feature_names[f],
                                           source_name, line_no));
    }
    HiddenTruth truth;
    if (columns->true_label) {
      const std::string_view cell = Trim(cells[*columns->true_label]);
      if (!cell.empty()) {
        if (!schema.HasClass(cell)) {
          throw ValidationError(source_name + ":" + std::to_string(line_no) +
                                ": true label '" + std::string(cell) +
                                "' not in class set");
        }
        truth.true_label = std::string(cell);
      }
    }
    if (columns->cost) {
      const std::string_view cell = Trim(cells[*columns->cost]);
      if (!cell.empty()) {
        auto cost = ParseDouble(cell);
        if (!cost) throw ParseError(source_name, line_no, "cost is not numeric");
        if (*cost < 0.0 || *cost > 1.0) {
          throw ValidationError(source_name + ":" + std::to_string(line_no) +
                                ": cost outside [0,1]");
        }
        truth.cost = *cost;
      }
    }
    if (truth.true_label || truth.cost) dataset.truth.Set(inst.id, truth);
    dataset.instances.push_back(std::move(inst));
  }
  if (!columns) throw ParseError(source_name, 0, "missing header row");
  return dataset;
}

Dataset LoadDataset(const std::filesystem::path& path,
                    const DatasetSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return ParseDataset(in, schema, path.string());
}

std::vector<Instance> ParseFeatureRows(std::istream& in,
                                       const DatasetSchema& schema,
                                       const std::string& source_name) {
  schema.Validate();
  std::vector<Instance> rows;
  std::string line;
  std::size_t line_no = 0;
  std::optional<ColumnMap> columns;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    std::vector<std::string> cells;
    try {
      cells = SplitCsvLine(line);
    } catch (const Error& e) {
      throw ParseError(source_name, line_no, e.what());
    }
    if (!columns) {
      columns = MapHeader(cells, schema, source_name, false);
      continue;
    }
    if (cells.size() != columns->width) {
      throw ParseError(source_name, line_no, "wrong number of fields");
    }
    Instance row;
    row.id = columns->id ? std::string(Trim(cells[*columns->id]))
                         : "row" + std::to_string(rows.size());
    for (std::size_t f = 0; f < schema.num_features(); ++f) {
      row.features.push_back(ParseFeature(cells[columns->features[f]],
                                          schema.feature_kinds[f],
                                          schema.feature_names[f],
                                          source_name, line_no));
    }
    rows.push_back(std::move(row));
  }
  if (!columns) throw ParseError(source_name, 0, "missing header row");
  return rows;
}

std::vector<Instance> LoadFeatureRows(const std::filesystem::path& path,
                                      const DatasetSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return ParseFeatureRows(in, schema, path.string());
}

namespace {

SearchSpace FilterInstances(const DatasetSchema& schema,
                            const std::vector<std::vector<double>>& edges,
                            bool discretized,
                            const std::vector<Instance>& instances,
                            const std::string& critical_class, double tau) {
  if (!schema.HasClass(critical_class)) {
    throw ValidationError("critical class '" + critical_class +
                          "' not in class set");
  }
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw ValidationError("tau must lie in [0,1]");
  }
  SearchSpace space;
  space.schema = schema;
  space.bin_edges = edges;
  space.discretized = discretized;
  space.critical_class = critical_class;
  space.tau = tau;
  for (const Instance& inst : instances) {
    if (inst.predicted_label == critical_class && inst.confidence > tau) {
      space.instances.push_back(inst);
    }
  }
  if (space.instances.empty()) throw EmptySearchSpaceError();
  return space;
}

}  // namespace

SearchSpace BuildSearchSpace(const Dataset& dataset,
                             const std::string& critical_class, double tau) {
  return FilterInstances(dataset.schema, dataset.bin_edges,
                         dataset.discretized, dataset.instances,
                         critical_class, tau);
}

SearchSpace BuildSearchSpace(const SearchSpace& space,
                             const std::string& critical_class, double tau) {
  return FilterInstances(space.schema, space.bin_edges, space.discretized,
                         space.instances, critical_class, tau);
}

std::vector<double> QuantileEdges(std::vector<double> values, int bins) {
  if (bins < 2) throw ValidationError("bins_per_feature must be >= 2");
  std::vector<double> edges;
  if (values.empty()) return edges;
  std::sort(values.begin(), values.end());
  const double max_value = values.back();
  const std::size_t n = values.size();
  for (int k = 1; k < bins; ++k) {
    // Linear interpolation between order statistics (the common "type 7"
    // sample quantile).
    const double h = (static_cast<double>(n) - 1.0) * k / bins;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double edge = values[lo] + (h - lo) * (values[hi] - values[lo]);
    if (edge >= max_value) continue;  // would leave the upper bin empty
    if (!edges.empty() && edge <= edges.back()) continue;
    edges.push_back(edge);
  }
  return edges;
}

int BinIndex(const std::vector<double>& edges, double value) {
  return static_cast<int>(std::lower_bound(edges.begin(), edges.end(), value) -
                          edges.begin());
}

Dataset Discretize(const Dataset& dataset, int bins_per_feature) {
  if (bins_per_feature < 2) {
    throw ValidationError("bins_per_feature must be >= 2");
  }
  if (dataset.discretized) return dataset;
  Dataset out = dataset;
  out.bin_edges.assign(dataset.schema.num_features(), {});
  for (std::size_t f = 0; f < dataset.schema.num_features(); ++f) {
    if (dataset.schema.feature_kinds[f] != FeatureKind::kNumeric) continue;
    std::vector<double> column;
    column.reserve(dataset.instances.size());
    for (const Instance& inst : dataset.instances) {
      column.push_back(std::get<double>(inst.features[f]));
    }
    std::vector<double> edges = QuantileEdges(column, bins_per_feature);
    if (edges.empty() && !column.empty()) {
      out.warnings.push_back("feature '" + dataset.schema.feature_names[f] +
                             "' is constant; using a single bin");
    }
    for (Instance& inst : out.instances) {
      inst.features[f] =
          static_cast<double>(BinIndex(edges, std::get<double>(inst.features[f])));
    }
    out.bin_edges[f] = std::move(edges);
  }
  out.discretized = true;
  return out;
}

std::vector<Instance> ApplyBins(std::vector<Instance> rows,
                                const DatasetSchema& schema,
                                const std::vector<std::vector<double>>& edges) {
  for (std::size_t f = 0; f < schema.num_features(); ++f) {
    if (schema.feature_kinds[f] != FeatureKind::kNumeric) continue;
    for (Instance& row : rows) {
      row.features[f] = static_cast<double>(
          BinIndex(edges[f], std::get<double>(row.features[f])));
    }
  }
  return rows;
}

void WriteDataset(std::ostream& out, const DatasetSchema& schema,
                  const std::vector<Instance>& instances,
                  const TruthTable* truth) {
  out << "id,predicted_label,confidence";
  for (const auto& name : schema.feature_names) out << ',' << CsvField(name);
  const bool any_length =
      std::any_of(instances.begin(), instances.end(),
                  [](const Instance& i) { return i.length.has_value(); });
  if (any_length) out << ",length";
  if (truth != nullptr) out << ",true_label,cost";
  out << '\n';
  for (const Instance& inst : instances) {
    out << CsvField(inst.id) << ',' << CsvField(inst.predicted_label) << ','
        << FormatDouble(inst.confidence);
    for (const auto& value : inst.features) {
      out << ',' << CsvField(FormatValue(value));
    }
    if (any_length) {
      out << ',';
      if (inst.length) out << FormatDouble(*inst.length);
    }
    if (truth != nullptr) {
      const HiddenTruth* row = truth->Find(inst.id);
      out << ',';
      if (row && row->true_label) out << CsvField(*row->true_label);
      out << ',';
      if (row && row->cost) out << FormatDouble(*row->cost);
    }
    out << '\n';
  }
}

void WriteFeatureRows(std::ostream& out, const DatasetSchema& schema,
                      const std::vector<Instance>& rows) {
  out << "id";
  for (const auto& name : schema.feature_names) out << ',' << CsvField(name);
  out << '\n';
  for (const Instance& row : rows) {
    out << CsvField(row.id);
    for (const auto& value : row.features) {
      out << ',' << CsvField(FormatValue(value));
    }
    out << '\n';
  }
}

}  // namespace uud
