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

#include "uud/encoding.h"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace uud {

FeatureEncoder::FeatureEncoder(const DatasetSchema& schema,
                               std::span<const Instance> rows)
    : schema_(schema), levels_(schema.num_features()) {
  AddLevels(rows);
}

void FeatureEncoder::AddLevels(std::span<const Instance> rows) {
  for (std::size_t f = 0; f < schema_.num_features(); ++f) {
    if (schema_.feature_kinds[f] != FeatureKind::kCategorical) continue;
    auto& levels = levels_[f];
    for (const Instance& row : rows) {
      levels.push_back(std::get<std::string>(row.features[f]));
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  }
}

std::size_t FeatureEncoder::dim() const {
  std::size_t d = 0;
  for (std::size_t f = 0; f < schema_.num_features(); ++f) {
    d += schema_.feature_kinds[f] == FeatureKind::kCategorical
             ? levels_[f].size()
             : 1;
  }
  return d;
}

std::vector<double> FeatureEncoder::Encode(const Instance& instance) const {
  std::vector<double> out;
  out.reserve(dim());
  for (std::size_t f = 0; f < schema_.num_features(); ++f) {
    if (schema_.feature_kinds[f] != FeatureKind::kCategorical) {
      out.push_back(std::get<double>(instance.features[f]));
      continue;
    }
    const auto& levels = levels_[f];
    const auto& value = std::get<std::string>(instance.features[f]);
    const auto it = std::lower_bound(levels.begin(), levels.end(), value);
    for (auto level = levels.begin(); level != levels.end(); ++level) {
      out.push_back(level == it && *it == value ? 1.0 : 0.0);
    }
  }
  return out;
}

std::vector<std::vector<double>> FeatureEncoder::EncodeAll(
    std::span<const Instance> rows) const {
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (const Instance& row : rows) out.push_back(Encode(row));
  return out;
}

double EuclideanDistance(std::span<const double> a,
                         std::span<const double> b) {
  assert(a.size() == b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace uud
