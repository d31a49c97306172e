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

#ifndef UUD_ENCODING_H_
#define UUD_ENCODING_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "uud/corpus.h"

namespace uud {

// Dense real encoding of feature vectors: numeric and binary features map to
// one coordinate holding their value, categorical features are one-hot over
// the levels seen while fitting (sorted, so the layout is deterministic).
class FeatureEncoder {
 public:
  FeatureEncoder(const DatasetSchema& schema, std::span<const Instance> rows);

  // Registers additional categorical levels (e.g. from training rows).
  void AddLevels(std::span<const Instance> rows);

  std::size_t dim() const;
  std::vector<double> Encode(const Instance& instance) const;
  std::vector<std::vector<double>> EncodeAll(
      std::span<const Instance> rows) const;

 private:
  DatasetSchema schema_;
  std::vector<std::vector<std::string>> levels_;
};

double EuclideanDistance(std::span<const double> a, std::span<const double> b);

}  // namespace uud

#endif  // UUD_ENCODING_H_
