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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "test_support.h"
#include "uud/error.h"

namespace uud {
namespace {

using testing::MakeSchema;
using testing::ParseCsv;

DatasetSchema TwoFeatureSchema() {
  return MakeSchema({{"x", FeatureKind::kNumeric},
                     {"color", FeatureKind::kCategorical}});
}

TEST(SchemaTest, ParsesJson) {
  const DatasetSchema schema = ParseSchema(R"({
    "features": [{"name": "x", "kind": "numeric"},
                 {"name": "flag", "kind": "binary"},
                 {"name": "c", "kind": "categorical"}],
    "classes": ["a", "b"]})");
  EXPECT_EQ(schema.num_features(), 3u);
  EXPECT_EQ(schema.feature_kinds[1], FeatureKind::kBinary);
  EXPECT_EQ(schema.FeatureIndex("c"), 2u);
  EXPECT_FALSE(schema.FeatureIndex("zz").has_value());
  EXPECT_TRUE(schema.HasClass("b"));
}

TEST(SchemaTest, RejectsDuplicatesAndReservedNames) {
  EXPECT_THROW(ParseSchema(R"({"features":[{"name":"x"},{"name":"x"}],
                               "classes":["a","b"]})"),
               ValidationError);
  EXPECT_THROW(ParseSchema(R"({"features":[{"name":"confidence"}],
                               "classes":["a","b"]})"),
               ValidationError);
  EXPECT_THROW(ParseSchema(R"({"features":[{"name":"x"}],"classes":["a"]})"),
               ValidationError);
  EXPECT_THROW(ParseSchema("{not json"), ParseError);
}

TEST(SchemaTest, RoundTripsThroughJson) {
  const DatasetSchema schema = TwoFeatureSchema();
  const DatasetSchema back = ParseSchema(SchemaToJson(schema));
  EXPECT_EQ(back.feature_names, schema.feature_names);
  EXPECT_EQ(back.feature_kinds, schema.feature_kinds);
  EXPECT_EQ(back.class_set, schema.class_set);
}

TEST(LoadDatasetTest, ThreeRowsInFileOrder) {
  const Dataset d = ParseCsv(TwoFeatureSchema(),
                             "id,predicted_label,confidence,x,color\n"
                             "c,pos,0.9,1.5,red\n"
                             "a,neg,0.2,2,blue\n"
                             "b,pos,0.7,-1,red\n");
  ASSERT_EQ(d.instances.size(), 3u);
  EXPECT_EQ(d.instances[0].id, "c");
  EXPECT_EQ(d.instances[1].id, "a");
  EXPECT_EQ(d.instances[2].id, "b");
  EXPECT_DOUBLE_EQ(std::get<double>(d.instances[0].features[0]), 1.5);
  EXPECT_EQ(std::get<std::string>(d.instances[0].features[1]), "red");
  EXPECT_EQ(d.truth.size(), 0u);
}

TEST(LoadDatasetTest, ColumnsInAnyOrderWithHiddenTruth) {
  const Dataset d = ParseCsv(TwoFeatureSchema(),
                             "color,cost,x,true_label,id,confidence,"
                             "predicted_label\n"
                             "red,0.5,1,neg,a,0.9,pos\n"
                             "red,,2,,b,0.8,pos\n");
  ASSERT_EQ(d.instances.size(), 2u);
  const HiddenTruth* a = d.truth.Find("a");
  ASSERT_NE(a, nullptr);
  EXPECT_EQ(a->true_label, "neg");
  EXPECT_EQ(a->cost, 0.5);
  EXPECT_FALSE(d.truth.HasLabel("b"));
}

TEST(LoadDatasetTest, ConfidenceOutOfRange) {
  EXPECT_THROW(ParseCsv(TwoFeatureSchema(),
                        "id,predicted_label,confidence,x,color\n"
                        "a,pos,1.2,1,red\n"),
               ValidationError);
}

TEST(LoadDatasetTest, DuplicateId) {
  EXPECT_THROW(ParseCsv(TwoFeatureSchema(),
                        "id,predicted_label,confidence,x,color\n"
                        "a7,pos,0.9,1,red\n"
                        "a7,pos,0.8,2,red\n"),
               ValidationError);
}

TEST(LoadDatasetTest, MalformedRowNamesItsLine) {
  try {
    ParseCsv(TwoFeatureSchema(),
             "id,predicted_label,confidence,x,color\n"
             "a,pos,0.9,1,red\n"
             "b,pos,0.9,1\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(LoadDatasetTest, RejectsMissingAndNonNumericValues) {
  const std::string header = "id,predicted_label,confidence,x,color\n";
  EXPECT_THROW(ParseCsv(TwoFeatureSchema(), header + "a,pos,0.9,,red\n"),
               ParseError);
  EXPECT_THROW(ParseCsv(TwoFeatureSchema(), header + "a,pos,0.9,abc,red\n"),
               ParseError);
  EXPECT_THROW(ParseCsv(TwoFeatureSchema(), header + "a,cat,0.9,1,red\n"),
               ValidationError);
  EXPECT_THROW(ParseCsv(TwoFeatureSchema(), "id,predicted_label,x,color\n"),
               ParseError);
  EXPECT_THROW(ParseCsv(TwoFeatureSchema(), ""), ParseError);
}

TEST(LoadDatasetTest, BinaryFeaturesMustBeZeroOrOne) {
  const DatasetSchema schema = MakeSchema({{"f", FeatureKind::kBinary}});
  EXPECT_THROW(ParseCsv(schema, "id,predicted_label,confidence,f\n"
                                "a,pos,0.9,2\n"),
               ValidationError);
}

TEST(LoadDatasetTest, CostOutOfRange) {
  EXPECT_THROW(ParseCsv(TwoFeatureSchema(),
                        "id,predicted_label,confidence,x,color,cost\n"
                        "a,pos,0.9,1,red,1.5\n"),
               ValidationError);
}

TEST(WriteDatasetTest, RoundTrip) {
  const Dataset d = ParseCsv(TwoFeatureSchema(),
                             "id,predicted_label,confidence,x,color,"
                             "true_label,cost\n"
                             "a,pos,0.9,1.25,\"dark, red\",neg,0.5\n"
                             "b,neg,0.3,2,blue,neg,\n");
  std::ostringstream out;
  WriteDataset(out, d.schema, d.instances, &d.truth);
  const Dataset back = ParseCsv(d.schema, out.str());
  ASSERT_EQ(back.instances.size(), 2u);
  EXPECT_EQ(std::get<std::string>(back.instances[0].features[1]), "dark, red");
  EXPECT_EQ(back.truth.Find("a")->cost, 0.5);
  EXPECT_EQ(back.truth.Find("b")->true_label, "neg");
}

TEST(FeatureRowsTest, ParsesWithoutPredictionColumns) {
  std::istringstream in("x,color\n1,red\n2,blue\n");
  const auto rows = ParseFeatureRows(in, TwoFeatureSchema(), "train.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(std::get<std::string>(rows[1].features[1]), "blue");
}

Dataset ConfidenceDataset() {
  return ParseCsv(MakeSchema({{"x", FeatureKind::kNumeric}}),
                  "id,predicted_label,confidence,x\n"
                  "a,pos,0.651,1\n"
                  "b,pos,0.65,1\n"
                  "c,neg,0.99,1\n"
                  "d,pos,1.0,1\n");
}

TEST(BuildSearchSpaceTest, StrictThreshold) {
  const SearchSpace space = BuildSearchSpace(ConfidenceDataset(), "pos", 0.65);
  ASSERT_EQ(space.size(), 2u);
  EXPECT_EQ(space.instances[0].id, "a");
  EXPECT_EQ(space.instances[1].id, "d");
}

TEST(BuildSearchSpaceTest, EmptyAndInvalidArguments) {
  EXPECT_THROW(BuildSearchSpace(ConfidenceDataset(), "pos", 1.0),
               EmptySearchSpaceError);
  EXPECT_THROW(BuildSearchSpace(ConfidenceDataset(), "cat", 0.5),
               ValidationError);
  EXPECT_THROW(BuildSearchSpace(ConfidenceDataset(), "pos", 1.5),
               ValidationError);
}

std::vector<std::string> Ids(const SearchSpace& space) {
  std::vector<std::string> ids;
  for (const auto& inst : space.instances) ids.push_back(inst.id);
  return ids;
}

Dataset RandomDataset(unsigned seed, std::size_t n) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::ostringstream csv;
  csv << "id,predicted_label,confidence,x\n";
  for (std::size_t i = 0; i < n; ++i) {
    csv << "r" << i << "," << (unit(rng) < 0.7 ? "pos" : "neg") << ","
        << unit(rng) << "," << unit(rng) * 10 << "\n";
  }
  return ParseCsv(MakeSchema({{"x", FeatureKind::kNumeric}}), csv.str());
}

TEST(BuildSearchSpaceTest, IdempotentAndMonotoneInTau) {
  for (unsigned seed = 0; seed < 20; ++seed) {
    const Dataset d = RandomDataset(seed, 60);
    const SearchSpace once = BuildSearchSpace(d, "pos", 0.3);
    const SearchSpace twice = BuildSearchSpace(once, "pos", 0.3);
    EXPECT_EQ(Ids(once), Ids(twice));
    for (double tau : {0.4, 0.6, 0.8}) {
      SearchSpace higher;
      try {
        higher = BuildSearchSpace(d, "pos", tau);
      } catch (const EmptySearchSpaceError&) {
        continue;
      }
      const auto low_ids = Ids(once);
      const std::set<std::string> low(low_ids.begin(), low_ids.end());
      for (const auto& id : Ids(higher)) EXPECT_TRUE(low.count(id)) << id;
    }
  }
}

TEST(QuantileEdgesTest, MedianSplit) {
  const auto edges = QuantileEdges({1, 2, 3, 4}, 2);
  ASSERT_EQ(edges.size(), 1u);
  EXPECT_DOUBLE_EQ(edges[0], 2.5);
  EXPECT_EQ(BinIndex(edges, 1), 0);
  EXPECT_EQ(BinIndex(edges, 2), 0);
  EXPECT_EQ(BinIndex(edges, 3), 1);
  EXPECT_EQ(BinIndex(edges, 4), 1);
}

TEST(DiscretizeTest, NumericBinsAndUntouchedKinds) {
  const DatasetSchema schema =
      MakeSchema({{"x", FeatureKind::kNumeric}, {"f", FeatureKind::kBinary},
                  {"c", FeatureKind::kCategorical}});
  const Dataset d = ParseCsv(schema,
                             "id,predicted_label,confidence,x,f,c\n"
                             "a,pos,0.9,1,1,u\n"
                             "b,pos,0.9,2,0,v\n"
                             "c,pos,0.9,3,1,u\n"
                             "e,pos,0.9,4,0,v\n");
  const Dataset binned = Discretize(d, 2);
  EXPECT_TRUE(binned.discretized);
  ASSERT_EQ(binned.instances.size(), 4u);
  const std::vector<double> expected_bins{0, 0, 1, 1};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(binned.instances[i].id, d.instances[i].id);
    EXPECT_EQ(std::get<double>(binned.instances[i].features[0]),
              expected_bins[i]);
    EXPECT_EQ(binned.instances[i].features[1], d.instances[i].features[1]);
    EXPECT_EQ(binned.instances[i].features[2], d.instances[i].features[2]);
  }
  EXPECT_EQ(binned.bin_edges[0], std::vector<double>{2.5});
  EXPECT_TRUE(binned.bin_edges[1].empty());
  EXPECT_THROW(Discretize(d, 1), ValidationError);
}

TEST(DiscretizeTest, ConstantColumnWarns) {
  const Dataset d = ParseCsv(MakeSchema({{"x", FeatureKind::kNumeric}}),
                             "id,predicted_label,confidence,x\n"
                             "a,pos,0.9,5\nb,pos,0.9,5\nc,pos,0.9,5\n");
  const Dataset binned = Discretize(d, 4);
  for (const auto& inst : binned.instances) {
    EXPECT_EQ(std::get<double>(inst.features[0]), 0.0);
  }
  ASSERT_EQ(binned.warnings.size(), 1u);
  EXPECT_NE(binned.warnings[0].find("constant"), std::string::npos);
}

TEST(DiscretizeTest, PreservesRowsAndIds) {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const Dataset d = RandomDataset(seed, 37);
    for (int bins : {2, 3, 5, 10}) {
      const Dataset binned = Discretize(d, bins);
      ASSERT_EQ(binned.instances.size(), d.instances.size());
      for (std::size_t i = 0; i < d.instances.size(); ++i) {
        EXPECT_EQ(binned.instances[i].id, d.instances[i].id);
        const double b = std::get<double>(binned.instances[i].features[0]);
        EXPECT_GE(b, 0);
        EXPECT_LT(b, bins);
      }
    }
  }
}

TEST(ApplyBinsTest, MatchesDiscretizedScale) {
  const Dataset d = RandomDataset(3, 40);
  const Dataset binned = Discretize(d, 4);
  const auto mapped = ApplyBins(d.instances, d.schema, binned.bin_edges);
  for (std::size_t i = 0; i < mapped.size(); ++i) {
    EXPECT_EQ(mapped[i].features[0], binned.instances[i].features[0]);
  }
}

}  // namespace
}  // namespace uud
