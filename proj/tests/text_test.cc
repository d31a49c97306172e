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

#include "uud/text.h"

#include <gtest/gtest.h>

#include "test_support.h"
#include "uud/error.h"

namespace uud {
namespace {

TEST(SplitCsvLineTest, PlainAndQuotedFields) {
  EXPECT_EQ(SplitCsvLine("a,b,,c"),
            (std::vector<std::string>{"a", "b", "", "c"}));
  EXPECT_EQ(SplitCsvLine("\"x,y\",\"say \"\"hi\"\"\""),
            (std::vector<std::string>{"x,y", "say \"hi\""}));
}

TEST(SplitCsvLineTest, RejectsUnterminatedQuote) {
  EXPECT_THROW(SplitCsvLine("\"open,field"), Error);
  EXPECT_THROW(SplitCsvLine("\"a\"b,c"), Error);
}

TEST(TrimTest, StripsSurroundingWhitespace) {
  EXPECT_EQ(Trim("  a b \t"), "a b");
  EXPECT_EQ(Trim(""), "");
}

TEST(FormatTest, NumberForms) {
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatFixed(1.0 / 3.0, 3), "0.333");
  EXPECT_EQ(FormatCompact(7.887499999999999), "7.887");
  EXPECT_EQ(FormatCompact(2.5), "2.5");
}

TEST(WriteFileAtomicTest, CreatesParentsAndReplaces) {
  testing::TempDir dir;
  const auto path = dir.path() / "nested" / "out.txt";
  WriteFileAtomic(path, "first");
  WriteFileAtomic(path, "second");
  EXPECT_EQ(ReadFile(path), "second");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e :
       std::filesystem::directory_iterator(path.parent_path())) {
    ++entries;
  }
  EXPECT_EQ(entries, 1u);
}

TEST(ReadFileTest, MissingFileThrows) {
  EXPECT_THROW(ReadFile("/nonexistent/uud/file"), Error);
}

}  // namespace
}  // namespace uud
