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

// Small text and file helpers shared by the readers and report writers.

#ifndef UUD_TEXT_H_
#define UUD_TEXT_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace uud {

std::string_view Trim(std::string_view s);

// Splits one comma-separated line. Fields may be double-quoted; a doubled
// quote inside a quoted field is a literal quote.
std::vector<std::string> SplitCsvLine(std::string_view line);

std::vector<std::string> Split(std::string_view s, char sep);

std::string ReadFile(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it into place, so readers
// never observe a partial file.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view contents);

// Shortest round-trip decimal form.
std::string FormatDouble(double value);
// Fixed-point with `digits` decimals.
std::string FormatFixed(double value, int digits);
// printf %g with `significant` digits; for labels, not round trips.
std::string FormatCompact(double value, int significant = 4);

}  // namespace uud

#endif  // UUD_TEXT_H_
