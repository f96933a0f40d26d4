/*
 * Copyright 2026 The Forgeflow Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "forgeflow/persistence/codec.hpp"
#include "forgeflow/persistence/workspace.hpp"

namespace forgeflow::items {

struct ColumnStats {
    std::string name;
    std::uint64_t count = 0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double sum = 0.0;
};

struct ReductionReport {
    std::string source;  // workspace-relative
    std::uint64_t row_count = 0;
    std::vector<ColumnStats> columns;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Header row plus at least one rectangular row of numeric cells. Throws
/// Error(MalformedCsv) with the 1-based line and column of the first problem.
CsvTable parse_numeric_csv(std::string_view text);

/// Per-column count/min/max/sum/mean. Sums are compensated (Neumaier) so
/// they stay accurate to the last few ulps; mean = sum / count.
ReductionReport reduce_table(const CsvTable& table, std::string source);

/// Reduces a workspace CSV file and writes "<stem>.report.json" beside it.
/// Returns the report; report_path receives the report's relative path.
ReductionReport reduce_columns(const std::string& csv_file, const persistence::WorkspaceRef& ws,
                               std::string* report_path = nullptr);

persistence::json to_json(const ReductionReport& report);

}  // namespace forgeflow::items
