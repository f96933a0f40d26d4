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

#include "forgeflow/items/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "forgeflow/error.hpp"
#include "forgeflow/persistence/store.hpp"
#include "forgeflow/util/text.hpp"

namespace forgeflow::items {

namespace {

std::vector<std::string> split_row(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        cells.push_back(util::trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

std::string unquote(std::string s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

[[noreturn]] void malformed(std::size_t line, std::size_t column, const std::string& what) {
    throw Error(ErrorCode::MalformedCsv,
                "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
}

// Neumaier's variant of Kahan summation.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x)) carry += (sum - t) + x;
        else carry += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

}  // namespace

CsvTable parse_numeric_csv(std::string_view text) {
    CsvTable table;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool have_header = false;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (util::trim(line).empty()) continue;

        auto cells = split_row(line);
        if (!have_header) {
            for (auto& c : cells) {
                if (c.empty()) malformed(line_no, table.header.size() + 1, "empty column name");
                table.header.push_back(unquote(std::move(c)));
            }
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size()) {
            malformed(line_no, std::min(cells.size(), table.header.size()) + 1,
                      "expected " + std::to_string(table.header.size()) + " cells, found " +
                          std::to_string(cells.size()));
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto& cell = cells[c];
            char* end = nullptr;
            double v = cell.empty() ? 0.0 : std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(v)) {
                malformed(line_no, c + 1, "'" + cell + "' is not a number");
            }
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    if (!have_header) malformed(1, 1, "missing header row");
    if (table.rows.empty()) malformed(line_no, 1, "no data rows");
    return table;
}

ReductionReport reduce_table(const CsvTable& table, std::string source) {
    ReductionReport report;
    report.source = std::move(source);
    report.row_count = table.rows.size();
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        ColumnStats stats;
        stats.name = table.header[c];
        CompensatedSum sum;
        stats.min = stats.max = table.rows.front()[c];
        for (const auto& row : table.rows) {
            double v = row[c];
            sum.add(v);
            if (v < stats.min) stats.min = v;
            if (v > stats.max) stats.max = v;
            ++stats.count;
        }
        stats.sum = sum.value();
        stats.mean = stats.sum / static_cast<double>(stats.count);
        report.columns.push_back(std::move(stats));
    }
    return report;
}

persistence::json to_json(const ReductionReport& report) {
    auto columns = persistence::json::array();
    for (const auto& c : report.columns) {
        columns.push_back({{"name", c.name},
                           {"count", c.count},
                           {"min", c.min},
                           {"max", c.max},
                           {"mean", c.mean},
                           {"sum", c.sum}});
    }
    return {{"source", report.source}, {"row_count", report.row_count}, {"columns", std::move(columns)}};
}

ReductionReport reduce_columns(const std::string& csv_file, const persistence::WorkspaceRef& ws,
                               std::string* report_path) {
    auto source = persistence::normalize_relative(csv_file);
    auto abs = ws.resolve(source);
    std::error_code ec;
    if (!std::filesystem::is_regular_file(abs, ec)) throw Error(ErrorCode::MissingInput, "no CSV file at " + source);
    auto report = reduce_table(parse_numeric_csv(persistence::read_file(abs)), source);
    auto out = abs.parent_path() / (abs.stem().string() + ".report.json");
    persistence::atomic_write(out, persistence::canonical_dump(to_json(report)));
    if (report_path) *report_path = ws.relative(out);
    return report;
}

}  // namespace forgeflow::items
