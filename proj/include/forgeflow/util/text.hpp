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
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace forgeflow::util {

std::string trim(std::string_view s);

/// Splits a command line on whitespace, honouring single quotes, double
/// quotes and backslash escapes the way a POSIX shell does for plain words.
/// Throws Error(InvalidArgument) on an unterminated quote.
std::vector<std::string> split_command_line(std::string_view line);

/// Splits a list of paths separated by whitespace and/or commas.
std::vector<std::string> split_list(std::string_view s);

bool is_identifier(std::string_view s);

/// UTC, second resolution, e.g. "2026-10-14T08:30:00Z".
std::string utc_timestamp();

// Thread-safe source of short hex identifiers, optionally seeded so that two
// engines driven identically hand out identical ids.
class IdGenerator {
public:
    explicit IdGenerator(std::optional<std::uint64_t> seed = std::nullopt);

    std::string next(std::string_view prefix);

private:
    std::mutex mutex_;
    std::mt19937_64 rng_;
};

}  // namespace forgeflow::util
