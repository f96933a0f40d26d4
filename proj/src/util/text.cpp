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

#include "forgeflow/util/text.hpp"

#include <cctype>
#include <chrono>
#include <ctime>

#include "forgeflow/error.hpp"

namespace forgeflow::util {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_command_line(std::string_view line) {
    std::vector<std::string> words;
    std::string current;
    bool in_word = false;
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quote == '\'') {
            if (c == '\'') quote = 0;
            else current.push_back(c);
            continue;
        }
        if (quote == '"') {
            if (c == '"') {
                quote = 0;
            } else if (c == '\\' && i + 1 < line.size() &&
                       (line[i + 1] == '"' || line[i + 1] == '\\')) {
                current.push_back(line[++i]);
            } else {
                current.push_back(c);
            }
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (in_word) {
                words.push_back(std::move(current));
                current.clear();
                in_word = false;
            }
            continue;
        }
        in_word = true;
        if (c == '\'' || c == '"') {
            quote = c;
        } else if (c == '\\' && i + 1 < line.size()) {
            current.push_back(line[++i]);
        } else {
            current.push_back(c);
        }
    }
    if (quote != 0) {
        throw Error(ErrorCode::InvalidArgument, "unterminated quote in: " + std::string(line));
    }
    if (in_word) words.push_back(std::move(current));
    return words;
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::string current;
    for (char c : s) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!current.empty()) out.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s.front())) && s.front() != '_') return false;
    for (char c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
    }
    return true;
}

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

IdGenerator::IdGenerator(std::optional<std::uint64_t> seed)
    : rng_(seed ? *seed : std::random_device{}() ^ (std::uint64_t{std::random_device{}()} << 32)) {}

std::string IdGenerator::next(std::string_view prefix) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::uint64_t v;
    {
        std::lock_guard lock(mutex_);
        v = rng_();
    }
    std::string id(prefix);
    for (int i = 0; i < 12; ++i) {
        id.push_back(kHex[v & 0xf]);
        v >>= 4;
    }
    return id;
}

}  // namespace forgeflow::util
