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

namespace forgeflow::items {

struct ZipEntry {
    std::string name;  // stored path, '/'-separated
    std::string data;
};

/// Builds a deflate-compressed ZIP archive in memory. Every entry carries the
/// same fixed DOS timestamp (1980-01-01 00:00), so identical inputs give
/// identical bytes. Throws Error(IoFailure) for entries beyond the classic
/// (non-ZIP64) size limits.
std::string build_zip(const std::vector<ZipEntry>& entries);

std::uint32_t crc32_of(std::string_view data);

}  // namespace forgeflow::items
