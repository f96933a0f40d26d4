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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace forgeflow::persistence {

namespace fs = std::filesystem;

// Root directory everything is anchored to. Paths stored anywhere else in the
// engine are relative to root.
class WorkspaceRef {
public:
    /// Throws Error(WorkspaceFailure) when root is missing or not a writable
    /// directory.
    explicit WorkspaceRef(const fs::path& root);

    const fs::path& root() const { return root_; }
    fs::path items_dir() const { return root_ / ".items"; }

    /// First-level, non-hidden directories under root.
    std::vector<std::string> projects() const;

    /// Joins rel onto root after lexical normalization. Throws
    /// Error(PathEscape) if the result would leave root, and
    /// Error(InvalidArgument) if rel is empty.
    fs::path resolve(std::string_view rel) const;

    /// Inverse of resolve for paths already under root.
    std::string relative(const fs::path& absolute) const;

    bool operator==(const WorkspaceRef& other) const { return root_ == other.root_; }

private:
    fs::path root_;
};

/// Normalizes a workspace-relative path ("a/./b//c" -> "a/b/c"); throws
/// Error(PathEscape) for absolute paths or ones that climb out via "..".
std::string normalize_relative(std::string_view rel);

}  // namespace forgeflow::persistence
