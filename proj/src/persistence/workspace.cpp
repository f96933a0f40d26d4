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

#include "forgeflow/persistence/workspace.hpp"

#include <unistd.h>

#include <algorithm>

#include "forgeflow/error.hpp"

namespace forgeflow::persistence {

WorkspaceRef::WorkspaceRef(const fs::path& root) {
    std::error_code ec;
    auto canonical = fs::weakly_canonical(fs::absolute(root, ec), ec);
    if (ec || !fs::is_directory(canonical, ec)) {
        throw Error(ErrorCode::WorkspaceFailure, "workspace root does not exist: " + root.string());
    }
    if (::access(canonical.c_str(), W_OK) != 0) {
        throw Error(ErrorCode::WorkspaceFailure, "workspace root is not writable: " + root.string());
    }
    root_ = canonical;
}

std::vector<std::string> WorkspaceRef::projects() const {
    std::vector<std::string> out;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(root_, ec)) {
        auto name = entry.path().filename().string();
        if (!name.empty() && name.front() != '.' && entry.is_directory(ec)) out.push_back(name);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string normalize_relative(std::string_view rel) {
    fs::path p{std::string(rel)};
    if (p.is_absolute() || p.has_root_name() || p.has_root_directory()) {
        throw Error(ErrorCode::PathEscape, "absolute path not allowed: " + std::string(rel));
    }
    auto normal = p.lexically_normal();
    auto it = normal.begin();
    if (it != normal.end() && *it == "..") {
        throw Error(ErrorCode::PathEscape, "path escapes workspace: " + std::string(rel));
    }
    auto s = normal.generic_string();
    while (!s.empty() && s.back() == '/') s.pop_back();
    if (s.empty()) s = ".";
    return s;
}

fs::path WorkspaceRef::resolve(std::string_view rel) const {
    if (rel.empty()) throw Error(ErrorCode::InvalidArgument, "empty workspace path");
    auto normal = normalize_relative(rel);
    if (normal == ".") return root_;
    return root_ / normal;
}

std::string WorkspaceRef::relative(const fs::path& absolute) const {
    auto rel = absolute.lexically_normal().lexically_relative(root_);
    auto s = rel.generic_string();
    if (s.empty() || (rel.begin() != rel.end() && *rel.begin() == "..")) {
        throw Error(ErrorCode::PathEscape, "path is outside the workspace: " + absolute.string());
    }
    return s;
}

}  // namespace forgeflow::persistence
