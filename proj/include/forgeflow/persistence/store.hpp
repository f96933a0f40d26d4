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

#include <string>
#include <string_view>
#include <vector>

#include "forgeflow/core/types.hpp"
#include "forgeflow/persistence/workspace.hpp"

namespace forgeflow::persistence {

/// Writes bytes to path via a sibling temp file, fsync and rename(2), so a
/// reader sees either the previous content or the new one. Parent
/// directories are created. Throws Error(IoFailure).
void atomic_write(const fs::path& path, std::string_view bytes);

/// Throws Error(IoFailure) if the file cannot be read.
std::string read_file(const fs::path& path);

/// Persists item as "<project>/<id>_<type_id>.item.json" and returns that
/// workspace-relative path.
std::string save_item(const core::ItemRecord& item, const WorkspaceRef& ws);

struct Diagnostic {
    std::string path;  // workspace-relative
    std::string message;
};

struct LoadedWorkspace {
    std::vector<core::ItemRecord> items;  // sorted by id
    std::vector<core::ItemDescriptor> descriptors;  // sorted by type_id
    std::vector<Diagnostic> diagnostics;
};

/// Scans every project for *.item.json and .items/ for *.descriptor.json.
/// Malformed documents are reported in diagnostics and skipped. Throws
/// Error(IoFailure) only when root itself cannot be listed.
LoadedWorkspace load_workspace(const WorkspaceRef& ws);

struct LoadedDescriptors {
    std::vector<core::ItemDescriptor> descriptors;
    std::vector<Diagnostic> diagnostics;
};

LoadedDescriptors load_descriptors(const WorkspaceRef& ws);

/// Structural checks shared by registration and the descriptor loader: empty
/// or malformed type_id, duplicate group/entry names, choice entries without
/// an allowed set. Returns one message per problem.
std::vector<std::string> check_descriptor(const core::ItemDescriptor& d);

}  // namespace forgeflow::persistence
