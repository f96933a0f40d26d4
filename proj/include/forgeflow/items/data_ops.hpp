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

#include "forgeflow/persistence/workspace.hpp"

namespace forgeflow::items {

enum class DataOp { Copy, Move, Archive };

DataOp parse_data_op(std::string_view s);  // Error(InvalidArgument)
std::string_view to_string(DataOp op);

/// copy/move put every source into directory dest under its base name;
/// archive writes a single ZIP at dest whose entry names are the sources'
/// workspace-relative paths (directories are expanded). All checks run
/// before anything is touched. Errors: PathEscape, MissingInput,
/// DuplicateDest, IoFailure. Returns dest, workspace-relative.
std::string manage_data(DataOp op, const std::vector<std::string>& sources, const std::string& dest,
                        const persistence::WorkspaceRef& ws);

}  // namespace forgeflow::items
