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

namespace forgeflow::items {

struct TemplateSpec {
    std::string template_file;  // workspace-relative
    std::string output_name;    // relative to the item's project
    std::string manifest_name;  // relative to the item's project
};

/// Tokens of the form ${group.entry}, in order of first appearance.
std::vector<std::string> placeholders(std::string_view text);

/// Replaces every ${group.entry} with that entry's value. Throws
/// Error(UnknownPlaceholder) naming the first token with no matching entry.
std::string render_text(std::string_view text, const core::Form& form);

/// Reads the template file and renders it. Error(IoFailure) if unreadable.
std::string render_template(const TemplateSpec& spec, const core::Form& form,
                            const persistence::WorkspaceRef& ws);

struct InputSet {
    std::string manifest;            // workspace-relative manifest path
    std::string main;                // workspace-relative rendered input
    std::vector<std::string> files;  // everything the manifest lists
};

/// Renders the template into "<project>/<output_name>" and writes the
/// manifest {files, main} next to it. The manifest lists the rendered input
/// and every other non-empty file entry of the form except the template.
InputSet write_input_set(const TemplateSpec& spec, const core::Form& form, const std::string& project,
                         const persistence::WorkspaceRef& ws);

}  // namespace forgeflow::items
