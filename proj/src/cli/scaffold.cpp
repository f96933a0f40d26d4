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

#include <filesystem>

#include "forgeflow/cli/cli.hpp"
#include "forgeflow/error.hpp"
#include "forgeflow/items/builtin.hpp"
#include "forgeflow/persistence/codec.hpp"
#include "forgeflow/persistence/store.hpp"

namespace forgeflow::cli {

core::ItemDescriptor scaffold_descriptor(const std::string& name) {
    core::ItemDescriptor d;
    d.type_id = name;
    d.display_name = name;
    d.form_template.description =
        "Stub item type. Replace the parameters group with the entries your workflow needs and bind them "
        "in the pipeline.";
    d.form_template.groups = {
        {"parameters",
         {core::Entry{"command", core::EntryKind::Text, "echo scaffolded", std::nullopt, true,
                      "Command line the launch action runs in the project directory"}}}};
    d.form_template.actions = {"Launch the Job"};
    d.pipeline = {{items::kLaunchAction, {{"executable", "parameters.command"}}}};
    return d;
}

std::string scaffold_item(core::Engine& engine, const std::string& name) {
    if (!util::is_identifier(name)) {
        throw Error(ErrorCode::InvalidName, "'" + name + "' is not a valid item type name");
    }
    auto rel = ".items/" + name + ".descriptor.json";
    auto path = engine.workspace().root() / rel;
    if (std::filesystem::exists(path)) throw Error(ErrorCode::AlreadyExists, rel);
    for (const auto& t : engine.list_item_types()) {
        if (t.type_id == name) throw Error(ErrorCode::AlreadyExists, "item type '" + name + "'");
    }
    std::filesystem::create_directories(path.parent_path());
    persistence::atomic_write(path, persistence::serialize_descriptor(scaffold_descriptor(name)));
    engine.refresh_descriptors();
    return rel;
}

}  // namespace forgeflow::cli
