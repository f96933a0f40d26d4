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

#include <json.hpp>

#include "forgeflow/core/types.hpp"

namespace forgeflow::persistence {

using json = nlohmann::json;

inline constexpr int kItemSchemaVersion = 1;

/// Canonical text form shared by every document the engine writes: object
/// keys sorted, two-space indent, UTF-8, LF line endings, trailing newline.
/// Throws Error(SerializationFailure) on invalid UTF-8.
std::string canonical_dump(const json& doc);

json to_json(const core::Entry& entry);
json to_json(const core::Form& form);
json to_json(const core::ItemRecord& item);
json to_json(const core::ItemDescriptor& descriptor);
json to_json(const core::FormStatus& status);

// All of these throw Error(SerializationFailure) naming the offending field.
core::Form form_from_json(const json& doc);
core::ItemRecord item_from_json(const json& doc);
core::ItemDescriptor descriptor_from_json(const json& doc);

/// Persisted item bytes (schema_version plus every record field). Throws
/// Error(SerializationFailure) when the record breaks its own invariants.
std::string serialize_item(const core::ItemRecord& item);

/// Inverse of serialize_item. The schema version is checked before any other
/// field is looked at (Error(SchemaMismatch)).
core::ItemRecord deserialize_item(std::string_view bytes);

std::string serialize_descriptor(const core::ItemDescriptor& descriptor);
core::ItemDescriptor deserialize_descriptor(std::string_view bytes);

/// "<id>_<type_id>.item.json"
std::string item_file_name(const core::ItemRecord& item);

}  // namespace forgeflow::persistence
