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

#include <optional>
#include <string>
#include <vector>

#include "forgeflow/core/types.hpp"
#include "forgeflow/persistence/workspace.hpp"

namespace forgeflow::core {

/// At most one message per entry: the first invariant it breaks. Existence of
/// file entries is only checked for required ones, and only when a workspace
/// is given.
std::optional<std::string> check_entry(const Entry& entry, const std::string& group,
                                       const persistence::WorkspaceRef* ws);

/// Every violation in the form: duplicate group/entry names plus one message
/// per offending entry, in form order.
std::vector<std::string> validate_form(const Form& form, const persistence::WorkspaceRef* ws);

/// Applies a user's edits to a stored form. Entries already in the stored
/// form keep their kind, allowed set and required flag and only take the
/// edited value; entries and groups the stored form lacks are appended as
/// submitted. Owner, description and actions always come from stored.
Form merge_form_edits(const Form& stored, const Form& edited);

}  // namespace forgeflow::core
