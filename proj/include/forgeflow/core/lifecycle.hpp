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
#include <utility>
#include <vector>

#include "forgeflow/core/types.hpp"

namespace forgeflow::core {

struct TransitionRule {
    ItemState from;
    LifecycleEvent event;
    ItemState to;
};

/// The complete item lifecycle. Any (state, event) pair absent from this
/// table is illegal.
const std::vector<TransitionRule>& transition_table();

std::optional<ItemState> try_transition(ItemState state, LifecycleEvent event);

/// Throws Error(IllegalTransition) for pairs not in the table.
ItemState transition(ItemState state, LifecycleEvent event);

}  // namespace forgeflow::core
