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

#include "forgeflow/core/lifecycle.hpp"

#include <string>

#include "forgeflow/error.hpp"

namespace forgeflow::core {

const std::vector<TransitionRule>& transition_table() {
    using S = ItemState;
    using E = LifecycleEvent;
    static const std::vector<TransitionRule> table = {
        {S::FormReady, E::ReviewAccepted, S::ReadyToProcess},
        {S::FormReady, E::ReviewRejected, S::FormReady},
        {S::ReadyToProcess, E::ProcessStarted, S::Processing},
        {S::ReadyToProcess, E::ReviewRejected, S::FormReady},
        {S::Processing, E::ProcessSucceeded, S::Processed},
        {S::Processing, E::ProcessFailed, S::ProcessError},
        {S::Processing, E::Cancelled, S::ReadyToProcess},
        {S::Processed, E::ProcessStarted, S::Processing},
        {S::Processed, E::Reopen, S::FormReady},
        {S::ProcessError, E::Reopen, S::FormReady},
        {S::ProcessError, E::ProcessStarted, S::Processing},
    };
    return table;
}

std::optional<ItemState> try_transition(ItemState state, LifecycleEvent event) {
    for (const auto& rule : transition_table()) {
        if (rule.from == state && rule.event == event) return rule.to;
    }
    return std::nullopt;
}

ItemState transition(ItemState state, LifecycleEvent event) {
    if (auto next = try_transition(state, event)) return *next;
    throw Error(ErrorCode::IllegalTransition,
                std::string(to_string(state)) + " + " + std::string(to_string(event)));
}

}  // namespace forgeflow::core
