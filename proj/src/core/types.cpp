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

#include "forgeflow/core/types.hpp"

#include <string>
#include <utility>

#include "forgeflow/error.hpp"

namespace forgeflow::core {

std::string_view to_string(ItemState s) {
    switch (s) {
        case ItemState::FormReady: return "FormReady";
        case ItemState::ReadyToProcess: return "ReadyToProcess";
        case ItemState::Processing: return "Processing";
        case ItemState::Processed: return "Processed";
        case ItemState::ProcessError: return "ProcessError";
    }
    return "?";
}

std::string_view to_string(LifecycleEvent e) {
    switch (e) {
        case LifecycleEvent::ReviewAccepted: return "ReviewAccepted";
        case LifecycleEvent::ReviewRejected: return "ReviewRejected";
        case LifecycleEvent::ProcessStarted: return "ProcessStarted";
        case LifecycleEvent::ProcessSucceeded: return "ProcessSucceeded";
        case LifecycleEvent::ProcessFailed: return "ProcessFailed";
        case LifecycleEvent::Cancelled: return "Cancelled";
        case LifecycleEvent::Reopen: return "Reopen";
    }
    return "?";
}

ItemState parse_item_state(std::string_view s) {
    for (auto state : kAllStates) {
        if (to_string(state) == s) return state;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown item state '" + std::string(s) + "'");
}

LifecycleEvent parse_lifecycle_event(std::string_view s) {
    for (auto event : kAllEvents) {
        if (to_string(event) == s) return event;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown lifecycle event '" + std::string(s) + "'");
}

std::string_view to_string(EntryKind k) {
    switch (k) {
        case EntryKind::Text: return "text";
        case EntryKind::Integer: return "integer";
        case EntryKind::Real: return "real";
        case EntryKind::Flag: return "flag";
        case EntryKind::Choice: return "choice";
        case EntryKind::File: return "file";
        case EntryKind::Executable: return "executable";
    }
    return "?";
}

EntryKind parse_entry_kind(std::string_view s) {
    for (auto k : {EntryKind::Text, EntryKind::Integer, EntryKind::Real, EntryKind::Flag,
                   EntryKind::Choice, EntryKind::File, EntryKind::Executable}) {
        if (to_string(k) == s) return k;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown entry kind '" + std::string(s) + "'");
}

const Entry* Form::find(std::string_view group, std::string_view entry) const {
    for (const auto& g : groups) {
        if (g.name != group) continue;
        for (const auto& e : g.entries) {
            if (e.name == entry) return &e;
        }
    }
    return nullptr;
}

Entry* Form::find(std::string_view group, std::string_view entry) {
    return const_cast<Entry*>(std::as_const(*this).find(group, entry));
}

const Entry* Form::find(std::string_view ref) const {
    auto dot = ref.find('.');
    if (dot == std::string_view::npos) return nullptr;
    return find(ref.substr(0, dot), ref.substr(dot + 1));
}

Entry* Form::find(std::string_view ref) {
    return const_cast<Entry*>(std::as_const(*this).find(ref));
}

}  // namespace forgeflow::core
