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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace forgeflow::core {

enum class ItemState { FormReady, ReadyToProcess, Processing, Processed, ProcessError };

enum class LifecycleEvent {
    ReviewAccepted,
    ReviewRejected,
    ProcessStarted,
    ProcessSucceeded,
    ProcessFailed,
    Cancelled,
    Reopen,
};

inline constexpr ItemState kAllStates[] = {ItemState::FormReady, ItemState::ReadyToProcess,
                                           ItemState::Processing, ItemState::Processed,
                                           ItemState::ProcessError};

inline constexpr LifecycleEvent kAllEvents[] = {
    LifecycleEvent::ReviewAccepted,  LifecycleEvent::ReviewRejected, LifecycleEvent::ProcessStarted,
    LifecycleEvent::ProcessSucceeded, LifecycleEvent::ProcessFailed,  LifecycleEvent::Cancelled,
    LifecycleEvent::Reopen};

std::string_view to_string(ItemState s);
std::string_view to_string(LifecycleEvent e);
// Both throw Error(InvalidArgument) on an unknown name.
ItemState parse_item_state(std::string_view s);
LifecycleEvent parse_lifecycle_event(std::string_view s);

enum class EntryKind { Text, Integer, Real, Flag, Choice, File, Executable };

std::string_view to_string(EntryKind k);
EntryKind parse_entry_kind(std::string_view s);

struct Entry {
    std::string name;
    EntryKind kind = EntryKind::Text;
    std::string value;
    std::optional<std::vector<std::string>> allowed;
    bool required = false;
    std::string description;

    bool operator==(const Entry&) const = default;
};

struct EntryGroup {
    std::string name;
    std::vector<Entry> entries;

    bool operator==(const EntryGroup&) const = default;
};

// What an item needs, never how it is processed.
struct Form {
    std::string item_id;
    std::string description;
    std::vector<EntryGroup> groups;
    std::vector<std::string> actions;

    bool operator==(const Form&) const = default;

    const Entry* find(std::string_view group, std::string_view entry) const;
    Entry* find(std::string_view group, std::string_view entry);
    // "group.entry" addressing, shared with template placeholders.
    const Entry* find(std::string_view ref) const;
    Entry* find(std::string_view ref);
};

struct PipelineStep {
    std::string action;
    // action parameter name -> "group.entry"
    std::map<std::string, std::string> bindings;

    bool operator==(const PipelineStep&) const = default;
};

struct ItemDescriptor {
    std::string type_id;
    std::string display_name;
    Form form_template;
    std::vector<PipelineStep> pipeline;

    bool operator==(const ItemDescriptor&) const = default;
};

struct TransitionRecord {
    ItemState from = ItemState::FormReady;
    LifecycleEvent event = LifecycleEvent::ReviewAccepted;
    ItemState to = ItemState::FormReady;
    std::string at;

    bool operator==(const TransitionRecord&) const = default;
};

struct ItemRecord {
    std::string id;
    std::string type_id;
    std::string name;
    ItemState state = ItemState::FormReady;
    Form form;
    std::string project;
    std::string created_at;
    std::string updated_at;
    // Explanation attached by the last terminal transition (failing stage etc).
    std::string status_message;
    std::string last_job_id;
    std::vector<TransitionRecord> history;

    bool operator==(const ItemRecord&) const = default;
};

enum class Verdict { Accepted, Rejected };

struct FormStatus {
    Verdict verdict = Verdict::Accepted;
    std::vector<std::string> messages;

    bool accepted() const { return verdict == Verdict::Accepted; }
};

struct TypeSummary {
    std::string type_id;
    std::string display_name;

    bool operator==(const TypeSummary&) const = default;
};

}  // namespace forgeflow::core
