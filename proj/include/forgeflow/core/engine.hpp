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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "forgeflow/core/registry.hpp"
#include "forgeflow/core/types.hpp"
#include "forgeflow/exec/job_manager.hpp"
#include "forgeflow/persistence/store.hpp"
#include "forgeflow/persistence/workspace.hpp"
#include "forgeflow/util/text.hpp"

namespace forgeflow::core {

struct EngineOptions {
    std::filesystem::path workspace_root;
    // Seeds item and job id generation; two engines with the same seed and
    // the same calls hand out the same ids.
    std::optional<std::uint64_t> id_seed;
};

struct CreateOptions {
    std::optional<std::string> id;
    std::optional<std::string> name;
};

struct ProcessTicket {
    std::string ticket_id;
    std::string item_id;
};

/// Owns the registries, the items of one workspace and the job manager.
///
/// Each item is confined to at most one in-flight process run; its state
/// changes and file writes happen under the item's own lock, so different
/// items process fully in parallel.
class Engine {
public:
    explicit Engine(EngineOptions options);
    ~Engine();

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    const persistence::WorkspaceRef& workspace() const { return ws_; }
    exec::JobManager& jobs() { return jobs_; }
    TypeRegistry& types() { return types_; }
    ActionRegistry& actions() { return actions_; }

    /// Reads persisted items and descriptor files. Returns diagnostics for
    /// documents that were skipped.
    std::vector<persistence::Diagnostic> load();
    /// Registers descriptor files that are new or changed since last seen.
    std::vector<persistence::Diagnostic> refresh_descriptors();

    std::string register_item_descriptor(ItemDescriptor descriptor);
    std::uint64_t registry_revision() const { return types_.revision(); }
    std::shared_ptr<const ItemDescriptor> get_item_descriptor(const std::string& type_id);
    /// Sorted by type_id; picks up descriptor files dropped into the
    /// workspace since the last call.
    std::vector<TypeSummary> list_item_types();

    void register_action(ActionSpec spec) { actions_.add(std::move(spec)); }
    std::shared_ptr<const ActionSpec> get_action(const std::string& name) const { return actions_.get(name); }

    /// New item in FormReady with the descriptor's template form; persisted
    /// before returning. Errors: UnknownType, InvalidProject, AlreadyExists
    /// and InvalidName for a requested id.
    ItemRecord create_item(const std::string& type_id, const std::string& project,
                           const CreateOptions& options = {});

    ItemRecord get_item(const std::string& item_id) const;
    std::vector<ItemRecord> list_items() const;

    /// Validates the merged form and stores it either way; Accepted moves a
    /// FormReady item to ReadyToProcess, Rejected sends it back to FormReady.
    /// WrongState unless the item is FormReady or ReadyToProcess.
    FormStatus review_form(const std::string& item_id, const Form& edited);

    /// Stores edits without reviewing them. A reviewed or processed item
    /// drops back to FormReady (ReviewRejected or Reopen) so the edits have
    /// to be reviewed before the next run. WrongState while Processing.
    ItemRecord edit_form(const std::string& item_id, const Form& edited);

    ItemRecord reopen_item(const std::string& item_id);

    /// Starts the descriptor pipeline on a worker and returns immediately.
    /// WrongState for an item not in ReadyToProcess/Processed/ProcessError
    /// (or already running) and for an action the form does not offer;
    /// UnknownAction, after moving the item to ProcessError, when a pipeline
    /// stage has no registered action.
    ProcessTicket process_item(const std::string& item_id, const std::string& action_name);

    /// Blocks until the item has no run in flight.
    ItemRecord wait_item(const std::string& item_id) const;
    std::optional<ItemRecord> wait_item_for(const std::string& item_id,
                                            std::chrono::milliseconds timeout) const;

    /// Kills the running stage and returns once the item is ReadyToProcess.
    ItemState cancel_item(const std::string& item_id);

private:
    struct Run;
    struct Slot;

    std::shared_ptr<Slot> find(const std::string& item_id) const;
    void apply(Slot& slot, LifecycleEvent event, std::string message = {});
    void persist(Slot& slot);
    void run_pipeline(std::shared_ptr<Slot> slot, std::shared_ptr<Run> run,
                      std::vector<std::pair<PipelineStep, std::shared_ptr<const ActionSpec>>> stages);

    persistence::WorkspaceRef ws_;
    util::IdGenerator ids_;
    TypeRegistry types_;
    ActionRegistry actions_;
    exec::JobManager jobs_;

    mutable std::mutex descriptor_mutex_;
    std::map<std::string, ItemDescriptor> file_descriptors_;

    mutable std::shared_mutex items_mutex_;
    std::map<std::string, std::shared_ptr<Slot>> items_;
    std::atomic<std::uint64_t> tickets_{0};
};

}  // namespace forgeflow::core
