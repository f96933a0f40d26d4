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

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stop_token>
#include <string>
#include <vector>

#include "forgeflow/core/types.hpp"
#include "forgeflow/exec/job_manager.hpp"
#include "forgeflow/persistence/workspace.hpp"

namespace forgeflow::core {

// Everything one pipeline stage gets to work with.
struct ActionContext {
    const ItemRecord& item;
    const persistence::WorkspaceRef& workspace;
    exec::JobManager& jobs;
    // Action parameter -> bound entry value.
    std::map<std::string, std::string> params;
    // Shared by all stages of one run: keyed values ("job.dir", ...) and the
    // workspace-relative files produced or consumed so far.
    std::map<std::string, std::string>& outputs;
    std::vector<std::string>& artifacts;
    std::stop_token stop;
    std::function<void(const std::string& job_id)> report_job;
    std::size_t stage = 0;

    std::string param(const std::string& name, const std::string& fallback = {}) const {
        auto it = params.find(name);
        return it == params.end() ? fallback : it->second;
    }
    void add_artifact(const std::string& rel_path);
};

struct ActionResult {
    bool ok = true;
    std::string message;

    static ActionResult success(std::string message = {}) { return {true, std::move(message)}; }
    static ActionResult failure(std::string message) { return {false, std::move(message)}; }
};

/// One execution of an action. run() happens on the item's worker thread;
/// kill() may be called from another thread while run() is in progress and
/// must make it return promptly.
class ActionRun {
public:
    ActionRun();
    virtual ~ActionRun() = default;

    virtual ActionResult run(ActionContext& ctx) = 0;
    virtual void kill() {}

    const std::string& run_id() const { return run_id_; }

private:
    std::string run_id_;
};

// A stateless template; every process_item obtains fresh runs from it.
struct ActionSpec {
    std::string name;
    std::string description;
    std::function<std::unique_ptr<ActionRun>()> make_run;
};

/// Descriptors by type_id. Readers always see a complete snapshot: writers
/// build a new map and swap it in.
class TypeRegistry {
public:
    using Snapshot = std::map<std::string, std::shared_ptr<const ItemDescriptor>>;

    TypeRegistry();

    /// Registers or replaces; bumps the revision. Throws
    /// Error(InvalidDescriptor).
    std::string add(ItemDescriptor descriptor);

    std::shared_ptr<const ItemDescriptor> find(const std::string& type_id) const;
    std::vector<TypeSummary> list() const;
    std::shared_ptr<const Snapshot> snapshot() const;
    std::uint64_t revision() const;

private:
    mutable std::mutex mutex_;
    std::shared_ptr<const Snapshot> map_;
    std::uint64_t revision_ = 0;
};

class ActionRegistry {
public:
    ActionRegistry();

    /// Throws Error(InvalidArgument) for an empty name or missing factory.
    void add(ActionSpec spec);
    /// Throws Error(UnknownAction).
    std::shared_ptr<const ActionSpec> get(const std::string& name) const;
    std::shared_ptr<const ActionSpec> find(const std::string& name) const;
    std::vector<std::string> names() const;

private:
    using Map = std::map<std::string, std::shared_ptr<const ActionSpec>>;
    mutable std::mutex mutex_;
    std::shared_ptr<const Map> map_;
};

}  // namespace forgeflow::core
