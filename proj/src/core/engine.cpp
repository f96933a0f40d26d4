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

#include "forgeflow/core/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <condition_variable>
#include <mutex>
#include <thread>

#include "forgeflow/core/lifecycle.hpp"
#include "forgeflow/core/validation.hpp"
#include "forgeflow/error.hpp"

namespace forgeflow::core {

namespace {

bool valid_item_id(const std::string& id) {
    if (id.empty() || id.size() > 64) return false;
    return std::all_of(id.begin(), id.end(), [](unsigned char c) { return std::isalnum(c) || c == '-'; });
}

std::string checked_project(const std::string& project) {
    std::string normal;
    try {
        normal = persistence::normalize_relative(project);
    } catch (const Error& e) {
        throw Error(ErrorCode::InvalidProject, e.what());
    }
    if (project.empty() || normal == "." || normal.front() == '.') {
        throw Error(ErrorCode::InvalidProject, "'" + project + "' is not a project directory");
    }
    return normal;
}

}  // namespace

struct Engine::Run {
    std::mutex mutex;
    std::stop_source stop;
    ActionRun* current = nullptr;
    bool cancelled = false;
};

struct Engine::Slot {
    mutable std::mutex mutex;
    mutable std::condition_variable cv;
    ItemRecord record;
    bool busy = false;
    std::shared_ptr<Run> run;
    std::thread worker;
};

Engine::Engine(EngineOptions options)
    : ws_(options.workspace_root),
      ids_(options.id_seed),
      jobs_(ws_, options.id_seed ? std::optional<std::uint64_t>(*options.id_seed ^ 0x9e3779b97f4a7c15ull)
                                 : std::nullopt) {}

Engine::~Engine() {
    std::vector<std::shared_ptr<Slot>> slots;
    {
        std::unique_lock lock(items_mutex_);
        for (auto& [_, slot] : items_) slots.push_back(slot);
    }
    for (auto& slot : slots) {
        std::shared_ptr<Run> run;
        {
            std::lock_guard lock(slot->mutex);
            if (slot->busy) run = slot->run;
        }
        if (run) {
            std::lock_guard lock(run->mutex);
            run->cancelled = true;
            run->stop.request_stop();
            if (run->current) run->current->kill();
        }
    }
    for (auto& slot : slots) {
        if (slot->worker.joinable()) slot->worker.join();
    }
}

std::vector<persistence::Diagnostic> Engine::load() {
    auto loaded = persistence::load_workspace(ws_);
    {
        std::unique_lock lock(items_mutex_);
        for (auto& item : loaded.items) {
            if (items_.count(item.id)) continue;
            auto slot = std::make_shared<Slot>();
            auto id = item.id;
            slot->record = std::move(item);
            items_.emplace(id, std::move(slot));
        }
    }
    auto diagnostics = std::move(loaded.diagnostics);
    std::lock_guard lock(descriptor_mutex_);
    for (auto& d : loaded.descriptors) {
        auto it = file_descriptors_.find(d.type_id);
        if (it != file_descriptors_.end() && it->second == d) continue;
        file_descriptors_[d.type_id] = d;
        types_.add(std::move(d));
    }
    return diagnostics;
}

std::vector<persistence::Diagnostic> Engine::refresh_descriptors() {
    auto loaded = persistence::load_descriptors(ws_);
    std::lock_guard lock(descriptor_mutex_);
    for (auto& d : loaded.descriptors) {
        auto it = file_descriptors_.find(d.type_id);
        if (it != file_descriptors_.end() && it->second == d) continue;
        file_descriptors_[d.type_id] = d;
        types_.add(std::move(d));
    }
    return loaded.diagnostics;
}

std::string Engine::register_item_descriptor(ItemDescriptor descriptor) {
    return types_.add(std::move(descriptor));
}

std::shared_ptr<const ItemDescriptor> Engine::get_item_descriptor(const std::string& type_id) {
    auto d = types_.find(type_id);
    if (!d) {
        refresh_descriptors();
        d = types_.find(type_id);
    }
    if (!d) throw Error(ErrorCode::UnknownType, type_id);
    return d;
}

std::vector<TypeSummary> Engine::list_item_types() {
    refresh_descriptors();
    return types_.list();
}

std::shared_ptr<Engine::Slot> Engine::find(const std::string& item_id) const {
    std::shared_lock lock(items_mutex_);
    auto it = items_.find(item_id);
    if (it == items_.end()) throw Error(ErrorCode::UnknownItem, item_id);
    return it->second;
}

void Engine::apply(Slot& slot, LifecycleEvent event, std::string message) {
    auto& r = slot.record;
    auto next = transition(r.state, event);
    auto now = util::utc_timestamp();
    r.history.push_back({r.state, event, next, now});
    r.state = next;
    r.updated_at = now;
    r.status_message = std::move(message);
}

void Engine::persist(Slot& slot) { persistence::save_item(slot.record, ws_); }

ItemRecord Engine::create_item(const std::string& type_id, const std::string& project,
                               const CreateOptions& options) {
    auto descriptor = get_item_descriptor(type_id);
    auto normal_project = checked_project(project);

    auto slot = std::make_shared<Slot>();
    std::unique_lock lock(items_mutex_);
    std::string id;
    if (options.id) {
        if (!valid_item_id(*options.id)) {
            throw Error(ErrorCode::InvalidName, "item id '" + *options.id + "' may only use [A-Za-z0-9-]");
        }
        if (items_.count(*options.id)) throw Error(ErrorCode::AlreadyExists, "item " + *options.id);
        id = *options.id;
    } else {
        do {
            id = ids_.next("i");
        } while (items_.count(id));
    }
    auto& r = slot->record;
    r.id = id;
    r.type_id = descriptor->type_id;
    r.name = options.name.value_or(descriptor->display_name);
    r.state = ItemState::FormReady;
    r.form = descriptor->form_template;
    r.form.item_id = id;
    r.project = normal_project;
    r.created_at = r.updated_at = util::utc_timestamp();
    persist(*slot);
    items_.emplace(id, slot);
    return r;
}

ItemRecord Engine::get_item(const std::string& item_id) const {
    auto slot = find(item_id);
    std::lock_guard lock(slot->mutex);
    return slot->record;
}

std::vector<ItemRecord> Engine::list_items() const {
    std::vector<std::shared_ptr<Slot>> slots;
    {
        std::shared_lock lock(items_mutex_);
        for (const auto& [_, slot] : items_) slots.push_back(slot);
    }
    std::vector<ItemRecord> out;
    for (const auto& slot : slots) {
        std::lock_guard lock(slot->mutex);
        out.push_back(slot->record);
    }
    return out;
}

FormStatus Engine::review_form(const std::string& item_id, const Form& edited) {
    auto slot = find(item_id);
    std::lock_guard lock(slot->mutex);
    auto& r = slot->record;
    if (slot->busy || (r.state != ItemState::FormReady && r.state != ItemState::ReadyToProcess)) {
        throw Error(ErrorCode::WrongState,
                    "item " + item_id + " is " + std::string(to_string(r.state)) + "; it cannot be reviewed");
    }
    auto merged = merge_form_edits(r.form, edited);
    FormStatus status;
    status.messages = validate_form(merged, &ws_);
    status.verdict = status.messages.empty() ? Verdict::Accepted : Verdict::Rejected;
    r.form = std::move(merged);
    if (!status.accepted()) {
        apply(*slot, LifecycleEvent::ReviewRejected, "review rejected");
    } else if (r.state == ItemState::FormReady) {
        apply(*slot, LifecycleEvent::ReviewAccepted);
    } else {
        r.updated_at = util::utc_timestamp();
    }
    persist(*slot);
    return status;
}

ItemRecord Engine::edit_form(const std::string& item_id, const Form& edited) {
    auto slot = find(item_id);
    std::lock_guard lock(slot->mutex);
    auto& r = slot->record;
    if (slot->busy || r.state == ItemState::Processing) {
        throw Error(ErrorCode::WrongState, "item " + item_id + " is Processing");
    }
    r.form = merge_form_edits(r.form, edited);
    switch (r.state) {
        case ItemState::ReadyToProcess:
            apply(*slot, LifecycleEvent::ReviewRejected, "form edited; review required");
            break;
        case ItemState::Processed:
        case ItemState::ProcessError:
            apply(*slot, LifecycleEvent::Reopen, "form edited; review required");
            break;
        default:
            r.updated_at = util::utc_timestamp();
            break;
    }
    persist(*slot);
    return r;
}

ItemRecord Engine::reopen_item(const std::string& item_id) {
    auto slot = find(item_id);
    std::lock_guard lock(slot->mutex);
    if (slot->busy) throw Error(ErrorCode::WrongState, "item " + item_id + " is Processing");
    if (!try_transition(slot->record.state, LifecycleEvent::Reopen)) {
        throw Error(ErrorCode::WrongState, "item " + item_id + " is " +
                                               std::string(to_string(slot->record.state)));
    }
    apply(*slot, LifecycleEvent::Reopen);
    persist(*slot);
    return slot->record;
}

ProcessTicket Engine::process_item(const std::string& item_id, const std::string& action_name) {
    auto slot = find(item_id);
    std::unique_lock lock(slot->mutex);
    auto& r = slot->record;
    if (slot->busy || !try_transition(r.state, LifecycleEvent::ProcessStarted)) {
        throw Error(ErrorCode::WrongState,
                    "item " + item_id + " is " + std::string(to_string(r.state)) + "; it cannot be processed");
    }
    if (std::find(r.form.actions.begin(), r.form.actions.end(), action_name) == r.form.actions.end()) {
        throw Error(ErrorCode::WrongState, "item " + item_id + " does not offer action '" + action_name + "'");
    }
    auto descriptor = types_.find(r.type_id);
    if (!descriptor) throw Error(ErrorCode::UnknownType, r.type_id);

    apply(*slot, LifecycleEvent::ProcessStarted);
    std::vector<std::pair<PipelineStep, std::shared_ptr<const ActionSpec>>> stages;
    for (std::size_t i = 0; i < descriptor->pipeline.size(); ++i) {
        const auto& step = descriptor->pipeline[i];
        auto spec = actions_.find(step.action);
        if (!spec) {
            auto message = "stage " + std::to_string(i + 1) + " (" + step.action +
                           "): no action registered under that name";
            apply(*slot, LifecycleEvent::ProcessFailed, message);
            persist(*slot);
            throw Error(ErrorCode::UnknownAction, message);
        }
        stages.emplace_back(step, std::move(spec));
    }

    if (slot->worker.joinable()) slot->worker.join();  // previous run has finished
    auto run = std::make_shared<Run>();
    slot->busy = true;
    slot->run = run;
    slot->worker = std::thread(&Engine::run_pipeline, this, slot, run, std::move(stages));
    return {"t" + std::to_string(++tickets_), item_id};
}

void Engine::run_pipeline(std::shared_ptr<Slot> slot, std::shared_ptr<Run> run,
                          std::vector<std::pair<PipelineStep, std::shared_ptr<const ActionSpec>>> stages) {
    ItemRecord item;
    {
        std::lock_guard lock(slot->mutex);
        item = slot->record;
    }
    std::map<std::string, std::string> outputs;
    std::vector<std::string> artifacts;
    std::optional<std::string> failure;

    for (std::size_t i = 0; i < stages.size() && !failure; ++i) {
        const auto& [step, spec] = stages[i];
        auto label = "stage " + std::to_string(i + 1) + " (" + step.action + ")";
        ActionContext ctx{item, ws_, jobs_, {}, outputs, artifacts, run->stop.get_token(),
                          [&](const std::string& job_id) {
                              std::lock_guard lock(slot->mutex);
                              slot->record.last_job_id = job_id;
                          },
                          i};
        for (const auto& [param, ref] : step.bindings) {
            const auto* entry = item.form.find(ref);
            if (!entry) {
                failure = label + ": parameter '" + param + "' is bound to unknown entry '" + ref + "'";
                break;
            }
            ctx.params[param] = entry->value;
        }
        if (failure) break;

        std::unique_ptr<ActionRun> action_run;
        {
            std::lock_guard lock(run->mutex);
            if (run->cancelled) break;
            action_run = spec->make_run();
            run->current = action_run.get();
        }
        ActionResult result;
        try {
            result = action_run->run(ctx);
        } catch (const std::exception& e) {
            result = ActionResult::failure(e.what());
        }
        bool cancelled;
        {
            std::lock_guard lock(run->mutex);
            run->current = nullptr;
            cancelled = run->cancelled;
        }
        if (cancelled) break;
        if (!result.ok) failure = label + ": " + result.message;
    }

    std::lock_guard lock(slot->mutex);
    bool cancelled;
    {
        std::lock_guard run_lock(run->mutex);
        cancelled = run->cancelled;
    }
    if (cancelled) {
        apply(*slot, LifecycleEvent::Cancelled, "cancelled");
    } else if (failure) {
        apply(*slot, LifecycleEvent::ProcessFailed, *failure);
    } else {
        apply(*slot, LifecycleEvent::ProcessSucceeded);
    }
    try {
        persist(*slot);
    } catch (const Error& e) {
        slot->record.status_message += (slot->record.status_message.empty() ? "" : "; ") +
                                       std::string("not persisted: ") + e.what();
    }
    slot->busy = false;
    slot->cv.notify_all();
}

ItemRecord Engine::wait_item(const std::string& item_id) const {
    auto slot = find(item_id);
    std::unique_lock lock(slot->mutex);
    slot->cv.wait(lock, [&] { return !slot->busy; });
    return slot->record;
}

std::optional<ItemRecord> Engine::wait_item_for(const std::string& item_id,
                                                std::chrono::milliseconds timeout) const {
    auto slot = find(item_id);
    std::unique_lock lock(slot->mutex);
    if (!slot->cv.wait_for(lock, timeout, [&] { return !slot->busy; })) return std::nullopt;
    return slot->record;
}

ItemState Engine::cancel_item(const std::string& item_id) {
    auto slot = find(item_id);
    std::shared_ptr<Run> run;
    {
        std::lock_guard lock(slot->mutex);
        if (slot->record.state != ItemState::Processing) {
            throw Error(ErrorCode::WrongState, "item " + item_id + " is " +
                                                   std::string(to_string(slot->record.state)) +
                                                   ", not Processing");
        }
        if (!slot->busy) {
            // Processing without a live run: left over from an earlier process.
            apply(*slot, LifecycleEvent::Cancelled, "cancelled");
            persist(*slot);
            return slot->record.state;
        }
        run = slot->run;
    }
    {
        std::lock_guard lock(run->mutex);
        run->cancelled = true;
        run->stop.request_stop();
        if (run->current) run->current->kill();
    }
    std::unique_lock lock(slot->mutex);
    slot->cv.wait(lock, [&] { return !slot->busy; });
    return slot->record.state;
}

}  // namespace forgeflow::core
