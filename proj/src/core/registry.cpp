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

#include "forgeflow/core/registry.hpp"

#include <algorithm>
#include <atomic>

#include "forgeflow/error.hpp"
#include "forgeflow/persistence/store.hpp"

namespace forgeflow::core {

void ActionContext::add_artifact(const std::string& rel_path) {
    if (std::find(artifacts.begin(), artifacts.end(), rel_path) == artifacts.end()) {
        artifacts.push_back(rel_path);
    }
}

ActionRun::ActionRun() {
    static std::atomic<std::uint64_t> counter{0};
    run_id_ = "run-" + std::to_string(++counter);
}

TypeRegistry::TypeRegistry() : map_(std::make_shared<const Snapshot>()) {}

std::string TypeRegistry::add(ItemDescriptor descriptor) {
    auto problems = persistence::check_descriptor(descriptor);
    if (!problems.empty()) {
        std::string msg;
        for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
        throw Error(ErrorCode::InvalidDescriptor, msg);
    }
    auto type_id = descriptor.type_id;
    auto entry = std::make_shared<const ItemDescriptor>(std::move(descriptor));
    std::lock_guard lock(mutex_);
    auto next = std::make_shared<Snapshot>(*map_);
    (*next)[type_id] = std::move(entry);
    map_ = std::move(next);
    ++revision_;
    return type_id;
}

std::shared_ptr<const ItemDescriptor> TypeRegistry::find(const std::string& type_id) const {
    auto snap = snapshot();
    auto it = snap->find(type_id);
    return it == snap->end() ? nullptr : it->second;
}

std::vector<TypeSummary> TypeRegistry::list() const {
    auto snap = snapshot();
    std::vector<TypeSummary> out;
    out.reserve(snap->size());
    for (const auto& [id, d] : *snap) out.push_back({id, d->display_name});
    return out;
}

std::shared_ptr<const TypeRegistry::Snapshot> TypeRegistry::snapshot() const {
    std::lock_guard lock(mutex_);
    return map_;
}

std::uint64_t TypeRegistry::revision() const {
    std::lock_guard lock(mutex_);
    return revision_;
}

ActionRegistry::ActionRegistry() : map_(std::make_shared<const Map>()) {}

void ActionRegistry::add(ActionSpec spec) {
    if (spec.name.empty()) throw Error(ErrorCode::InvalidArgument, "action name is empty");
    if (!spec.make_run) throw Error(ErrorCode::InvalidArgument, "action " + spec.name + " has no factory");
    auto name = spec.name;
    auto entry = std::make_shared<const ActionSpec>(std::move(spec));
    std::lock_guard lock(mutex_);
    auto next = std::make_shared<Map>(*map_);
    (*next)[name] = std::move(entry);
    map_ = std::move(next);
}

std::shared_ptr<const ActionSpec> ActionRegistry::find(const std::string& name) const {
    std::shared_ptr<const Map> snap;
    {
        std::lock_guard lock(mutex_);
        snap = map_;
    }
    auto it = snap->find(name);
    return it == snap->end() ? nullptr : it->second;
}

std::shared_ptr<const ActionSpec> ActionRegistry::get(const std::string& name) const {
    auto spec = find(name);
    if (!spec) throw Error(ErrorCode::UnknownAction, name);
    return spec;
}

std::vector<std::string> ActionRegistry::names() const {
    std::shared_ptr<const Map> snap;
    {
        std::lock_guard lock(mutex_);
        snap = map_;
    }
    std::vector<std::string> out;
    for (const auto& [name, _] : *snap) out.push_back(name);
    return out;
}

}  // namespace forgeflow::core
