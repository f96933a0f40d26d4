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

#include "forgeflow/persistence/codec.hpp"

#include <set>

#include "forgeflow/error.hpp"
#include "forgeflow/persistence/workspace.hpp"

namespace forgeflow::persistence {

namespace {

[[noreturn]] void fail(const std::string& what) {
    throw Error(ErrorCode::SerializationFailure, what);
}

const json& field(const json& doc, const char* key, const std::string& where) {
    if (!doc.is_object()) fail(where + ": expected an object");
    auto it = doc.find(key);
    if (it == doc.end()) fail(where + ": missing field '" + key + "'");
    return *it;
}

std::string string_field(const json& doc, const char* key, const std::string& where) {
    const auto& v = field(doc, key, where);
    if (!v.is_string()) fail(where + "." + key + ": expected a string");
    return v.get<std::string>();
}

bool bool_field(const json& doc, const char* key, const std::string& where) {
    const auto& v = field(doc, key, where);
    if (!v.is_boolean()) fail(where + "." + key + ": expected a boolean");
    return v.get<bool>();
}

std::vector<std::string> string_list(const json& v, const std::string& where) {
    if (!v.is_array()) fail(where + ": expected an array");
    std::vector<std::string> out;
    for (const auto& s : v) {
        if (!s.is_string()) fail(where + ": expected an array of strings");
        out.push_back(s.get<std::string>());
    }
    return out;
}

const json& array_field(const json& doc, const char* key, const std::string& where) {
    const auto& v = field(doc, key, where);
    if (!v.is_array()) fail(where + "." + key + ": expected an array");
    return v;
}

void reject_unknown_keys(const json& doc, std::initializer_list<const char*> known,
                         const std::string& where) {
    std::set<std::string> allowed(known.begin(), known.end());
    for (const auto& [key, _] : doc.items()) {
        if (!allowed.count(key)) fail(where + ": unknown field '" + key + "'");
    }
}

core::Entry entry_from_json(const json& doc, const std::string& where) {
    reject_unknown_keys(doc, {"name", "kind", "value", "allowed", "required", "description"}, where);
    core::Entry e;
    e.name = string_field(doc, "name", where);
    try {
        e.kind = core::parse_entry_kind(string_field(doc, "kind", where));
    } catch (const Error& err) {
        fail(where + ".kind: " + err.what());
    }
    e.value = string_field(doc, "value", where);
    if (auto it = doc.find("allowed"); it != doc.end()) e.allowed = string_list(*it, where + ".allowed");
    e.required = bool_field(doc, "required", where);
    e.description = string_field(doc, "description", where);
    return e;
}

core::Form form_from_json_at(const json& doc, const std::string& where) {
    reject_unknown_keys(doc, {"item_id", "description", "groups", "actions"}, where);
    core::Form form;
    form.item_id = string_field(doc, "item_id", where);
    form.description = string_field(doc, "description", where);
    const auto& groups = array_field(doc, "groups", where);
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        auto gwhere = where + ".groups[" + std::to_string(gi) + "]";
        reject_unknown_keys(groups[gi], {"name", "entries"}, gwhere);
        core::EntryGroup group;
        group.name = string_field(groups[gi], "name", gwhere);
        const auto& entries = array_field(groups[gi], "entries", gwhere);
        for (std::size_t ei = 0; ei < entries.size(); ++ei) {
            group.entries.push_back(
                entry_from_json(entries[ei], gwhere + ".entries[" + std::to_string(ei) + "]"));
        }
        form.groups.push_back(std::move(group));
    }
    form.actions = string_list(field(doc, "actions", where), where + ".actions");
    return form;
}

void check_record(const core::ItemRecord& item) {
    if (item.id.empty()) fail("item id is empty");
    if (item.id.find('_') != std::string::npos || item.id.find('/') != std::string::npos) {
        fail("item id '" + item.id + "' contains a reserved character");
    }
    if (item.type_id.empty()) fail("item " + item.id + " has no type_id");
    if (item.type_id.find('/') != std::string::npos) fail("type_id contains '/'");
    if (item.form.item_id != item.id) fail("form owner does not match item " + item.id);
    try {
        if (normalize_relative(item.project) != item.project || item.project == ".") {
            fail("project path '" + item.project + "' is not a normalized relative path");
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::SerializationFailure) throw;
        fail("project path '" + item.project + "': " + e.what());
    }
}

}  // namespace

std::string canonical_dump(const json& doc) {
    try {
        auto text = doc.dump(2, ' ', false, json::error_handler_t::strict);
        text.push_back('\n');
        return text;
    } catch (const json::exception& e) {
        fail(e.what());
    }
}

json to_json(const core::Entry& e) {
    json j = {{"name", e.name},
              {"kind", std::string(core::to_string(e.kind))},
              {"value", e.value},
              {"required", e.required},
              {"description", e.description}};
    if (e.allowed) j["allowed"] = *e.allowed;
    return j;
}

json to_json(const core::Form& form) {
    json groups = json::array();
    for (const auto& g : form.groups) {
        json entries = json::array();
        for (const auto& e : g.entries) entries.push_back(to_json(e));
        groups.push_back({{"name", g.name}, {"entries", std::move(entries)}});
    }
    return {{"item_id", form.item_id},
            {"description", form.description},
            {"groups", std::move(groups)},
            {"actions", form.actions}};
}

json to_json(const core::ItemRecord& item) {
    json history = json::array();
    for (const auto& t : item.history) {
        history.push_back({{"from", std::string(core::to_string(t.from))},
                           {"event", std::string(core::to_string(t.event))},
                           {"to", std::string(core::to_string(t.to))},
                           {"at", t.at}});
    }
    return {{"id", item.id},
            {"type_id", item.type_id},
            {"name", item.name},
            {"state", std::string(core::to_string(item.state))},
            {"form", to_json(item.form)},
            {"project", item.project},
            {"created_at", item.created_at},
            {"updated_at", item.updated_at},
            {"status_message", item.status_message},
            {"last_job_id", item.last_job_id},
            {"history", std::move(history)}};
}

json to_json(const core::ItemDescriptor& d) {
    json pipeline = json::array();
    for (const auto& step : d.pipeline) {
        pipeline.push_back({{"action", step.action}, {"bindings", step.bindings}});
    }
    return {{"type_id", d.type_id},
            {"display_name", d.display_name},
            {"form_template", to_json(d.form_template)},
            {"pipeline", std::move(pipeline)}};
}

json to_json(const core::FormStatus& status) {
    return {{"verdict", status.accepted() ? "Accepted" : "Rejected"},
            {"messages", status.messages}};
}

core::Form form_from_json(const json& doc) { return form_from_json_at(doc, "form"); }

core::ItemRecord item_from_json(const json& doc) {
    const std::string where = "item";
    reject_unknown_keys(doc,
                        {"schema_version", "id", "type_id", "name", "state", "form", "project",
                         "created_at", "updated_at", "status_message", "last_job_id", "history"},
                        where);
    core::ItemRecord item;
    item.id = string_field(doc, "id", where);
    item.type_id = string_field(doc, "type_id", where);
    item.name = string_field(doc, "name", where);
    try {
        item.state = core::parse_item_state(string_field(doc, "state", where));
    } catch (const Error& e) {
        fail(std::string("item.state: ") + e.what());
    }
    item.form = form_from_json_at(field(doc, "form", where), "item.form");
    item.project = string_field(doc, "project", where);
    item.created_at = string_field(doc, "created_at", where);
    item.updated_at = string_field(doc, "updated_at", where);
    item.status_message = string_field(doc, "status_message", where);
    item.last_job_id = string_field(doc, "last_job_id", where);
    const auto& history = array_field(doc, "history", where);
    for (std::size_t i = 0; i < history.size(); ++i) {
        auto hwhere = "item.history[" + std::to_string(i) + "]";
        reject_unknown_keys(history[i], {"from", "event", "to", "at"}, hwhere);
        core::TransitionRecord t;
        try {
            t.from = core::parse_item_state(string_field(history[i], "from", hwhere));
            t.event = core::parse_lifecycle_event(string_field(history[i], "event", hwhere));
            t.to = core::parse_item_state(string_field(history[i], "to", hwhere));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::SerializationFailure) throw;
            fail(hwhere + ": " + e.what());
        }
        t.at = string_field(history[i], "at", hwhere);
        item.history.push_back(std::move(t));
    }
    check_record(item);
    return item;
}

core::ItemDescriptor descriptor_from_json(const json& doc) {
    const std::string where = "descriptor";
    reject_unknown_keys(doc, {"type_id", "display_name", "form_template", "pipeline"}, where);
    core::ItemDescriptor d;
    d.type_id = string_field(doc, "type_id", where);
    d.display_name = string_field(doc, "display_name", where);
    d.form_template = form_from_json_at(field(doc, "form_template", where), "descriptor.form_template");
    const auto& pipeline = array_field(doc, "pipeline", where);
    for (std::size_t i = 0; i < pipeline.size(); ++i) {
        auto swhere = "descriptor.pipeline[" + std::to_string(i) + "]";
        reject_unknown_keys(pipeline[i], {"action", "bindings"}, swhere);
        core::PipelineStep step;
        step.action = string_field(pipeline[i], "action", swhere);
        const auto& bindings = field(pipeline[i], "bindings", swhere);
        if (!bindings.is_object()) fail(swhere + ".bindings: expected an object");
        for (const auto& [param, ref] : bindings.items()) {
            if (!ref.is_string()) fail(swhere + ".bindings." + param + ": expected a string");
            step.bindings[param] = ref.get<std::string>();
        }
        d.pipeline.push_back(std::move(step));
    }
    return d;
}

std::string serialize_item(const core::ItemRecord& item) {
    check_record(item);
    auto doc = to_json(item);
    doc["schema_version"] = kItemSchemaVersion;
    return canonical_dump(doc);
}

core::ItemRecord deserialize_item(std::string_view bytes) {
    json doc;
    try {
        doc = json::parse(bytes.begin(), bytes.end());
    } catch (const json::exception& e) {
        fail(std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) fail("item document is not an object");
    auto version = doc.find("schema_version");
    if (version == doc.end() || !version->is_number_integer()) {
        throw Error(ErrorCode::SchemaMismatch, "missing or non-integer schema_version");
    }
    if (version->get<long long>() != kItemSchemaVersion) {
        throw Error(ErrorCode::SchemaMismatch,
                    "schema_version " + version->dump() + " (expected " +
                        std::to_string(kItemSchemaVersion) + ")");
    }
    return item_from_json(doc);
}

std::string serialize_descriptor(const core::ItemDescriptor& descriptor) {
    return canonical_dump(to_json(descriptor));
}

core::ItemDescriptor deserialize_descriptor(std::string_view bytes) {
    json doc;
    try {
        doc = json::parse(bytes.begin(), bytes.end());
    } catch (const json::exception& e) {
        fail(std::string("not valid JSON: ") + e.what());
    }
    return descriptor_from_json(doc);
}

std::string item_file_name(const core::ItemRecord& item) {
    return item.id + "_" + item.type_id + ".item.json";
}

}  // namespace forgeflow::persistence
