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

#include "forgeflow/core/validation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cctype>
#include <cstdlib>
#include <set>

#include "forgeflow/error.hpp"

namespace forgeflow::core {

namespace {

bool parses_as_integer(const std::string& v) {
    long long out;
    auto begin = v.data();
    auto end = v.data() + v.size();
    if (begin != end && *begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && begin != end;
}

bool parses_as_real(const std::string& v) {
    if (v.empty() || std::isspace(static_cast<unsigned char>(v.front()))) return false;
    char* end = nullptr;
    double d = std::strtod(v.c_str(), &end);
    return end == v.c_str() + v.size() && std::isfinite(d);
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += ", ";
        out += s;
    }
    return out;
}

}  // namespace

std::optional<std::string> check_entry(const Entry& e, const std::string& group,
                                       const persistence::WorkspaceRef* ws) {
    const auto ref = group + "." + e.name;
    if (e.kind == EntryKind::Choice && (!e.allowed || e.allowed->empty())) {
        return ref + ": choice entry has no allowed values";
    }
    if (e.value.empty()) {
        if (e.required) return ref + ": required entry is empty";
        return std::nullopt;
    }
    switch (e.kind) {
        case EntryKind::Text:
            break;
        case EntryKind::Integer:
            if (!parses_as_integer(e.value)) return ref + ": '" + e.value + "' is not an integer";
            break;
        case EntryKind::Real:
            if (!parses_as_real(e.value)) return ref + ": '" + e.value + "' is not a real number";
            break;
        case EntryKind::Flag:
            if (e.value != "true" && e.value != "false") {
                return ref + ": '" + e.value + "' is not a flag (true/false)";
            }
            break;
        case EntryKind::Choice:
            if (std::find(e.allowed->begin(), e.allowed->end(), e.value) == e.allowed->end()) {
                return ref + ": '" + e.value + "' is not one of {" + join(*e.allowed) + "}";
            }
            break;
        case EntryKind::File:
        case EntryKind::Executable: {
            std::string normal;
            try {
                normal = persistence::normalize_relative(e.value);
            } catch (const Error&) {
                return ref + ": '" + e.value + "' must be a path relative to the workspace";
            }
            bool is_path = e.kind == EntryKind::File || e.value.find('/') != std::string::npos;
            if (is_path && e.required && ws != nullptr) {
                std::error_code ec;
                if (normal == "." || !std::filesystem::is_regular_file(ws->resolve(normal), ec)) {
                    return ref + ": file '" + e.value + "' not found in workspace";
                }
            }
            break;
        }
    }
    return std::nullopt;
}

std::vector<std::string> validate_form(const Form& form, const persistence::WorkspaceRef* ws) {
    std::vector<std::string> messages;
    std::set<std::string> groups;
    for (const auto& g : form.groups) {
        if (!groups.insert(g.name).second) messages.push_back("duplicate group '" + g.name + "'");
        std::set<std::string> names;
        for (const auto& e : g.entries) {
            if (!names.insert(e.name).second) {
                messages.push_back("duplicate entry '" + g.name + "." + e.name + "'");
                continue;
            }
            if (auto m = check_entry(e, g.name, ws)) messages.push_back(std::move(*m));
        }
    }
    return messages;
}

Form merge_form_edits(const Form& stored, const Form& edited) {
    Form merged = stored;
    for (const auto& eg : edited.groups) {
        auto git = std::find_if(merged.groups.begin(), merged.groups.end(),
                                [&](const EntryGroup& g) { return g.name == eg.name; });
        if (git == merged.groups.end()) {
            merged.groups.push_back(eg);
            continue;
        }
        for (const auto& ee : eg.entries) {
            auto eit = std::find_if(git->entries.begin(), git->entries.end(),
                                    [&](const Entry& e) { return e.name == ee.name; });
            if (eit == git->entries.end()) {
                git->entries.push_back(ee);
            } else {
                eit->value = ee.value;
            }
        }
    }
    return merged;
}

}  // namespace forgeflow::core
