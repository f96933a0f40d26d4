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

#include "forgeflow/items/template.hpp"

#include <algorithm>

#include "forgeflow/error.hpp"
#include "forgeflow/persistence/codec.hpp"
#include "forgeflow/persistence/store.hpp"

namespace forgeflow::items {

namespace {

template <typename OnToken, typename OnText>
void scan(std::string_view text, OnToken on_token, OnText on_text) {
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto open = text.find("${", pos);
        if (open == std::string_view::npos) break;
        auto close = text.find('}', open + 2);
        if (close == std::string_view::npos) break;
        on_text(text.substr(pos, open - pos));
        on_token(text.substr(open + 2, close - open - 2));
        pos = close + 1;
    }
    on_text(text.substr(pos));
}

}  // namespace

std::vector<std::string> placeholders(std::string_view text) {
    std::vector<std::string> out;
    scan(
        text,
        [&](std::string_view token) {
            if (std::find(out.begin(), out.end(), token) == out.end()) out.emplace_back(token);
        },
        [](std::string_view) {});
    return out;
}

std::string render_text(std::string_view text, const core::Form& form) {
    std::string out;
    out.reserve(text.size());
    scan(
        text,
        [&](std::string_view token) {
            const auto* entry = form.find(token);
            if (!entry) {
                throw Error(ErrorCode::UnknownPlaceholder, "${" + std::string(token) + "}");
            }
            out += entry->value;
        },
        [&](std::string_view chunk) { out += chunk; });
    return out;
}

std::string render_template(const TemplateSpec& spec, const core::Form& form,
                            const persistence::WorkspaceRef& ws) {
    if (spec.template_file.empty()) throw Error(ErrorCode::MissingInput, "no template file given");
    return render_text(persistence::read_file(ws.resolve(spec.template_file)), form);
}

InputSet write_input_set(const TemplateSpec& spec, const core::Form& form, const std::string& project,
                         const persistence::WorkspaceRef& ws) {
    if (spec.output_name.empty() || spec.manifest_name.empty()) {
        throw Error(ErrorCode::InvalidArgument, "output and manifest names are required");
    }
    auto rendered = render_template(spec, form, ws);
    auto prefix = persistence::normalize_relative(project) + "/";
    InputSet set;
    set.main = persistence::normalize_relative(prefix + spec.output_name);
    set.manifest = persistence::normalize_relative(prefix + spec.manifest_name);
    if (set.main == set.manifest) {
        throw Error(ErrorCode::DuplicateDest, "input and manifest would both be written to " + set.main);
    }
    auto template_normal = persistence::normalize_relative(spec.template_file);
    if (set.main == template_normal) {
        throw Error(ErrorCode::DuplicateDest, "rendered input would overwrite its template " + set.main);
    }

    set.files.push_back(set.main);
    for (const auto& g : form.groups) {
        for (const auto& e : g.entries) {
            if (e.kind != core::EntryKind::File || e.value.empty()) continue;
            auto normal = persistence::normalize_relative(e.value);
            if (normal == template_normal) continue;
            if (std::find(set.files.begin(), set.files.end(), normal) == set.files.end()) {
                set.files.push_back(normal);
            }
        }
    }

    persistence::atomic_write(ws.resolve(set.main), rendered);
    persistence::json manifest = {{"files", set.files}, {"main", set.main}};
    persistence::atomic_write(ws.resolve(set.manifest), persistence::canonical_dump(manifest));
    return set;
}

}  // namespace forgeflow::items
