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

#include "forgeflow/exec/staging.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "forgeflow/error.hpp"

namespace forgeflow::exec {

namespace fs = std::filesystem;

std::vector<StagedFile> plan_staging(const persistence::WorkspaceRef& ws, const JobProfile& profile) {
    std::vector<StagedFile> plan;
    std::set<std::string> sources;
    std::map<std::string, std::string> by_name;

    auto add = [&](const std::string& source) {
        if (!sources.insert(source).second) return;
        auto name = fs::path(source).filename().string();
        auto [it, inserted] = by_name.emplace(name, source);
        if (!inserted) {
            throw Error(ErrorCode::StagingConflict,
                        "'" + source + "' and '" + it->second + "' would both be staged as " + name);
        }
        plan.push_back({source, name});
    };

    for (const auto& input : profile.input_files) {
        auto source = persistence::normalize_relative(input);
        std::error_code ec;
        if (!fs::is_regular_file(ws.resolve(source), ec)) {
            throw Error(ErrorCode::MissingInput, "input file not found: " + source);
        }
        add(source);
    }

    auto project_dir = ws.resolve(profile.working_project.empty() ? "." : profile.working_project);
    for (const auto& candidate : profile.auto_stage_candidates) {
        if (candidate.empty()) continue;
        std::string source;
        try {
            source = persistence::normalize_relative(candidate);
        } catch (const Error&) {
            continue;
        }
        auto abs = ws.resolve(source);
        std::error_code ec;
        if (abs.parent_path() == project_dir && fs::is_regular_file(abs, ec)) add(source);
    }
    return plan;
}

std::vector<StagedFile> stage_inputs(const persistence::WorkspaceRef& ws, const JobProfile& profile,
                                     Connector& connector, std::string_view remote_job_dir,
                                     const std::function<void(const StagedFile&)>& on_staged,
                                     std::stop_token stop) {
    auto plan = plan_staging(ws, profile);
    std::vector<StagedFile> staged;
    for (const auto& file : plan) {
        if (stop.stop_requested()) break;
        connector.upload(ws.resolve(file.source), std::string(remote_job_dir) + "/" + file.staged);
        if (stop.stop_requested()) break;
        staged.push_back(file);
        if (on_staged) on_staged(file);
    }
    return staged;
}

RetrievalResult retrieve_outputs(Connector& connector, std::string_view remote_job_dir,
                                 const std::vector<StagedFile>& manifest, const fs::path& dest_dir,
                                 std::uint64_t threshold,
                                 const std::function<void(const OutputFile&)>& on_retrieved) {
    std::set<std::string> staged;
    for (const auto& f : manifest) staged.insert(f.staged);

    std::vector<OutputFile> outputs;
    RetrievalResult result;
    for (const auto& file : connector.list_files(remote_job_dir)) {
        if (staged.count(file.path)) continue;
        outputs.push_back({file.path, file.size});
        result.total_bytes += file.size;
    }

    if (result.total_bytes > threshold) {
        result.skipped = std::move(outputs);
        return result;
    }
    for (const auto& out : outputs) {
        bool reserved = std::find(std::begin(kReservedJobFiles), std::end(kReservedJobFiles), out.path) !=
                        std::end(kReservedJobFiles);
        if (reserved) {
            result.skipped.push_back(out);
            continue;
        }
        connector.download(std::string(remote_job_dir) + "/" + out.path, dest_dir / out.path);
        result.retrieved.push_back(out);
        if (on_retrieved) on_retrieved(out);
    }
    return result;
}

}  // namespace forgeflow::exec
