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

#include <filesystem>
#include <functional>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "forgeflow/exec/connector.hpp"
#include "forgeflow/exec/job.hpp"
#include "forgeflow/persistence/workspace.hpp"

namespace forgeflow::exec {

// Names the job directory reserves for its own logs.
inline constexpr std::string_view kReservedJobFiles[] = {"stdout.txt", "stderr.txt", "events.log"};

/// Works out which files a job needs: every listed input, plus each
/// auto-stage candidate that exists directly inside the working project.
/// Each file is staged under its base name. Throws Error(MissingInput) for
/// an absent listed input and Error(StagingConflict) when two different
/// sources share a base name.
std::vector<StagedFile> plan_staging(const persistence::WorkspaceRef& ws, const JobProfile& profile);

/// Copies the planned files into remote_job_dir on the connector, calling
/// on_staged after each. Stops early (returning what was staged so far) when
/// stop is requested.
std::vector<StagedFile> stage_inputs(const persistence::WorkspaceRef& ws, const JobProfile& profile,
                                     Connector& connector, std::string_view remote_job_dir,
                                     const std::function<void(const StagedFile&)>& on_staged,
                                     std::stop_token stop = {});

/// Outputs are the files in remote_job_dir that were not staged there. When
/// their summed size is <= threshold all of them are copied under dest_dir;
/// otherwise none are and every one is reported as skipped.
RetrievalResult retrieve_outputs(Connector& connector, std::string_view remote_job_dir,
                                 const std::vector<StagedFile>& manifest,
                                 const std::filesystem::path& dest_dir, std::uint64_t threshold,
                                 const std::function<void(const OutputFile&)>& on_retrieved = {});

}  // namespace forgeflow::exec
