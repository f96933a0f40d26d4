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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace forgeflow::exec {

enum class JobStatus { Queued, Staging, Running, Retrieving, Finished, Failed, Cancelled };

std::string_view to_string(JobStatus s);
JobStatus parse_job_status(std::string_view s);

constexpr bool is_terminal(JobStatus s) {
    return s == JobStatus::Finished || s == JobStatus::Failed || s == JobStatus::Cancelled;
}

inline constexpr std::uint64_t kDefaultRetrieveThreshold = 10ull * 1024 * 1024;

// Fault injection knobs for the sim-remote connector. Ignored by "local".
struct SimRemoteOptions {
    std::uint32_t latency_ms = 0;
    double failure_probability = 0.0;
    std::uint64_t seed = 0;
};

struct JobProfile {
    // Workspace-relative path (contains '/') or a command name looked up on PATH.
    std::string executable;
    std::vector<std::string> args;
    std::vector<std::string> input_files;
    std::string connector_id = "local";
    std::string working_project;
    std::uint64_t retrieve_threshold_bytes = kDefaultRetrieveThreshold;
    // Workspace-relative values of the owning item's file entries; the ones
    // that sit directly in working_project are staged even when not listed.
    std::vector<std::string> auto_stage_candidates;
    SimRemoteOptions sim;
};

struct JobHandle {
    std::string job_id;
    JobStatus status = JobStatus::Queued;
    std::optional<int> exit_code;
    std::string started_at;
    std::string ended_at;
    // Diagnostic for Failed jobs (MissingInput, SpawnFailure, ...).
    std::string message;
    // "<project>/<job_id>", where logs and retrieved outputs live.
    std::string job_dir;

    bool operator==(const JobHandle&) const = default;
};

enum class EventKind { Status, Stdout, Stderr, FileStaged, FileRetrieved };

std::string_view to_string(EventKind k);
EventKind parse_event_kind(std::string_view s);

struct JobEvent {
    std::string job_id;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::Status;
    std::string payload;
    std::string timestamp;

    bool operator==(const JobEvent&) const = default;
};

nlohmann::json to_json(const JobEvent& e);
nlohmann::json to_json(const JobHandle& h);
JobEvent event_from_json(const nlohmann::json& doc);

/// One events.log line: compact JSON with sorted keys, no trailing newline.
std::string event_line(const JobEvent& e);

struct StagedFile {
    std::string source;  // workspace-relative
    std::string staged;  // relative to the job directory on the connector

    bool operator==(const StagedFile&) const = default;
};

struct OutputFile {
    std::string path;  // relative to the job directory
    std::uint64_t size = 0;

    bool operator==(const OutputFile&) const = default;
};

struct RetrievalResult {
    std::vector<OutputFile> retrieved;
    std::vector<OutputFile> skipped;
    std::uint64_t total_bytes = 0;
};

}  // namespace forgeflow::exec
