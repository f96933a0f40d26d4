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

#include "forgeflow/exec/job.hpp"

#include <string>

#include "forgeflow/error.hpp"

namespace forgeflow::exec {

std::string_view to_string(JobStatus s) {
    switch (s) {
        case JobStatus::Queued: return "Queued";
        case JobStatus::Staging: return "Staging";
        case JobStatus::Running: return "Running";
        case JobStatus::Retrieving: return "Retrieving";
        case JobStatus::Finished: return "Finished";
        case JobStatus::Failed: return "Failed";
        case JobStatus::Cancelled: return "Cancelled";
    }
    return "?";
}

JobStatus parse_job_status(std::string_view s) {
    for (auto st : {JobStatus::Queued, JobStatus::Staging, JobStatus::Running, JobStatus::Retrieving,
                    JobStatus::Finished, JobStatus::Failed, JobStatus::Cancelled}) {
        if (to_string(st) == s) return st;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown job status '" + std::string(s) + "'");
}

std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::Status: return "status";
        case EventKind::Stdout: return "stdout";
        case EventKind::Stderr: return "stderr";
        case EventKind::FileStaged: return "file_staged";
        case EventKind::FileRetrieved: return "file_retrieved";
    }
    return "?";
}

EventKind parse_event_kind(std::string_view s) {
    for (auto k : {EventKind::Status, EventKind::Stdout, EventKind::Stderr, EventKind::FileStaged,
                   EventKind::FileRetrieved}) {
        if (to_string(k) == s) return k;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown event kind '" + std::string(s) + "'");
}

nlohmann::json to_json(const JobEvent& e) {
    return {{"job_id", e.job_id},
            {"seq", e.seq},
            {"kind", std::string(to_string(e.kind))},
            {"payload", e.payload},
            {"timestamp", e.timestamp}};
}

nlohmann::json to_json(const JobHandle& h) {
    nlohmann::json j = {{"job_id", h.job_id},
                        {"status", std::string(to_string(h.status))},
                        {"exit_code", nullptr},
                        {"started_at", h.started_at},
                        {"ended_at", h.ended_at},
                        {"message", h.message},
                        {"job_dir", h.job_dir}};
    if (h.exit_code) j["exit_code"] = *h.exit_code;
    return j;
}

JobEvent event_from_json(const nlohmann::json& doc) {
    try {
        JobEvent e;
        e.job_id = doc.at("job_id").get<std::string>();
        e.seq = doc.at("seq").get<std::uint64_t>();
        e.kind = parse_event_kind(doc.at("kind").get<std::string>());
        e.payload = doc.at("payload").get<std::string>();
        e.timestamp = doc.at("timestamp").get<std::string>();
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::SerializationFailure, std::string("bad job event: ") + ex.what());
    }
}

std::string event_line(const JobEvent& e) {
    return to_json(e).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace forgeflow::exec
