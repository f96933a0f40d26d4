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

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "forgeflow/exec/connector.hpp"
#include "forgeflow/exec/event_log.hpp"
#include "forgeflow/exec/job.hpp"
#include "forgeflow/persistence/workspace.hpp"
#include "forgeflow/util/text.hpp"

namespace forgeflow::exec {

inline constexpr std::chrono::milliseconds kKillGracePeriod{2000};

/// Launches jobs over connectors and tracks them until they end.
///
/// Each job runs on its own worker thread through
/// Queued -> Staging -> Running -> Retrieving -> Finished|Failed, with Cancelled
/// reachable from any non-terminal status. The worker is the only writer of
/// the job's event log; poll, stream_events and kill may be called from any
/// thread. Logs and retrieved outputs land in "<project>/<job_id>/".
class JobManager {
public:
    explicit JobManager(persistence::WorkspaceRef ws, std::optional<std::uint64_t> id_seed = std::nullopt);
    ~JobManager();

    JobManager(const JobManager&) = delete;
    JobManager& operator=(const JobManager&) = delete;

    /// "local" and "sim-remote" are registered on construction.
    void register_connector(const std::string& id, ConnectorFactory factory);
    bool has_connector(const std::string& id) const;

    /// Returns at once with status Queued. Throws Error(UnknownConnector),
    /// Error(PathEscape) for a working project outside the workspace.
    JobHandle launch(const JobProfile& profile);

    JobHandle poll(const std::string& job_id) const;  // Error(UnknownJob)

    /// Replays events with seq >= from_seq, then follows live ones. Jobs from
    /// earlier runs are replayed from their events.log.
    EventStream stream_events(const std::string& job_id, std::uint64_t from_seq) const;

    /// Terminates a non-terminal job (SIGTERM, then SIGKILL after the grace
    /// period) and returns once it is Cancelled. Terminal jobs are returned
    /// unchanged.
    JobHandle kill(const std::string& job_id);

    /// Blocks until the job is terminal.
    JobHandle wait(const std::string& job_id) const;
    std::optional<JobHandle> wait_for(const std::string& job_id, std::chrono::milliseconds timeout) const;

    std::vector<StagedFile> manifest(const std::string& job_id) const;
    RetrievalResult retrieval(const std::string& job_id) const;

    const persistence::WorkspaceRef& workspace() const { return ws_; }
    void set_kill_grace(std::chrono::milliseconds grace) { grace_ = grace; }

private:
    struct Job;

    std::shared_ptr<Job> find(const std::string& job_id) const;
    void run(const std::shared_ptr<Job>& job);
    void set_status(Job& job, JobStatus status, std::optional<int> exit_code = std::nullopt,
                    const std::string& detail = {});

    persistence::WorkspaceRef ws_;
    util::IdGenerator ids_;
    std::chrono::milliseconds grace_ = kKillGracePeriod;

    mutable std::shared_mutex mutex_;
    std::map<std::string, ConnectorFactory> connectors_;
    std::map<std::string, std::shared_ptr<Job>> jobs_;
};

}  // namespace forgeflow::exec
