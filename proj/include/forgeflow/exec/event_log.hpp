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
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "forgeflow/exec/job.hpp"

namespace forgeflow::exec {

/// Append-only, per-job event sequence. A single producer appends; any
/// number of readers follow it by cursor, so a slow reader never holds up
/// the producer. Every event is also written to events.log as it happens.
class EventLog {
public:
    EventLog(std::string job_id, const std::filesystem::path& log_file);

    /// Rebuilds a closed log from an events.log written by an earlier run.
    static std::shared_ptr<EventLog> replay(const std::filesystem::path& log_file);

    JobEvent append(EventKind kind, std::string payload);
    void close();

    bool closed() const;
    std::uint64_t size() const;
    const std::string& job_id() const { return job_id_; }

    /// Event with the given seq, waiting up to timeout for it to be produced.
    /// nullopt on timeout, or immediately once the log is closed and seq is
    /// past the end.
    std::optional<JobEvent> wait_for(std::uint64_t seq, std::chrono::milliseconds timeout) const;

    std::vector<JobEvent> snapshot(std::uint64_t from_seq = 0) const;

private:
    EventLog() = default;

    std::string job_id_;
    mutable std::mutex mutex_;
    mutable std::condition_variable cv_;
    std::vector<JobEvent> events_;
    std::ofstream file_;
    bool closed_ = false;
};

class EventStream {
public:
    EventStream(std::shared_ptr<const EventLog> log, std::uint64_t from_seq)
        : log_(std::move(log)), cursor_(from_seq) {}

    std::optional<JobEvent> next(std::chrono::milliseconds timeout);

    /// True once the log is closed and every event has been handed out.
    bool done() const;
    std::uint64_t position() const { return cursor_; }

    /// Blocks until the log closes and returns everything from the cursor on.
    std::vector<JobEvent> drain();

private:
    std::shared_ptr<const EventLog> log_;
    std::uint64_t cursor_;
};

}  // namespace forgeflow::exec
