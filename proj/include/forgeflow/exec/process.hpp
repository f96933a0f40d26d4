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

#include <sys/types.h>

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace forgeflow::exec {

enum class OutputStream { Stdout, Stderr };

/// A child process in its own process group with stdout and stderr piped
/// back to the parent and stdin bound to /dev/null.
class ChildProcess {
public:
    /// Throws Error(SpawnFailure) when the program cannot be found or exec'd.
    static std::shared_ptr<ChildProcess> spawn(const std::string& program,
                                               const std::vector<std::string>& args,
                                               const std::filesystem::path& cwd);

    ~ChildProcess();
    ChildProcess(const ChildProcess&) = delete;
    ChildProcess& operator=(const ChildProcess&) = delete;

    using ChunkSink = std::function<void(OutputStream, std::string_view bytes)>;
    using LineSink = std::function<void(OutputStream, std::string_view line)>;

    /// Reads both pipes until they close. on_chunk sees raw bytes; on_line
    /// sees each complete line without its terminator, plus a trailing
    /// unterminated line at EOF.
    void pump(const ChunkSink& on_chunk, const LineSink& on_line);

    /// Reaps the child. Returns the exit status, or 128 + signal number.
    int wait();

    void terminate();  // SIGTERM to the whole group
    void kill_hard();  // SIGKILL to the whole group
    bool reaped() const;
    pid_t pid() const { return pid_; }

private:
    ChildProcess(pid_t pid, int out_fd, int err_fd) : pid_(pid), out_fd_(out_fd), err_fd_(err_fd) {}
    void signal_group(int sig);

    pid_t pid_;
    int out_fd_;
    int err_fd_;
    mutable std::mutex mutex_;
    std::optional<int> exit_code_;
};

/// PATH lookup for bare command names; programs containing '/' are returned
/// when executable. nullopt when nothing runnable is found.
std::optional<std::string> find_program(const std::string& program);

}  // namespace forgeflow::exec
