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
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "forgeflow/exec/job.hpp"
#include "forgeflow/exec/process.hpp"
#include "forgeflow/persistence/workspace.hpp"

namespace forgeflow::exec {

struct RemoteFile {
    std::string path;  // relative to the listed directory
    std::uint64_t size = 0;

    bool operator==(const RemoteFile&) const = default;
};

/// Transport for running jobs and moving files, shaped after an SSH/SFTP
/// session: remote paths are relative to the connector's own root.
class Connector {
public:
    virtual ~Connector() = default;

    virtual std::string_view id() const = 0;

    virtual void make_directory(std::string_view remote_dir) = 0;
    virtual void upload(const std::filesystem::path& local, std::string_view remote) = 0;
    virtual void download(std::string_view remote, const std::filesystem::path& local) = 0;
    /// Size of a regular file, nullopt when absent.
    virtual std::optional<std::uint64_t> stat(std::string_view remote) = 0;
    /// Regular files below remote_dir, recursively, sorted by path.
    virtual std::vector<RemoteFile> list_files(std::string_view remote_dir) = 0;
    /// Starts program with remote_cwd as working directory. Termination goes
    /// through the returned process.
    virtual std::shared_ptr<ChildProcess> exec(const std::string& program,
                                               const std::vector<std::string>& args,
                                               std::string_view remote_cwd) = 0;
};

// Connector whose "remote side" is a directory tree on this machine.
class DirectoryConnector : public Connector {
public:
    DirectoryConnector(std::string id, std::filesystem::path root);

    std::string_view id() const override { return id_; }
    const std::filesystem::path& root() const { return root_; }

    void make_directory(std::string_view remote_dir) override;
    void upload(const std::filesystem::path& local, std::string_view remote) override;
    void download(std::string_view remote, const std::filesystem::path& local) override;
    std::optional<std::uint64_t> stat(std::string_view remote) override;
    std::vector<RemoteFile> list_files(std::string_view remote_dir) override;
    std::shared_ptr<ChildProcess> exec(const std::string& program, const std::vector<std::string>& args,
                                       std::string_view remote_cwd) override;

protected:
    std::filesystem::path remote_path(std::string_view remote) const;

private:
    std::string id_;
    std::filesystem::path root_;
};

/// Emulates a foreign host: its filesystem is a separate tree and every
/// transfer pays the configured latency and may fail with the configured
/// probability (Error(TransportFailure)). Latency waits end early on stop.
class SimRemoteConnector : public DirectoryConnector {
public:
    SimRemoteConnector(std::filesystem::path root, SimRemoteOptions options, std::stop_token stop);

    void upload(const std::filesystem::path& local, std::string_view remote) override;
    void download(std::string_view remote, const std::filesystem::path& local) override;

private:
    void transfer_gate(std::string_view what);

    SimRemoteOptions options_;
    std::stop_token stop_;
    std::mutex mutex_;
    std::mt19937_64 rng_;
};

using ConnectorFactory = std::function<std::unique_ptr<Connector>(
    const persistence::WorkspaceRef&, const JobProfile&, std::stop_token)>;

inline constexpr std::string_view kLocalConnector = "local";
inline constexpr std::string_view kSimRemoteConnector = "sim-remote";

/// Root of a connector's job directories inside the workspace.
std::filesystem::path connector_root(const persistence::WorkspaceRef& ws, std::string_view connector_id);

ConnectorFactory local_connector_factory();
ConnectorFactory sim_remote_connector_factory();

}  // namespace forgeflow::exec
