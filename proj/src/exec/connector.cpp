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

#include "forgeflow/exec/connector.hpp"

#include <algorithm>
#include <condition_variable>

#include "forgeflow/error.hpp"

namespace forgeflow::exec {

namespace fs = std::filesystem;

DirectoryConnector::DirectoryConnector(std::string id, fs::path root)
    : id_(std::move(id)), root_(std::move(root)) {}

fs::path DirectoryConnector::remote_path(std::string_view remote) const {
    auto rel = persistence::normalize_relative(remote);
    return rel == "." ? root_ : root_ / rel;
}

void DirectoryConnector::make_directory(std::string_view remote_dir) {
    std::error_code ec;
    fs::create_directories(remote_path(remote_dir), ec);
    if (ec) throw Error(ErrorCode::TransportFailure, "mkdir " + std::string(remote_dir) + ": " + ec.message());
}

void DirectoryConnector::upload(const fs::path& local, std::string_view remote) {
    auto dest = remote_path(remote);
    std::error_code ec;
    fs::create_directories(dest.parent_path(), ec);
    fs::copy_file(local, dest, fs::copy_options::overwrite_existing, ec);
    if (ec) throw Error(ErrorCode::TransportFailure, "upload " + local.string() + ": " + ec.message());
}

void DirectoryConnector::download(std::string_view remote, const fs::path& local) {
    std::error_code ec;
    fs::create_directories(local.parent_path(), ec);
    fs::copy_file(remote_path(remote), local, fs::copy_options::overwrite_existing, ec);
    if (ec) throw Error(ErrorCode::TransportFailure, "download " + std::string(remote) + ": " + ec.message());
}

std::optional<std::uint64_t> DirectoryConnector::stat(std::string_view remote) {
    std::error_code ec;
    auto p = remote_path(remote);
    if (!fs::is_regular_file(p, ec)) return std::nullopt;
    return fs::file_size(p, ec);
}

std::vector<RemoteFile> DirectoryConnector::list_files(std::string_view remote_dir) {
    std::vector<RemoteFile> out;
    auto base = remote_path(remote_dir);
    std::error_code ec;
    if (!fs::is_directory(base, ec)) return out;
    for (auto it = fs::recursive_directory_iterator(base, ec); it != fs::recursive_directory_iterator();
         it.increment(ec)) {
        if (ec) throw Error(ErrorCode::TransportFailure, "list " + std::string(remote_dir) + ": " + ec.message());
        if (it->is_regular_file(ec)) {
            out.push_back({it->path().lexically_relative(base).generic_string(), it->file_size(ec)});
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
    return out;
}

std::shared_ptr<ChildProcess> DirectoryConnector::exec(const std::string& program,
                                                       const std::vector<std::string>& args,
                                                       std::string_view remote_cwd) {
    return ChildProcess::spawn(program, args, remote_path(remote_cwd));
}

SimRemoteConnector::SimRemoteConnector(fs::path root, SimRemoteOptions options, std::stop_token stop)
    : DirectoryConnector(std::string(kSimRemoteConnector), std::move(root)),
      options_(options),
      stop_(std::move(stop)),
      rng_(options.seed) {}

void SimRemoteConnector::transfer_gate(std::string_view what) {
    if (options_.latency_ms > 0) {
        std::mutex m;
        std::condition_variable_any cv;
        std::unique_lock lock(m);
        cv.wait_for(lock, stop_, std::chrono::milliseconds(options_.latency_ms), [] { return false; });
    }
    if (options_.failure_probability > 0.0) {
        double draw;
        {
            std::lock_guard lock(mutex_);
            draw = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
        }
        if (draw < options_.failure_probability) {
            throw Error(ErrorCode::TransportFailure, "injected transfer failure: " + std::string(what));
        }
    }
}

void SimRemoteConnector::upload(const fs::path& local, std::string_view remote) {
    transfer_gate(local.filename().string());
    DirectoryConnector::upload(local, remote);
}

void SimRemoteConnector::download(std::string_view remote, const fs::path& local) {
    transfer_gate(remote);
    DirectoryConnector::download(remote, local);
}

fs::path connector_root(const persistence::WorkspaceRef& ws, std::string_view connector_id) {
    if (connector_id == kSimRemoteConnector) return ws.root() / ".remote";
    return ws.root() / ("." + std::string(connector_id));
}

ConnectorFactory local_connector_factory() {
    return [](const persistence::WorkspaceRef& ws, const JobProfile&, std::stop_token) {
        return std::make_unique<DirectoryConnector>(std::string(kLocalConnector),
                                                    connector_root(ws, kLocalConnector));
    };
}

ConnectorFactory sim_remote_connector_factory() {
    return [](const persistence::WorkspaceRef& ws, const JobProfile& profile, std::stop_token stop) {
        return std::make_unique<SimRemoteConnector>(connector_root(ws, kSimRemoteConnector), profile.sim,
                                                    std::move(stop));
    };
}

}  // namespace forgeflow::exec
