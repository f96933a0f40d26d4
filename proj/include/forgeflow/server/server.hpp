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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "forgeflow/core/engine.hpp"
#include "forgeflow/error.hpp"
#include "forgeflow/persistence/codec.hpp"

namespace httplib {
class Server;
}

namespace forgeflow::server {

inline constexpr int kDefaultPort = 8700;

struct ApiConfig {
    std::string bind_address = "127.0.0.1";
    int port = kDefaultPort;  // 0 picks a free port
    std::filesystem::path workspace_root;
    std::optional<std::string> auth_token;
    std::optional<std::uint64_t> id_seed;
};

/// HTTP facade over one engine. Handlers only translate between HTTP and
/// engine calls.
class Server {
public:
    /// Opens an engine on cfg.workspace_root. Error(WorkspaceFailure).
    explicit Server(ApiConfig cfg);
    /// Serves an engine owned by the caller.
    Server(ApiConfig cfg, core::Engine& engine);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and starts accepting on a background thread; returns the bound
    /// port. Error(BindFailure).
    int start();
    /// start() then block until stop() is called from elsewhere.
    void run();
    void stop();

    int port() const { return port_; }
    core::Engine& engine() { return *engine_; }

private:
    void install_routes();

    ApiConfig cfg_;
    std::unique_ptr<core::Engine> owned_;
    core::Engine* engine_;
    std::unique_ptr<httplib::Server> http_;
    std::thread listener_;
    std::atomic<bool> stopping_{false};
    int port_ = -1;
};

/// {item_id, state, status_message, job}; job is the item's latest JobHandle
/// or null. Error(UnknownItem).
persistence::json status_document(core::Engine& engine, const std::string& item_id);

/// HTTP status for an engine error code.
int http_status(ErrorCode code);

}  // namespace forgeflow::server
