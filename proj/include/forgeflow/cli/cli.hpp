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
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "forgeflow/core/engine.hpp"
#include "forgeflow/error.hpp"

namespace forgeflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUser = 1;
inline constexpr int kExitEngine = 2;

inline constexpr const char* kWorkspaceEnv = "FORGEFLOW_WORKSPACE";
inline constexpr const char* kTokenEnv = "FORGEFLOW_TOKEN";

/// Runs one command line (without the program name) against an engine
/// embedded in this process. Returns 0, 1 for user errors, 2 for engine
/// errors and failed runs.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Set from a signal handler; a running `process` cancels its item and
/// `serve` shuts down.
std::atomic<bool>& interrupt_flag();

/// Exit code for an engine error.
int exit_code_for(ErrorCode code);

/// Descriptor stub for a new item type.
core::ItemDescriptor scaffold_descriptor(const std::string& name);

/// Writes ".items/<name>.descriptor.json" and registers it with the engine.
/// Returns the workspace-relative path. Error(InvalidName), Error(AlreadyExists).
std::string scaffold_item(core::Engine& engine, const std::string& name);

}  // namespace forgeflow::cli
