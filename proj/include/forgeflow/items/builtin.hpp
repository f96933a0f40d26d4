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

#include <memory>
#include <vector>

#include "forgeflow/core/engine.hpp"
#include "forgeflow/core/types.hpp"

namespace forgeflow::items {

// Registered action names.
inline constexpr const char* kWriteInputSetAction = "write_input_set";
inline constexpr const char* kLaunchAction = "launch";
inline constexpr const char* kReduceColumnsAction = "reduce_columns";
inline constexpr const char* kManageDataAction = "manage_data";

/// input_generation, job_launch, data_reduction, data_management, full_study.
std::vector<core::ItemDescriptor> builtin_descriptors();

void register_builtin_actions(core::Engine& engine);
void register_builtins(core::Engine& engine);

/// Engine with the builtins registered and the workspace loaded, in that
/// order, so descriptor files in the workspace override builtins.
std::unique_ptr<core::Engine> open_engine(const core::EngineOptions& options,
                                          std::vector<persistence::Diagnostic>* diagnostics = nullptr);

}  // namespace forgeflow::items
