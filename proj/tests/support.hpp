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
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "forgeflow/core/engine.hpp"
#include "forgeflow/core/registry.hpp"
#include "forgeflow/exec/job.hpp"

namespace testing {

namespace fs = std::filesystem;

class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    fs::path path_;
};

void write_file(const fs::path& path, const std::string& bytes);
std::string slurp(const fs::path& path);
fs::path fixture(const std::string& name);

/// Regular files under dir (relative path -> size), found by walking it.
std::map<std::string, std::uintmax_t> walk_sizes(const fs::path& dir);

/// Extracts a ZIP archive with Python's zipfile module (relative path -> bytes).
/// Empty on any failure.
std::map<std::string, std::string> python_unzip(const fs::path& archive, const fs::path& scratch);

// Action run driven by callbacks.
class FnRun : public forgeflow::core::ActionRun {
public:
    using Body = std::function<forgeflow::core::ActionResult(forgeflow::core::ActionContext&)>;
    FnRun(Body body, std::function<void()> on_kill) : body_(std::move(body)), on_kill_(std::move(on_kill)) {}
    forgeflow::core::ActionResult run(forgeflow::core::ActionContext& ctx) override { return body_(ctx); }
    void kill() override {
        if (on_kill_) on_kill_();
    }

private:
    Body body_;
    std::function<void()> on_kill_;
};

forgeflow::core::ActionSpec fn_action(std::string name, FnRun::Body body, std::function<void()> on_kill = {});

/// One-group descriptor whose pipeline runs the given action names in order.
forgeflow::core::ItemDescriptor simple_descriptor(const std::string& type_id,
                                                  const std::vector<std::string>& pipeline,
                                                  const std::string& action = "Run");

std::unique_ptr<forgeflow::core::Engine> builtin_engine(const fs::path& ws,
                                                        std::optional<std::uint64_t> seed = std::nullopt);

/// Record with wall-clock fields blanked so two runs can be compared.
forgeflow::core::ItemRecord without_times(forgeflow::core::ItemRecord item);

struct CliRun {
    int code;
    std::string out;
    std::string err;
};
CliRun cli(const fs::path& ws, std::vector<std::string> args);

/// Writes "<project>/deck.tmpl" and an executable "<project>/solver.sh" that
/// reads input.csv and writes rows of output.csv.
void write_toy_study(const fs::path& ws, const std::string& project);

/// Creates, configures and reviews a Full Study item over the toy solver.
std::string prepare_full_study(forgeflow::core::Engine& engine, const std::string& project,
                               const std::string& rows);

/// Random but valid record; ids are unique per index.
forgeflow::core::ItemRecord random_item(std::mt19937_64& rng, int index);
std::string random_text(std::mt19937_64& rng, std::size_t max_len);

/// The document at path re-encoded by Python's json module with sorted keys,
/// two-space indent and a trailing newline. Empty on failure.
std::string python_canonical(const fs::path& path);

std::vector<std::string> payloads(const std::vector<forgeflow::exec::JobEvent>& events);

}  // namespace testing
