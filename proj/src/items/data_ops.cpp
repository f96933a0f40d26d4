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

#include "forgeflow/items/data_ops.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "forgeflow/error.hpp"
#include "forgeflow/items/zip_writer.hpp"
#include "forgeflow/persistence/store.hpp"

namespace forgeflow::items {

namespace fs = std::filesystem;

DataOp parse_data_op(std::string_view s) {
    if (s == "copy") return DataOp::Copy;
    if (s == "move") return DataOp::Move;
    if (s == "archive") return DataOp::Archive;
    throw Error(ErrorCode::InvalidArgument, "unknown data operation '" + std::string(s) + "'");
}

std::string_view to_string(DataOp op) {
    switch (op) {
        case DataOp::Copy: return "copy";
        case DataOp::Move: return "move";
        case DataOp::Archive: return "archive";
    }
    return "?";
}

namespace {

std::vector<std::string> expand_sources(const std::vector<std::string>& sources,
                                        const persistence::WorkspaceRef& ws, bool allow_dirs) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& s : sources) {
        auto rel = persistence::normalize_relative(s);
        auto abs = ws.resolve(rel);
        std::error_code ec;
        if (fs::is_regular_file(abs, ec)) {
            if (seen.insert(rel).second) out.push_back(rel);
        } else if (allow_dirs && fs::is_directory(abs, ec) && rel != ".") {
            std::vector<std::string> inner;
            for (auto& f : fs::recursive_directory_iterator(abs, ec)) {
                if (f.is_regular_file(ec)) inner.push_back(ws.relative(f.path()));
            }
            std::sort(inner.begin(), inner.end());
            for (auto& f : inner) {
                if (seen.insert(f).second) out.push_back(std::move(f));
            }
        } else {
            throw Error(ErrorCode::MissingInput, "source not found: " + rel);
        }
    }
    return out;
}

}  // namespace

std::string manage_data(DataOp op, const std::vector<std::string>& sources, const std::string& dest,
                        const persistence::WorkspaceRef& ws) {
    if (dest.empty()) throw Error(ErrorCode::InvalidArgument, "no destination given");
    if (sources.empty()) throw Error(ErrorCode::InvalidArgument, "no sources given");
    auto dest_rel = persistence::normalize_relative(dest);
    auto dest_abs = ws.resolve(dest_rel);
    auto files = expand_sources(sources, ws, op == DataOp::Archive);
    std::error_code ec;

    if (op == DataOp::Archive) {
        if (fs::exists(dest_abs, ec)) throw Error(ErrorCode::DuplicateDest, dest_rel + " already exists");
        if (std::find(files.begin(), files.end(), dest_rel) != files.end()) {
            throw Error(ErrorCode::DuplicateDest, "archive cannot contain itself");
        }
        std::vector<ZipEntry> entries;
        for (const auto& f : files) entries.push_back({f, persistence::read_file(ws.resolve(f))});
        persistence::atomic_write(dest_abs, build_zip(entries));
        return dest_rel;
    }

    if (fs::exists(dest_abs, ec) && !fs::is_directory(dest_abs, ec)) {
        throw Error(ErrorCode::DuplicateDest, dest_rel + " exists and is not a directory");
    }
    std::set<std::string> names;
    for (const auto& f : files) {
        auto name = fs::path(f).filename().string();
        if (!names.insert(name).second) {
            throw Error(ErrorCode::DuplicateDest, "two sources would both become " + dest_rel + "/" + name);
        }
        if (fs::exists(dest_abs / name, ec)) {
            throw Error(ErrorCode::DuplicateDest, dest_rel + "/" + name + " already exists");
        }
    }
    fs::create_directories(dest_abs, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "mkdir " + dest_rel + ": " + ec.message());
    for (const auto& f : files) {
        auto from = ws.resolve(f);
        auto to = dest_abs / from.filename();
        if (op == DataOp::Copy) {
            fs::copy_file(from, to, fs::copy_options::none, ec);
        } else {
            fs::rename(from, to, ec);
            if (ec) {
                ec.clear();
                fs::copy_file(from, to, fs::copy_options::none, ec);
                if (!ec) fs::remove(from, ec);
            }
        }
        if (ec) throw Error(ErrorCode::IoFailure, std::string(to_string(op)) + " " + f + ": " + ec.message());
    }
    return dest_rel;
}

}  // namespace forgeflow::items
