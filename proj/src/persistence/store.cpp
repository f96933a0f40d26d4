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

#include "forgeflow/persistence/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "forgeflow/error.hpp"
#include "forgeflow/persistence/codec.hpp"
#include "forgeflow/util/text.hpp"

namespace forgeflow::persistence {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

[[noreturn]] void io_fail(const std::string& what) {
    throw Error(ErrorCode::IoFailure, what + ": " + std::strerror(errno));
}

void write_all(int fd, std::string_view bytes, const fs::path& path) {
    const char* p = bytes.data();
    std::size_t left = bytes.size();
    while (left > 0) {
        auto n = ::write(fd, p, left);
        if (n < 0) {
            if (errno == EINTR) continue;
            io_fail("write " + path.string());
        }
        p += n;
        left -= static_cast<std::size_t>(n);
    }
}

}  // namespace

void atomic_write(const fs::path& path, std::string_view bytes) {
    static std::atomic<unsigned> counter{0};
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::IoFailure, "mkdir " + path.parent_path().string() + ": " + ec.message());

    auto tmp = path.parent_path() /
               ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()) + "-" +
                std::to_string(counter++));
    int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) io_fail("open " + tmp.string());
    try {
        write_all(fd, bytes, tmp);
        if (::fsync(fd) != 0) io_fail("fsync " + tmp.string());
    } catch (...) {
        ::close(fd);
        ::unlink(tmp.c_str());
        throw;
    }
    ::close(fd);
    if (::rename(tmp.c_str(), path.c_str()) != 0) {
        int saved = errno;
        ::unlink(tmp.c_str());
        errno = saved;
        io_fail("rename " + tmp.string());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string save_item(const core::ItemRecord& item, const WorkspaceRef& ws) {
    auto bytes = serialize_item(item);
    auto rel = normalize_relative(item.project) + "/" + item_file_name(item);
    atomic_write(ws.resolve(rel), bytes);
    return rel;
}

std::vector<std::string> check_descriptor(const core::ItemDescriptor& d) {
    std::vector<std::string> problems;
    if (d.type_id.empty()) {
        problems.push_back("type_id is empty");
    } else if (!util::is_identifier(d.type_id)) {
        problems.push_back("type_id '" + d.type_id + "' is not an identifier");
    }
    std::set<std::string> groups;
    for (const auto& g : d.form_template.groups) {
        if (g.name.empty()) problems.push_back("group with empty name");
        if (!groups.insert(g.name).second) problems.push_back("duplicate group '" + g.name + "'");
        std::set<std::string> entries;
        for (const auto& e : g.entries) {
            if (e.name.empty()) problems.push_back("entry with empty name in group '" + g.name + "'");
            if (!entries.insert(e.name).second) {
                problems.push_back("duplicate entry '" + g.name + "." + e.name + "'");
            }
            if (e.kind == core::EntryKind::Choice && (!e.allowed || e.allowed->empty())) {
                problems.push_back("choice entry '" + g.name + "." + e.name + "' has no allowed values");
            }
        }
    }
    for (const auto& step : d.pipeline) {
        if (step.action.empty()) problems.push_back("pipeline step with empty action name");
    }
    return problems;
}

LoadedDescriptors load_descriptors(const WorkspaceRef& ws) {
    LoadedDescriptors out;
    std::error_code ec;
    auto dir = ws.items_dir();
    if (!fs::is_directory(dir, ec)) return out;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        auto name = entry.path().filename().string();
        if (entry.is_regular_file(ec) && ends_with(name, ".descriptor.json") && name.front() != '.') {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::set<std::string> seen;
    for (const auto& file : files) {
        auto rel = ws.relative(file);
        try {
            auto d = deserialize_descriptor(read_file(file));
            auto problems = check_descriptor(d);
            if (!problems.empty()) {
                std::string msg = "invalid descriptor:";
                for (const auto& p : problems) msg += " " + p + ";";
                out.diagnostics.push_back({rel, msg});
                continue;
            }
            if (!seen.insert(d.type_id).second) {
                out.diagnostics.push_back({rel, "duplicate type_id '" + d.type_id + "'"});
                continue;
            }
            out.descriptors.push_back(std::move(d));
        } catch (const Error& e) {
            out.diagnostics.push_back({rel, e.what()});
        }
    }
    std::sort(out.descriptors.begin(), out.descriptors.end(),
              [](const auto& a, const auto& b) { return a.type_id < b.type_id; });
    return out;
}

LoadedWorkspace load_workspace(const WorkspaceRef& ws) {
    LoadedWorkspace out;
    std::error_code ec;
    fs::recursive_directory_iterator it(ws.root(), ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot list workspace: " + ec.message());

    std::vector<fs::path> files;
    for (auto end = fs::recursive_directory_iterator(); it != end; it.increment(ec)) {
        if (ec) {
            out.diagnostics.push_back({"", "scan error: " + ec.message()});
            ec.clear();
            break;
        }
        auto name = it->path().filename().string();
        if (it->is_directory(ec)) {
            if (!name.empty() && name.front() == '.') it.disable_recursion_pending();
            continue;
        }
        if (name.front() != '.' && ends_with(name, ".item.json") && it->is_regular_file(ec)) {
            files.push_back(it->path());
        }
    }
    std::sort(files.begin(), files.end());

    std::set<std::string> ids;
    for (const auto& file : files) {
        auto rel = ws.relative(file);
        try {
            auto item = deserialize_item(read_file(file));
            auto parent = ws.relative(file.parent_path());
            if (file.filename().string() != item_file_name(item)) {
                out.diagnostics.push_back({rel, "file name does not match id/type_id " +
                                                    item_file_name(item)});
                continue;
            }
            if (parent != item.project) {
                out.diagnostics.push_back(
                    {rel, "file is outside its recorded project '" + item.project + "'"});
                continue;
            }
            if (!ids.insert(item.id).second) {
                out.diagnostics.push_back({rel, "duplicate item id " + item.id});
                continue;
            }
            out.items.push_back(std::move(item));
        } catch (const Error& e) {
            out.diagnostics.push_back({rel, e.what()});
        }
    }
    std::sort(out.items.begin(), out.items.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });

    auto descriptors = load_descriptors(ws);
    out.descriptors = std::move(descriptors.descriptors);
    for (auto& d : descriptors.diagnostics) out.diagnostics.push_back(std::move(d));
    return out;
}

}  // namespace forgeflow::persistence
