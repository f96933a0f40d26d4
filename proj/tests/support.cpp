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

#include "support.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "forgeflow/cli/cli.hpp"
#include "forgeflow/items/builtin.hpp"

namespace testing {

using namespace forgeflow;

TempDir::TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "forgeflow-test-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = fs::canonical(tmpl);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

void write_file(const fs::path& path, const std::string& bytes) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << bytes;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path fixture(const std::string& name) { return fs::path(FORGEFLOW_FIXTURES) / name; }

std::map<std::string, std::uintmax_t> walk_sizes(const fs::path& dir) {
    std::map<std::string, std::uintmax_t> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).generic_string()] = e.file_size();
    }
    return out;
}

std::map<std::string, std::string> python_unzip(const fs::path& archive, const fs::path& scratch) {
    fs::create_directories(scratch);
    std::string cmd = "python3 -c 'import sys,zipfile; zipfile.ZipFile(sys.argv[1]).extractall(sys.argv[2])' '" +
                      archive.string() + "' '" + scratch.string() + "'";
    if (std::system(cmd.c_str()) != 0) return {};
    std::map<std::string, std::string> out;
    for (const auto& [rel, size] : walk_sizes(scratch)) {
        (void)size;
        out[rel] = slurp(scratch / rel);
    }
    return out;
}

core::ActionSpec fn_action(std::string name, FnRun::Body body, std::function<void()> on_kill) {
    return {name, "test action " + name, [body, on_kill] { return std::make_unique<FnRun>(body, on_kill); }};
}

core::ItemDescriptor simple_descriptor(const std::string& type_id, const std::vector<std::string>& pipeline,
                                       const std::string& action) {
    core::ItemDescriptor d;
    d.type_id = type_id;
    d.display_name = type_id;
    d.form_template.description = "test type";
    d.form_template.groups = {
        {"params",
         {core::Entry{"value", core::EntryKind::Text, "x", std::nullopt, true, "a value"},
          core::Entry{"count", core::EntryKind::Integer, "1", std::nullopt, false, "a number"}}}};
    d.form_template.actions = {action};
    for (const auto& a : pipeline) d.pipeline.push_back({a, {{"value", "params.value"}}});
    return d;
}

std::unique_ptr<core::Engine> builtin_engine(const fs::path& ws, std::optional<std::uint64_t> seed) {
    return items::open_engine({ws, seed});
}

core::ItemRecord without_times(core::ItemRecord item) {
    item.created_at.clear();
    item.updated_at.clear();
    for (auto& h : item.history) h.at.clear();
    return item;
}

CliRun cli(const fs::path& ws, std::vector<std::string> args) {
    args.insert(args.begin(), {"--workspace", ws.string()});
    std::ostringstream out, err;
    int code = cli::run_command(args, out, err);
    return {code, out.str(), err.str()};
}

void write_toy_study(const fs::path& ws, const std::string& project) {
    write_file(ws / project / "deck.tmpl",
               "tolerance,max_iterations,rows\n${solver.tolerance},${solver.max_iterations},${analysis.rows}\n");
    // Rows follow a fixed recurrence so the values are irregular but exact in
    // decimal text.
    write_file(ws / project / "solver.sh",
               "#!/bin/sh\n"
               "n=$(tail -n 1 input.csv | cut -d, -f3)\n"
               "echo 'step,residual,energy' > output.csv\n"
               "i=1; r=7\n"
               "while [ $i -le $n ]; do\n"
               "  r=$(( (r * 1103515245 + 12345) % 2147483648 ))\n"
               "  echo \"$i,0.$r,-$((r % 9973)).$((i % 97))\" >> output.csv\n"
               "  i=$((i+1))\n"
               "done\n"
               "echo solved $n\n");
    fs::permissions(ws / project / "solver.sh", fs::perms::owner_all, fs::perm_options::add);
}

std::string prepare_full_study(core::Engine& engine, const std::string& project, const std::string& rows) {
    auto item = engine.create_item("full_study", project);
    auto form = item.form;
    form.find("template.file")->value = project + "/deck.tmpl";
    form.find("job.executable")->value = project + "/solver.sh";
    auto& analysis = *std::find_if(form.groups.begin(), form.groups.end(), [](auto& g) { return g.name == "analysis"; });
    analysis.entries.push_back(core::Entry{"rows", core::EntryKind::Integer, rows, std::nullopt, true, "rows"});
    auto status = engine.review_form(item.id, form);
    if (!status.accepted()) throw std::runtime_error("full study form rejected: " + status.messages.front());
    return item.id;
}

std::string random_text(std::mt19937_64& rng, std::size_t max_len) {
    static const std::vector<std::string> pieces = {"a", "b", "Z", "0", "9", " ", "_", "-", ".", "\"", "\\", "/",
                                                    "\n", "\t", "\x01", "\x1f", "\xc3\xa9", "\xe6\xbc\xa2",
                                                    "\xf0\x9f\x99\x82", "${", "}", "{}", "[", ","};
    std::string out;
    auto n = rng() % (max_len + 1);
    for (std::size_t i = 0; i < n; ++i) out += pieces[rng() % pieces.size()];
    return out;
}

core::ItemRecord random_item(std::mt19937_64& rng, int index) {
    static const std::vector<std::string> projects = {"alpha", "beta/one", "beta/two", "gamma/x/y", "delta"};
    auto ident = [&](const std::string& prefix) {
        std::string s = prefix;
        for (auto n = 1 + rng() % 8; n; --n) s += "abcdefghijklmnopqrstuvwxyz_0123456789"[rng() % 37];
        return s;
    };
    core::ItemRecord r;
    char id[32];
    std::snprintf(id, sizeof id, "i%04d%08llx", index, static_cast<unsigned long long>(rng() & 0xffffffffu));
    r.id = id;
    r.type_id = ident("t");
    r.name = random_text(rng, 6);
    r.state = core::kAllStates[rng() % 5];
    r.project = projects[rng() % projects.size()];
    r.created_at = "2026-01-0" + std::to_string(1 + rng() % 9) + "T10:00:00Z";
    r.updated_at = "2026-02-0" + std::to_string(1 + rng() % 9) + "T11:30:00Z";
    r.status_message = random_text(rng, 4);
    r.last_job_id = rng() % 2 ? "j" + std::to_string(rng() % 100000) : "";
    r.form.item_id = r.id;
    r.form.description = random_text(rng, 10);
    for (auto g = rng() % 4; g; --g) {
        core::EntryGroup group{ident("g") + std::to_string(g), {}};
        for (auto e = rng() % 5; e; --e) {
            core::Entry entry;
            entry.name = ident("e") + std::to_string(e);
            entry.kind = static_cast<core::EntryKind>(rng() % 7);
            entry.value = random_text(rng, 5);
            entry.required = rng() % 2;
            entry.description = random_text(rng, 8);
            if (entry.kind == core::EntryKind::Choice || rng() % 5 == 0) {
                std::vector<std::string> allowed;
                for (auto k = rng() % 4; k; --k) allowed.push_back(random_text(rng, 3));
                entry.allowed = allowed;
            }
            group.entries.push_back(std::move(entry));
        }
        r.form.groups.push_back(std::move(group));
    }
    for (auto a = rng() % 3; a; --a) r.form.actions.push_back(random_text(rng, 4));
    for (auto h = rng() % 6; h; --h) {
        r.history.push_back({core::kAllStates[rng() % 5], core::kAllEvents[rng() % 7], core::kAllStates[rng() % 5],
                             "2026-03-01T00:00:0" + std::to_string(h) + "Z"});
    }
    return r;
}

std::string python_canonical(const fs::path& path) {
    auto out_path = path.string() + ".py";
    std::string cmd =
        "python3 -c 'import json,sys; d=json.load(open(sys.argv[1],encoding=\"utf-8\")); "
        "open(sys.argv[2],\"w\",encoding=\"utf-8\",newline=\"\\n\").write("
        "json.dumps(d,indent=2,sort_keys=True,ensure_ascii=False)+\"\\n\")' '" +
        path.string() + "' '" + out_path + "'";
    if (std::system(cmd.c_str()) != 0) return {};
    auto s = slurp(out_path);
    fs::remove(out_path);
    return s;
}

std::vector<std::string> payloads(const std::vector<exec::JobEvent>& events) {
    std::vector<std::string> out;
    for (const auto& e : events) out.push_back(std::string(exec::to_string(e.kind)) + "|" + e.payload);
    return out;
}

}  // namespace testing
