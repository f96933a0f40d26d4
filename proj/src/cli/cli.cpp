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

#include "forgeflow/cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "forgeflow/error.hpp"
#include "forgeflow/items/builtin.hpp"
#include "forgeflow/persistence/codec.hpp"
#include "forgeflow/persistence/store.hpp"
#include "forgeflow/server/server.hpp"
#include "forgeflow/util/text.hpp"

namespace forgeflow::cli {

using persistence::json;

namespace {

constexpr auto kWatchPoll = std::chrono::milliseconds(50);

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string workspace;
    bool json = false;
    bool watch = false;
    std::string type_id;
    std::string project;
    std::string item_id;
    std::string requested_id;
    std::string name;
    std::string action;
    std::string file;
    std::vector<std::string> assignments;
    std::string bind = "127.0.0.1";
    int port = server::kDefaultPort;
    std::string token;
};

std::string workspace_root(const Options& opts) {
    if (!opts.workspace.empty()) return opts.workspace;
    if (const char* env = std::getenv(kWorkspaceEnv); env && *env) return env;
    throw UsageError(std::string("no workspace: pass --workspace or set ") + kWorkspaceEnv);
}

std::unique_ptr<core::Engine> open(const Options& opts, std::ostream& err) {
    std::vector<persistence::Diagnostic> diags;
    auto engine = items::open_engine({workspace_root(opts), std::nullopt}, &diags);
    for (const auto& d : diags) err << "warning: " << d.path << ": " << d.message << "\n";
    return engine;
}

void print_item(const core::ItemRecord& item, std::ostream& out) {
    out << "id: " << item.id << "\n";
    out << "type: " << item.type_id << "\n";
    out << "name: " << item.name << "\n";
    out << "project: " << item.project << "\n";
    out << "state: " << core::to_string(item.state) << "\n";
    if (!item.status_message.empty()) out << "message: " << item.status_message << "\n";
    if (!item.last_job_id.empty()) out << "job: " << item.last_job_id << "\n";
    out << "actions:";
    for (std::size_t i = 0; i < item.form.actions.size(); ++i) {
        out << (i ? ", " : " ") << item.form.actions[i];
    }
    out << "\n";
    for (const auto& g : item.form.groups) {
        for (const auto& e : g.entries) out << g.name << "." << e.name << " = " << e.value << "\n";
    }
}

void print_event(const exec::JobEvent& ev, bool as_json, std::ostream& out) {
    if (as_json) {
        out << exec::event_line(ev) << "\n";
    } else {
        out << "[" << ev.seq << "] " << exec::to_string(ev.kind) << ": " << ev.payload << "\n";
    }
    out.flush();
}

int finish_process(const core::ItemRecord& item, std::ostream& out, std::ostream& err) {
    out << "state: " << core::to_string(item.state) << "\n";
    if (!item.last_job_id.empty()) out << "job: " << item.last_job_id << "\n";
    if (item.state == core::ItemState::Processed) return kExitOk;
    err << "error: " << (item.status_message.empty() ? "run did not complete" : item.status_message) << "\n";
    return kExitEngine;
}

int cmd_process(core::Engine& engine, const Options& opts, std::ostream& out, std::ostream& err) {
    auto seen = engine.get_item(opts.item_id).last_job_id;
    engine.process_item(opts.item_id, opts.action);
    bool cancel_sent = false;
    auto cancel_once = [&] {
        if (cancel_sent || !interrupt_flag()) return;
        cancel_sent = true;
        try {
            engine.cancel_item(opts.item_id);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::WrongState) throw;
        }
    };
    for (;;) {
        auto done = engine.wait_item_for(opts.item_id, kWatchPoll);
        auto item = done ? *done : engine.get_item(opts.item_id);
        if (opts.watch && !item.last_job_id.empty() && item.last_job_id != seen) {
            seen = item.last_job_id;
            auto stream = engine.jobs().stream_events(seen, 0);
            while (!stream.done()) {
                if (auto ev = stream.next(kWatchPoll)) print_event(*ev, opts.json, out);
                cancel_once();
            }
            continue;
        }
        if (done) return finish_process(*done, out, err);
        cancel_once();
    }
}

int cmd_status(core::Engine& engine, const Options& opts, std::ostream& out) {
    auto doc = server::status_document(engine, opts.item_id);
    if (opts.json) {
        out << persistence::canonical_dump(doc);
        return kExitOk;
    }
    out << "state: " << doc["state"].get<std::string>() << "\n";
    if (!doc["status_message"].get<std::string>().empty()) {
        out << "message: " << doc["status_message"].get<std::string>() << "\n";
    }
    const auto& job = doc["job"];
    if (job.is_null()) {
        out << "job: none\n";
    } else {
        out << "job: " << job["job_id"].get<std::string>() << " "
            << (job["status"].is_string() ? job["status"].get<std::string>() : "unknown");
        if (job.contains("exit_code") && job["exit_code"].is_number()) out << " (exit " << job["exit_code"] << ")";
        out << "\n";
    }
    return kExitOk;
}

int cmd_set(core::Engine& engine, const Options& opts, std::ostream& out) {
    auto form = engine.get_item(opts.item_id).form;
    for (const auto& a : opts.assignments) {
        auto eq = a.find('=');
        if (eq == std::string::npos) throw UsageError("expected group.entry=value, got '" + a + "'");
        auto path = a.substr(0, eq);
        auto* entry = form.find(path);
        if (!entry) throw Error(ErrorCode::InvalidArgument, "no entry '" + path + "' in the form of " + opts.item_id);
        entry->value = a.substr(eq + 1);
    }
    auto item = engine.edit_form(opts.item_id, form);
    out << "state: " << core::to_string(item.state) << "\n";
    return kExitOk;
}

int cmd_submit(core::Engine& engine, const Options& opts, std::ostream& out) {
    auto status = engine.review_form(opts.item_id, engine.get_item(opts.item_id).form);
    if (opts.json) {
        out << persistence::canonical_dump(persistence::to_json(status));
    } else {
        out << (status.accepted() ? "Accepted" : "Rejected") << "\n";
        for (const auto& m : status.messages) out << "  " << m << "\n";
    }
    return status.accepted() ? kExitOk : kExitUser;
}

int cmd_serve(const Options& opts, std::ostream& out) {
    server::ApiConfig cfg;
    cfg.bind_address = opts.bind;
    cfg.port = opts.port;
    cfg.workspace_root = workspace_root(opts);
    if (!opts.token.empty()) {
        cfg.auth_token = opts.token;
    } else if (const char* env = std::getenv(kTokenEnv); env && *env) {
        cfg.auth_token = env;
    }
    server::Server srv(cfg);
    auto port = srv.start();
    out << "listening on http://" << cfg.bind_address << ":" << port << std::endl;
    while (!interrupt_flag()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    srv.stop();
    return kExitOk;
}

int cmd_script(const Options& opts, std::ostream& out, std::ostream& err) {
    std::ifstream in(opts.file);
    if (!in) {
        err << "error: cannot read script '" << opts.file << "'\n";
        return kExitUser;
    }
    std::string line;
    for (int number = 1; std::getline(in, line); ++number) {
        auto text = util::trim(line);
        if (text.empty() || text.front() == '#') continue;
        int code;
        try {
            auto tokens = util::split_command_line(text);
            if (!opts.workspace.empty() &&
                std::find(tokens.begin(), tokens.end(), "--workspace") == tokens.end()) {
                tokens.insert(tokens.begin(), {"--workspace", opts.workspace});
            }
            code = run_command(tokens, out, err);
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
            code = kExitUser;
        }
        if (code != kExitOk) {
            err << "script failed at line " << number << "\n";
            return code;
        }
    }
    return kExitOk;
}

}  // namespace

std::atomic<bool>& interrupt_flag() {
    static std::atomic<bool> flag{false};
    return flag;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::IoFailure:
        case ErrorCode::SerializationFailure:
        case ErrorCode::SchemaMismatch:
        case ErrorCode::TransportFailure:
        case ErrorCode::SpawnFailure:
        case ErrorCode::BindFailure:
            return kExitEngine;
        default:
            return kExitUser;
    }
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options opts;
    CLI::App app{"Item-based workflow engine", "forgeflow"};
    app.add_option("--workspace,-w", opts.workspace, std::string("Workspace directory (default: $") + kWorkspaceEnv + ")");
    app.require_subcommand(1);

    auto* types = app.add_subcommand("types", "List item types");
    types->add_flag("--json", opts.json);

    auto* create = app.add_subcommand("create", "Create an item");
    create->add_option("type", opts.type_id, "Item type id")->required();
    create->add_option("--project,-p", opts.project, "Project directory inside the workspace")->required();
    create->add_option("--id", opts.requested_id, "Item id to use instead of a generated one");
    create->add_option("--name", opts.name, "Display name");
    create->add_flag("--json", opts.json);

    auto* show = app.add_subcommand("show", "Show an item and its form");
    show->add_option("id", opts.item_id)->required();
    show->add_flag("--json", opts.json);

    auto* set = app.add_subcommand("set", "Edit form entries");
    set->add_option("id", opts.item_id)->required();
    set->add_option("assignments", opts.assignments, "group.entry=value")->required();

    auto* submit = app.add_subcommand("submit", "Review the item's form");
    submit->add_option("id", opts.item_id)->required();
    submit->add_flag("--json", opts.json);

    auto* process = app.add_subcommand("process", "Run an action and wait for it to finish");
    process->add_option("id", opts.item_id)->required();
    process->add_option("--action,-a", opts.action, "Action name offered by the form")->required();
    process->add_flag("--watch", opts.watch, "Print job events as they happen");
    process->add_flag("--json", opts.json, "Print events as JSON lines");

    auto* status = app.add_subcommand("status", "Item state and latest job");
    status->add_option("id", opts.item_id)->required();
    status->add_flag("--json", opts.json);

    auto* cancel = app.add_subcommand("cancel", "Cancel a run of this engine");
    cancel->add_option("id", opts.item_id)->required();

    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    serve->add_option("--bind", opts.bind, "Bind address");
    serve->add_option("--port", opts.port, "Port, 0 for any free port");
    serve->add_option("--token", opts.token, std::string("Bearer token (default: $") + kTokenEnv + ")");

    auto* scaffold = app.add_subcommand("scaffold", "Write a descriptor stub for a new item type");
    scaffold->add_option("name", opts.name, "Item type id")->required();

    auto* script = app.add_subcommand("script", "Run CLI commands from a file, one per line");
    script->add_option("file", opts.file)->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUser;
    }

    try {
        if (script->parsed()) return cmd_script(opts, out, err);
        if (serve->parsed()) return cmd_serve(opts, out);

        auto engine = open(opts, err);
        if (types->parsed()) {
            auto list = engine->list_item_types();
            if (opts.json) {
                json doc = json::array();
                for (const auto& t : list) doc.push_back({{"type_id", t.type_id}, {"display_name", t.display_name}});
                out << persistence::canonical_dump(doc);
            } else {
                for (const auto& t : list) out << t.type_id << "\t" << t.display_name << "\n";
            }
            return kExitOk;
        }
        if (create->parsed()) {
            core::CreateOptions options;
            if (!opts.requested_id.empty()) options.id = opts.requested_id;
            if (!opts.name.empty()) options.name = opts.name;
            auto item = engine->create_item(opts.type_id, opts.project, options);
            if (opts.json) {
                out << persistence::canonical_dump(persistence::to_json(item));
            } else {
                out << item.id << "\n";
            }
            return kExitOk;
        }
        if (show->parsed()) {
            auto item = engine->get_item(opts.item_id);
            if (opts.json) {
                out << persistence::canonical_dump(persistence::to_json(item));
            } else {
                print_item(item, out);
            }
            return kExitOk;
        }
        if (set->parsed()) return cmd_set(*engine, opts, out);
        if (submit->parsed()) return cmd_submit(*engine, opts, out);
        if (process->parsed()) return cmd_process(*engine, opts, out, err);
        if (status->parsed()) return cmd_status(*engine, opts, out);
        if (cancel->parsed()) {
            out << "state: " << core::to_string(engine->cancel_item(opts.item_id)) << "\n";
            return kExitOk;
        }
        if (scaffold->parsed()) {
            out << scaffold_item(*engine, opts.name) << "\n";
            return kExitOk;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUser;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitEngine;
    }
    return kExitUser;
}

}  // namespace forgeflow::cli
