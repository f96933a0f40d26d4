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

#include "forgeflow/items/builtin.hpp"

#include <charconv>
#include <mutex>
#include <sstream>

#include "forgeflow/error.hpp"
#include "forgeflow/items/data_ops.hpp"
#include "forgeflow/items/reduction.hpp"
#include "forgeflow/items/template.hpp"
#include "forgeflow/util/text.hpp"

namespace forgeflow::items {

using core::ActionContext;
using core::ActionResult;
using core::Entry;
using core::EntryGroup;
using core::EntryKind;

namespace {

Entry entry(std::string name, EntryKind kind, std::string value, bool required, std::string description,
            std::optional<std::vector<std::string>> allowed = std::nullopt) {
    return Entry{std::move(name), kind, std::move(value), std::move(allowed), required, std::move(description)};
}

std::string join_lines(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += s + "\n";
    return out;
}

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

template <typename T>
T parse_number(const std::string& text, T fallback, const char* what) {
    if (text.empty()) return fallback;
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::InvalidArgument, std::string(what) + " '" + text + "' is not a valid number");
    }
    return value;
}

EntryGroup job_group() {
    return {"job",
            {entry("executable", EntryKind::Executable, "echo", true,
                   "Program to run: a command name or a workspace-relative path"),
             entry("args", EntryKind::Text, "hello", false, "Arguments, split like a shell command line"),
             entry("connector", EntryKind::Choice, "local", true, "Where the job runs",
                   std::vector<std::string>{"local", "sim-remote"}),
             entry("retrieve_threshold", EntryKind::Integer, std::to_string(exec::kDefaultRetrieveThreshold),
                   true, "Outputs are copied back only when their total size is at most this many bytes")}};
}

std::map<std::string, std::string> job_bindings() {
    return {{"executable", "job.executable"},
            {"args", "job.args"},
            {"connector", "job.connector"},
            {"retrieve_threshold", "job.retrieve_threshold"}};
}

EntryGroup template_group(std::string output, std::string manifest) {
    return {"template",
            {entry("file", EntryKind::File, "", true, "Workspace-relative template with ${group.entry} tokens"),
             entry("output", EntryKind::Text, std::move(output), true,
                   "Rendered input file name, relative to the project"),
             entry("manifest", EntryKind::Text, std::move(manifest), true,
                   "Manifest file name, relative to the project")}};
}

std::map<std::string, std::string> template_bindings() {
    return {{"template_file", "template.file"}, {"output_name", "template.output"}, {"manifest_name", "template.manifest"}};
}

EntryGroup solver_group() {
    return {"solver",
            {entry("tolerance", EntryKind::Real, "1e-6", true, "Convergence tolerance"),
             entry("max_iterations", EntryKind::Integer, "100", true, "Iteration limit"),
             entry("method", EntryKind::Choice, "cg", true, "Linear solver",
                   std::vector<std::string>{"cg", "gmres", "direct"})}};
}

class WriteInputSetRun : public core::ActionRun {
public:
    ActionResult run(ActionContext& ctx) override {
        TemplateSpec spec{ctx.param("template_file"), ctx.param("output_name"), ctx.param("manifest_name")};
        auto set = write_input_set(spec, ctx.item.form, ctx.item.project, ctx.workspace);
        ctx.outputs["input.main"] = set.main;
        ctx.outputs["input.manifest"] = set.manifest;
        ctx.outputs["input.files"] = join_lines(set.files);
        for (const auto& f : set.files) ctx.add_artifact(f);
        ctx.add_artifact(set.manifest);
        return ActionResult::success(set.manifest);
    }
};

class LaunchRun : public core::ActionRun {
public:
    ActionResult run(ActionContext& ctx) override {
        exec::JobProfile profile;
        auto command = util::split_command_line(ctx.param("executable"));
        if (command.empty()) return ActionResult::failure("no executable given");
        profile.executable = command.front();
        profile.args.assign(command.begin() + 1, command.end());
        for (auto& a : util::split_command_line(ctx.param("args"))) profile.args.push_back(std::move(a));
        profile.input_files = util::split_list(ctx.param("inputs"));
        for (auto& f : split_lines(ctx.outputs["input.files"])) profile.input_files.push_back(std::move(f));
        profile.connector_id = ctx.param("connector", std::string(exec::kLocalConnector));
        profile.working_project = ctx.item.project;
        profile.retrieve_threshold_bytes =
            parse_number<std::uint64_t>(ctx.param("retrieve_threshold"), exec::kDefaultRetrieveThreshold,
                                        "retrieve_threshold");
        profile.sim.latency_ms = parse_number<std::uint32_t>(ctx.param("sim_latency_ms"), 0, "sim_latency_ms");
        profile.sim.seed = parse_number<std::uint64_t>(ctx.param("sim_seed"), 0, "sim_seed");
        if (auto p = ctx.param("sim_failure_probability"); !p.empty()) {
            profile.sim.failure_probability = std::stod(p);
        }
        for (const auto& g : ctx.item.form.groups) {
            for (const auto& e : g.entries) {
                if (e.kind == EntryKind::File && !e.value.empty()) profile.auto_stage_candidates.push_back(e.value);
            }
        }

        if (ctx.stop.stop_requested()) return ActionResult::failure("cancelled before launch");
        auto handle = ctx.jobs.launch(profile);
        ctx.report_job(handle.job_id);
        bool killed;
        {
            std::lock_guard lock(mutex_);
            job_id_ = handle.job_id;
            killed = killed_;
        }
        if (killed) ctx.jobs.kill(handle.job_id);
        auto final_handle = ctx.jobs.wait(handle.job_id);

        ctx.outputs["job.id"] = final_handle.job_id;
        ctx.outputs["job.dir"] = final_handle.job_dir;
        for (const auto& staged : ctx.jobs.manifest(handle.job_id)) ctx.add_artifact(staged.source);
        for (const auto& out : ctx.jobs.retrieval(handle.job_id).retrieved) {
            ctx.add_artifact(final_handle.job_dir + "/" + out.path);
        }
        ctx.add_artifact(final_handle.job_dir + "/stdout.txt");
        ctx.add_artifact(final_handle.job_dir + "/stderr.txt");

        if (final_handle.status == exec::JobStatus::Finished) return ActionResult::success(final_handle.job_id);
        std::string message = "job " + final_handle.job_id + " " + std::string(exec::to_string(final_handle.status));
        if (!final_handle.message.empty()) message += ": " + final_handle.message;
        return ActionResult::failure(message);
    }

    void kill() override {
        std::string job_id;
        {
            std::lock_guard lock(mutex_);
            killed_ = true;
            job_id = job_id_;
        }
        if (!job_id.empty() && jobs_) jobs_->kill(job_id);
    }

    void bind(exec::JobManager* jobs) { jobs_ = jobs; }

private:
    std::mutex mutex_;
    std::string job_id_;
    bool killed_ = false;
    exec::JobManager* jobs_ = nullptr;
};

class ReduceColumnsRun : public core::ActionRun {
public:
    ActionResult run(ActionContext& ctx) override {
        auto csv = ctx.param("csv_file");
        if (csv.empty()) {
            auto name = ctx.param("output_name");
            auto dir = ctx.outputs.find("job.dir");
            if (name.empty() || dir == ctx.outputs.end()) {
                return ActionResult::failure("no CSV file to reduce");
            }
            csv = dir->second + "/" + name;
        }
        std::string report_path;
        auto report = reduce_columns(csv, ctx.workspace, &report_path);
        ctx.outputs["report.path"] = report_path;
        ctx.add_artifact(report.source);
        ctx.add_artifact(report_path);
        return ActionResult::success(report_path);
    }
};

class ManageDataRun : public core::ActionRun {
public:
    ActionResult run(ActionContext& ctx) override {
        auto op = parse_data_op(ctx.param("operation", "archive"));
        auto sources = util::split_list(ctx.param("sources"));
        if (sources.empty()) sources = ctx.artifacts;
        auto dest = ctx.param("destination");
        if (dest.empty()) {
            auto dir = ctx.outputs.find("job.dir");
            if (op != DataOp::Archive || dir == ctx.outputs.end()) {
                return ActionResult::failure("no destination given");
            }
            dest = dir->second + "/" + ctx.item.id + "-study.zip";
        }
        auto result = manage_data(op, sources, dest, ctx.workspace);
        ctx.outputs["data.destination"] = result;
        if (op == DataOp::Archive) ctx.add_artifact(result);
        return ActionResult::success(result);
    }
};

template <typename RunType>
core::ActionSpec simple_spec(std::string name, std::string description) {
    return {std::move(name), std::move(description), [] { return std::make_unique<RunType>(); }};
}

}  // namespace

std::vector<core::ItemDescriptor> builtin_descriptors() {
    std::vector<core::ItemDescriptor> out;

    {
        core::ItemDescriptor d;
        d.type_id = "input_generation";
        d.display_name = "Input Generator";
        d.form_template.description = "Render a simulation input deck from a template and write its manifest.";
        d.form_template.groups = {template_group("input.txt", "manifest.json"), solver_group()};
        d.form_template.actions = {"Generate Input"};
        d.pipeline = {{kWriteInputSetAction, template_bindings()}};
        out.push_back(std::move(d));
    }
    {
        core::ItemDescriptor d;
        d.type_id = "job_launch";
        d.display_name = "Job Launcher";
        d.form_template.description = "Run a program locally or on the simulated remote host.";
        d.form_template.groups = {
            job_group(),
            {"files",
             {entry("inputs", EntryKind::Text, "", false, "Workspace-relative input files to stage"),
              entry("input_file", EntryKind::File, "", false,
                    "Main input file; staged automatically when it sits in the project directory")}}};
        d.form_template.actions = {"Launch the Job"};
        auto bindings = job_bindings();
        bindings["inputs"] = "files.inputs";
        d.pipeline = {{kLaunchAction, bindings}};
        out.push_back(std::move(d));
    }
    {
        core::ItemDescriptor d;
        d.type_id = "data_reduction";
        d.display_name = "Data Reduction";
        d.form_template.description = "Column statistics (count, min, max, mean, sum) of a numeric CSV file.";
        d.form_template.groups = {
            {"analysis", {entry("csv_file", EntryKind::File, "", true, "Workspace-relative CSV with a header row")}}};
        d.form_template.actions = {"Reduce Data"};
        d.pipeline = {{kReduceColumnsAction, {{"csv_file", "analysis.csv_file"}}}};
        out.push_back(std::move(d));
    }
    {
        core::ItemDescriptor d;
        d.type_id = "data_management";
        d.display_name = "Data Manager";
        d.form_template.description = "Copy, move or archive workspace files.";
        d.form_template.groups = {
            {"data",
             {entry("operation", EntryKind::Choice, "copy", true, "What to do with the sources",
                    std::vector<std::string>{"copy", "move", "archive"}),
              entry("sources", EntryKind::Text, "", true, "Workspace-relative paths, separated by spaces or commas"),
              entry("destination", EntryKind::Text, "", true,
                    "Directory for copy/move, ZIP file for archive (workspace-relative)")}}};
        d.form_template.actions = {"Manage Data"};
        d.pipeline = {{kManageDataAction,
                       {{"operation", "data.operation"}, {"sources", "data.sources"}, {"destination", "data.destination"}}}};
        out.push_back(std::move(d));
    }
    {
        core::ItemDescriptor d;
        d.type_id = "full_study";
        d.display_name = "Full Study";
        d.form_template.description =
            "Generate the input, run the job, reduce its CSV output and archive inputs and outputs.";
        auto job = job_group();
        job.entries[1].value = "";
        d.form_template.groups = {
            template_group("input.csv", "manifest.json"),
            solver_group(),
            job,
            {"analysis",
             {entry("output_csv", EntryKind::Text, "output.csv", true,
                    "CSV file the job writes into its working directory")}},
            {"archive",
             {entry("operation", EntryKind::Choice, "archive", true, "Final data step",
                    std::vector<std::string>{"archive"}),
              entry("destination", EntryKind::Text, "", false,
                    "Workspace-relative ZIP path; empty puts it in the job directory")}}};
        d.form_template.actions = {"Run Full Study"};
        d.pipeline = {{kWriteInputSetAction, template_bindings()},
                      {kLaunchAction, job_bindings()},
                      {kReduceColumnsAction, {{"output_name", "analysis.output_csv"}}},
                      {kManageDataAction, {{"operation", "archive.operation"}, {"destination", "archive.destination"}}}};
        out.push_back(std::move(d));
    }
    return out;
}

void register_builtin_actions(core::Engine& engine) {
    engine.register_action(simple_spec<WriteInputSetRun>(kWriteInputSetAction,
                                                         "Render a template and write the input manifest"));
    auto* jobs = &engine.jobs();
    engine.register_action({kLaunchAction, "Launch a job and wait for it to end", [jobs] {
                                auto run = std::make_unique<LaunchRun>();
                                run->bind(jobs);
                                return std::unique_ptr<core::ActionRun>(std::move(run));
                            }});
    engine.register_action(simple_spec<ReduceColumnsRun>(kReduceColumnsAction, "Reduce CSV columns to statistics"));
    engine.register_action(simple_spec<ManageDataRun>(kManageDataAction, "Copy, move or archive files"));
}

void register_builtins(core::Engine& engine) {
    register_builtin_actions(engine);
    for (auto& d : builtin_descriptors()) engine.register_item_descriptor(std::move(d));
}

std::unique_ptr<core::Engine> open_engine(const core::EngineOptions& options,
                                          std::vector<persistence::Diagnostic>* diagnostics) {
    auto engine = std::make_unique<core::Engine>(options);
    register_builtins(*engine);
    auto diags = engine->load();
    if (diagnostics) *diagnostics = std::move(diags);
    return engine;
}

}  // namespace forgeflow::items
