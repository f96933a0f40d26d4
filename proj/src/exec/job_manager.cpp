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

#include "forgeflow/exec/job_manager.hpp"

#include <fstream>
#include <stop_token>
#include <thread>

#include "forgeflow/error.hpp"
#include "forgeflow/exec/staging.hpp"

namespace forgeflow::exec {

namespace fs = std::filesystem;

struct JobManager::Job {
    JobProfile profile;
    fs::path local_dir;  // <ws>/<project>/<job_id>

    mutable std::mutex mutex;
    mutable std::condition_variable cv;
    JobHandle handle;
    std::shared_ptr<EventLog> log;
    std::stop_source stop;
    std::shared_ptr<ChildProcess> process;
    std::vector<StagedFile> manifest;
    RetrievalResult retrieval;
    std::thread worker;
};

JobManager::JobManager(persistence::WorkspaceRef ws, std::optional<std::uint64_t> id_seed)
    : ws_(std::move(ws)), ids_(id_seed) {
    connectors_.emplace(std::string(kLocalConnector), local_connector_factory());
    connectors_.emplace(std::string(kSimRemoteConnector), sim_remote_connector_factory());
}

JobManager::~JobManager() {
    std::vector<std::shared_ptr<Job>> jobs;
    {
        std::unique_lock lock(mutex_);
        for (auto& [_, job] : jobs_) jobs.push_back(job);
    }
    for (auto& job : jobs) {
        job->stop.request_stop();
        std::shared_ptr<ChildProcess> proc;
        {
            std::lock_guard lock(job->mutex);
            proc = job->process;
        }
        if (proc) proc->kill_hard();
    }
    for (auto& job : jobs) {
        if (job->worker.joinable()) job->worker.join();
    }
}

void JobManager::register_connector(const std::string& id, ConnectorFactory factory) {
    std::unique_lock lock(mutex_);
    connectors_[id] = std::move(factory);
}

bool JobManager::has_connector(const std::string& id) const {
    std::shared_lock lock(mutex_);
    return connectors_.count(id) > 0;
}

std::shared_ptr<JobManager::Job> JobManager::find(const std::string& job_id) const {
    std::shared_lock lock(mutex_);
    auto it = jobs_.find(job_id);
    if (it == jobs_.end()) throw Error(ErrorCode::UnknownJob, job_id);
    return it->second;
}

void JobManager::set_status(Job& job, JobStatus status, std::optional<int> exit_code,
                            const std::string& detail) {
    std::lock_guard lock(job.mutex);
    job.handle.status = status;
    if (is_terminal(status)) {
        if (status != JobStatus::Cancelled) job.handle.exit_code = exit_code;
        job.handle.ended_at = util::utc_timestamp();
        job.handle.message = detail;
    }
    std::string payload(to_string(status));
    if (!detail.empty()) payload += ": " + detail;
    job.log->append(EventKind::Status, std::move(payload));
    if (is_terminal(status)) job.log->close();
    job.cv.notify_all();
}

JobHandle JobManager::launch(const JobProfile& profile) {
    ConnectorFactory factory;
    {
        std::shared_lock lock(mutex_);
        auto it = connectors_.find(profile.connector_id);
        if (it == connectors_.end()) throw Error(ErrorCode::UnknownConnector, profile.connector_id);
        factory = it->second;
    }
    auto project = profile.working_project.empty() ? std::string(".")
                                                   : persistence::normalize_relative(profile.working_project);

    auto job = std::make_shared<Job>();
    job->profile = profile;
    job->profile.working_project = project;
    std::string job_id;
    {
        std::unique_lock lock(mutex_);
        std::error_code ec;
        do {
            job_id = ids_.next("j");
        } while (jobs_.count(job_id) ||
                 fs::exists(ws_.resolve(project == "." ? job_id : project + "/" + job_id), ec));
        jobs_.emplace(job_id, job);
    }
    job->handle.job_id = job_id;
    job->handle.job_dir = project == "." ? job_id : project + "/" + job_id;
    job->local_dir = ws_.resolve(job->handle.job_dir);
    job->log = std::make_shared<EventLog>(job_id, job->local_dir / "events.log");
    {
        std::ofstream(job->local_dir / "stdout.txt", std::ios::trunc);
        std::ofstream(job->local_dir / "stderr.txt", std::ios::trunc);
    }
    job->handle.started_at = util::utc_timestamp();
    job->log->append(EventKind::Status, std::string(to_string(JobStatus::Queued)));

    JobHandle snapshot;
    {
        std::lock_guard lock(job->mutex);
        snapshot = job->handle;
    }
    job->worker = std::thread([this, job, factory = std::move(factory)] {
        auto stop = job->stop.get_token();
        std::optional<int> exit_code;
        try {
            if (stop.stop_requested()) return set_status(*job, JobStatus::Cancelled);
            set_status(*job, JobStatus::Staging);
            auto connector = factory(ws_, job->profile, stop);
            const auto& remote_dir = job->handle.job_id;
            connector->make_directory(remote_dir);
            auto manifest = stage_inputs(
                ws_, job->profile, *connector, remote_dir,
                [&](const StagedFile& f) {
                    job->log->append(EventKind::FileStaged, f.source + " -> " + f.staged);
                },
                stop);
            {
                std::lock_guard lock(job->mutex);
                job->manifest = manifest;
            }
            if (stop.stop_requested()) return set_status(*job, JobStatus::Cancelled);

            auto program = job->profile.executable;
            if (program.find('/') != std::string::npos) program = ws_.resolve(program).string();
            std::shared_ptr<ChildProcess> process;
            {
                std::lock_guard lock(job->mutex);
                if (!stop.stop_requested()) {
                    job->handle.status = JobStatus::Running;
                    job->log->append(EventKind::Status, std::string(to_string(JobStatus::Running)));
                    try {
                        process = connector->exec(program, job->profile.args, remote_dir);
                    } catch (const Error& e) {
                        if (e.code() == ErrorCode::SpawnFailure) exit_code = 127;
                        throw;
                    }
                    job->process = process;
                }
            }
            if (!process) return set_status(*job, JobStatus::Cancelled);

            std::ofstream out(job->local_dir / "stdout.txt", std::ios::binary | std::ios::app);
            std::ofstream err(job->local_dir / "stderr.txt", std::ios::binary | std::ios::app);
            process->pump(
                [&](OutputStream s, std::string_view bytes) {
                    auto& f = s == OutputStream::Stdout ? out : err;
                    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
                    f.flush();
                },
                [&](OutputStream s, std::string_view line) {
                    job->log->append(s == OutputStream::Stdout ? EventKind::Stdout : EventKind::Stderr,
                                     std::string(line));
                });
            exit_code = process->wait();
            if (stop.stop_requested()) return set_status(*job, JobStatus::Cancelled);

            set_status(*job, JobStatus::Retrieving);
            auto retrieval = retrieve_outputs(
                *connector, remote_dir, manifest, job->local_dir, job->profile.retrieve_threshold_bytes,
                [&](const OutputFile& f) {
                    job->log->append(EventKind::FileRetrieved,
                                     f.path + " (" + std::to_string(f.size) + " bytes)");
                });
            if (!retrieval.skipped.empty()) {
                std::string note = retrieval.retrieved.empty() && retrieval.total_bytes >
                                                                      job->profile.retrieve_threshold_bytes
                                       ? "skipped: outputs total " + std::to_string(retrieval.total_bytes) +
                                             " bytes, threshold " +
                                             std::to_string(job->profile.retrieve_threshold_bytes)
                                       : std::string("skipped: reserved file names");
                for (const auto& f : retrieval.skipped) {
                    note += "; " + f.path + " (" + std::to_string(f.size) + " bytes)";
                }
                job->log->append(EventKind::FileRetrieved, note);
            }
            {
                std::lock_guard lock(job->mutex);
                job->retrieval = std::move(retrieval);
            }
            if (stop.stop_requested()) return set_status(*job, JobStatus::Cancelled);
            if (*exit_code == 0) {
                set_status(*job, JobStatus::Finished, 0);
            } else {
                set_status(*job, JobStatus::Failed, exit_code, "exit code " + std::to_string(*exit_code));
            }
        } catch (const std::exception& e) {
            if (stop.stop_requested()) return set_status(*job, JobStatus::Cancelled);
            set_status(*job, JobStatus::Failed, exit_code.value_or(-1), e.what());
        }
    });
    return snapshot;
}

JobHandle JobManager::poll(const std::string& job_id) const {
    auto job = find(job_id);
    std::lock_guard lock(job->mutex);
    return job->handle;
}

EventStream JobManager::stream_events(const std::string& job_id, std::uint64_t from_seq) const {
    {
        std::shared_lock lock(mutex_);
        auto it = jobs_.find(job_id);
        if (it != jobs_.end()) return EventStream(it->second->log, from_seq);
    }
    // Not launched by this manager: look for a job directory on disk.
    std::error_code ec;
    for (auto it = fs::recursive_directory_iterator(ws_.root(), ec); it != fs::recursive_directory_iterator();
         it.increment(ec)) {
        if (ec) break;
        if (!it->is_directory(ec)) continue;
        auto name = it->path().filename().string();
        if (!name.empty() && name.front() == '.') {
            it.disable_recursion_pending();
            continue;
        }
        if (name == job_id && fs::is_regular_file(it->path() / "events.log", ec)) {
            return EventStream(EventLog::replay(it->path() / "events.log"), from_seq);
        }
    }
    throw Error(ErrorCode::UnknownJob, job_id);
}

JobHandle JobManager::kill(const std::string& job_id) {
    auto job = find(job_id);
    {
        std::lock_guard lock(job->mutex);
        if (is_terminal(job->handle.status)) return job->handle;
    }
    job->stop.request_stop();
    std::shared_ptr<ChildProcess> proc;
    {
        std::lock_guard lock(job->mutex);
        proc = job->process;
    }
    if (proc) proc->terminate();
    std::unique_lock lock(job->mutex);
    if (!job->cv.wait_for(lock, grace_, [&] { return is_terminal(job->handle.status); })) {
        if (proc) proc->kill_hard();
        job->cv.wait(lock, [&] { return is_terminal(job->handle.status); });
    }
    return job->handle;
}

JobHandle JobManager::wait(const std::string& job_id) const {
    auto job = find(job_id);
    std::unique_lock lock(job->mutex);
    job->cv.wait(lock, [&] { return is_terminal(job->handle.status); });
    return job->handle;
}

std::optional<JobHandle> JobManager::wait_for(const std::string& job_id,
                                              std::chrono::milliseconds timeout) const {
    auto job = find(job_id);
    std::unique_lock lock(job->mutex);
    if (!job->cv.wait_for(lock, timeout, [&] { return is_terminal(job->handle.status); })) {
        return std::nullopt;
    }
    return job->handle;
}

std::vector<StagedFile> JobManager::manifest(const std::string& job_id) const {
    auto job = find(job_id);
    std::lock_guard lock(job->mutex);
    return job->manifest;
}

RetrievalResult JobManager::retrieval(const std::string& job_id) const {
    auto job = find(job_id);
    std::lock_guard lock(job->mutex);
    return job->retrieval;
}

}  // namespace forgeflow::exec
