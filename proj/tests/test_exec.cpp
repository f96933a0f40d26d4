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

#include <doctest.h>

#include <csignal>
#include <chrono>
#include <fstream>
#include <random>
#include <set>
#include <thread>

#include "forgeflow/error.hpp"
#include "forgeflow/exec/event_log.hpp"
#include "forgeflow/exec/job_manager.hpp"
#include "forgeflow/exec/process.hpp"
#include "forgeflow/exec/staging.hpp"
#include "support.hpp"

using namespace forgeflow;
using namespace forgeflow::exec;
using testing::TempDir;
using namespace std::chrono_literals;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::IoFailure;
}

JobProfile shell(const std::string& script, const std::string& project = "p") {
    JobProfile p;
    p.executable = "sh";
    p.args = {"-c", script};
    p.working_project = project;
    return p;
}

std::vector<std::string> statuses(const std::vector<JobEvent>& events) {
    std::vector<std::string> out;
    for (const auto& e : events) {
        if (e.kind == EventKind::Status) out.push_back(e.payload.substr(0, e.payload.find(':')));
    }
    return out;
}

void check_gap_free(const std::vector<JobEvent>& events) {
    for (std::size_t i = 0; i < events.size(); ++i) REQUIRE(events[i].seq == i);
    int terminal = 0;
    for (const auto& e : events) {
        if (e.kind == EventKind::Status && is_terminal(parse_job_status(e.payload.substr(0, e.payload.find(':'))))) {
            ++terminal;
        }
    }
    CHECK(terminal == 1);
    REQUIRE_FALSE(events.empty());
    CHECK(events.back().kind == EventKind::Status);
}

std::map<std::string, std::uintmax_t> walk_sizes_without(const std::filesystem::path& dir,
                                                        const std::set<std::string>& staged) {
    auto sizes = testing::walk_sizes(dir);
    for (const auto& s : staged) sizes.erase(s);
    return sizes;
}

}  // namespace

TEST_CASE("event log appends, closes and replays") {
    TempDir dir;
    auto log = std::make_shared<EventLog>("j1", dir / "events.log");
    log->append(EventKind::Status, "Queued");
    log->append(EventKind::Stdout, "caf\xc3\xa9 \xff bad byte");
    log->append(EventKind::Status, "Finished");
    log->close();
    CHECK(log->closed());
    CHECK(code_of([&] { log->append(EventKind::Stdout, "late"); }) == ErrorCode::InvalidArgument);

    auto replayed = EventLog::replay(dir / "events.log");
    CHECK(replayed->closed());
    auto a = log->snapshot();
    auto b = replayed->snapshot();
    REQUIRE(a.size() == 3);
    CHECK(testing::payloads(a) == testing::payloads(b));
    CHECK(a[1].payload.find("caf\xc3\xa9") == 0);
    CHECK(a[1].payload.find('\xff') == std::string::npos);

    // A torn final line is dropped on replay.
    {
        std::ofstream out(dir / "events.log", std::ios::app);
        out << "{\"job_id\":\"j1\",\"seq\":3,\"ki";
    }
    CHECK(EventLog::replay(dir / "events.log")->size() == 3);
}

TEST_CASE("event log as a stored file matches its in-memory events") {
    TempDir dir;
    EventLog log("j2", dir / "events.log");
    for (int i = 0; i < 50; ++i) log.append(EventKind::Stdout, "line " + std::to_string(i));
    log.close();
    std::ifstream in(dir / "events.log");
    std::size_t n = 0;
    for (std::string line; std::getline(in, line); ++n) {
        auto ev = event_from_json(nlohmann::json::parse(line));
        CHECK(ev.seq == n);
        CHECK(ev.job_id == "j2");
        CHECK(event_line(ev) == line);
    }
    CHECK(n == 50);
}

TEST_CASE("streams from an offset and concurrent readers agree") {
    TempDir dir;
    auto log = std::make_shared<EventLog>("j", dir / "events.log");
    std::vector<std::vector<JobEvent>> seen(10);
    std::vector<std::thread> readers;
    for (int r = 0; r < 10; ++r) {
        readers.emplace_back([&, r] { seen[r] = EventStream(log, 0).drain(); });
    }
    for (int i = 0; i < 500; ++i) {
        log->append(EventKind::Stdout, std::to_string(i));
        if (i % 50 == 0) std::this_thread::sleep_for(1ms);
    }
    log->close();
    for (auto& t : readers) t.join();
    for (const auto& s : seen) CHECK(testing::payloads(s) == testing::payloads(seen[0]));
    CHECK(seen[0].size() == 500);

    EventStream tail(log, 495);
    auto rest = tail.drain();
    REQUIRE(rest.size() == 5);
    CHECK(rest.front().seq == 495);
    CHECK(tail.done());
    CHECK_FALSE(EventStream(log, 1000).next(10ms).has_value());
}

TEST_CASE("child process output, exit codes and spawn failure") {
    TempDir dir;
    auto p = ChildProcess::spawn("sh", {"-c", "echo out; echo err >&2; printf partial; exit 3"}, dir.path());
    std::string out, err;
    std::vector<std::string> lines;
    p->pump(
        [&](OutputStream s, std::string_view b) { (s == OutputStream::Stdout ? out : err) += b; },
        [&](OutputStream, std::string_view l) { lines.emplace_back(l); });
    CHECK(p->wait() == 3);
    CHECK(out == "out\npartial");
    CHECK(err == "err\n");
    CHECK(std::set<std::string>(lines.begin(), lines.end()) == std::set<std::string>{"out", "err", "partial"});

    CHECK(code_of([&] { ChildProcess::spawn("definitely-not-a-program-xyz", {}, dir.path()); }) ==
          ErrorCode::SpawnFailure);
    CHECK(find_program("sh").has_value());
    CHECK_FALSE(find_program("definitely-not-a-program-xyz").has_value());

    auto sleeper = ChildProcess::spawn("sleep", {"30"}, dir.path());
    auto start = std::chrono::steady_clock::now();
    sleeper->terminate();
    CHECK(sleeper->wait() == 128 + SIGTERM);
    CHECK(std::chrono::steady_clock::now() - start < 2s);
}

TEST_CASE("staging plan: listed inputs and same-directory auto-staging") {
    TempDir dir;
    persistence::WorkspaceRef ws(dir.path());
    testing::write_file(dir / "p/a.dat", "a");
    testing::write_file(dir / "p/mesh.dat", "m");
    testing::write_file(dir / "p/sub/deep.dat", "d");
    testing::write_file(dir / "q/a.dat", "other");
    testing::write_file(dir / "lib/shared.dat", "s");

    JobProfile profile;
    profile.working_project = "p";
    profile.input_files = {"lib/shared.dat"};
    profile.auto_stage_candidates = {"p/mesh.dat", "p/sub/deep.dat", "q/a.dat", "p/missing.dat", "lib/shared.dat"};
    auto plan = plan_staging(ws, profile);
    std::set<std::string> sources;
    for (const auto& f : plan) sources.insert(f.source);
    CHECK(sources == std::set<std::string>{"lib/shared.dat", "p/mesh.dat"});
    for (const auto& f : plan) CHECK(f.staged == std::filesystem::path(f.source).filename().string());

    profile.input_files = {"p/none.dat"};
    CHECK(code_of([&] { plan_staging(ws, profile); }) == ErrorCode::MissingInput);
    profile.input_files = {"p/a.dat", "q/a.dat"};
    CHECK(code_of([&] { plan_staging(ws, profile); }) == ErrorCode::StagingConflict);
    profile.input_files = {"../escape"};
    CHECK(code_of([&] { plan_staging(ws, profile); }) == ErrorCode::PathEscape);
}

TEST_CASE("echo job walks the status sequence") {
    TempDir dir;
    JobManager jobs(persistence::WorkspaceRef(dir.path()), 1);
    JobProfile p;
    p.executable = "echo";
    p.args = {"hello"};
    p.working_project = "p";
    auto h = jobs.launch(p);
    CHECK(h.status == JobStatus::Queued);
    CHECK(h.job_dir == "p/" + h.job_id);
    auto done = jobs.wait(h.job_id);
    CHECK(done.status == JobStatus::Finished);
    CHECK(done.exit_code == 0);
    auto events = jobs.stream_events(h.job_id, 0).drain();
    check_gap_free(events);
    CHECK(statuses(events) == std::vector<std::string>{"Queued", "Staging", "Running", "Retrieving", "Finished"});
    CHECK(testing::payloads(events)[3] == "stdout|hello");
    CHECK(testing::slurp(dir / done.job_dir / "stdout.txt") == "hello\n");
    CHECK(code_of([&] { jobs.poll("nope"); }) == ErrorCode::UnknownJob);

    // A second manager replays the finished job from disk.
    JobManager later(persistence::WorkspaceRef(dir.path()));
    auto all = testing::payloads(events);
    CHECK(testing::payloads(later.stream_events(h.job_id, 2).drain()) ==
          std::vector<std::string>(all.begin() + 2, all.end()));
}

TEST_CASE("failure modes carry exit codes and messages") {
    TempDir dir;
    JobManager jobs(persistence::WorkspaceRef(dir.path()));
    auto failed = jobs.wait(jobs.launch(shell("exit 4")).job_id);
    CHECK(failed.status == JobStatus::Failed);
    CHECK(failed.exit_code == 4);
    CHECK(failed.message == "exit code 4");

    JobProfile missing_program;
    missing_program.executable = "no-such-program-xyz";
    missing_program.working_project = "p";
    auto spawn = jobs.wait(jobs.launch(missing_program).job_id);
    CHECK(spawn.status == JobStatus::Failed);
    CHECK(spawn.exit_code == 127);
    CHECK(spawn.message.find("SpawnFailure") != std::string::npos);

    auto missing_input = shell("true");
    missing_input.input_files = {"p/absent.dat"};
    auto staged = jobs.wait(jobs.launch(missing_input).job_id);
    CHECK(staged.status == JobStatus::Failed);
    CHECK(staged.exit_code == -1);
    CHECK(staged.message.find("MissingInput") != std::string::npos);

    auto unknown = shell("true");
    unknown.connector_id = "ssh";
    CHECK(code_of([&] { jobs.launch(unknown); }) == ErrorCode::UnknownConnector);
    auto escape = shell("true", "../outside");
    CHECK(code_of([&] { jobs.launch(escape); }) == ErrorCode::PathEscape);

    auto flaky = shell("true");
    flaky.connector_id = "sim-remote";
    flaky.sim.failure_probability = 1.0;
    testing::write_file(dir / "p/in.dat", "x");
    flaky.input_files = {"p/in.dat"};
    auto transport = jobs.wait(jobs.launch(flaky).job_id);
    CHECK(transport.status == JobStatus::Failed);
    CHECK(transport.message.find("TransportFailure") != std::string::npos);
}

TEST_CASE("kill cancels quickly, escalating past an ignored SIGTERM") {
    TempDir dir;
    JobManager jobs(persistence::WorkspaceRef(dir.path()));
    jobs.set_kill_grace(300ms);
    for (const char* script : {"sleep 30", "trap '' TERM; while true; do sleep 0.05; done"}) {
        auto h = jobs.launch(shell(script));
        while (jobs.poll(h.job_id).status != JobStatus::Running) std::this_thread::sleep_for(2ms);
        std::this_thread::sleep_for(50ms);
        auto start = std::chrono::steady_clock::now();
        auto killed = jobs.kill(h.job_id);
        CHECK(std::chrono::steady_clock::now() - start < 3s);
        CHECK(killed.status == JobStatus::Cancelled);
        CHECK_FALSE(killed.exit_code.has_value());
        check_gap_free(jobs.stream_events(h.job_id, 0).drain());
        CHECK(jobs.kill(h.job_id).status == JobStatus::Cancelled);
    }

    auto slow = shell("true");
    slow.connector_id = "sim-remote";
    slow.sim.latency_ms = 20000;
    testing::write_file(dir / "p/in.dat", "x");
    slow.input_files = {"p/in.dat"};
    auto h = jobs.launch(slow);
    auto start = std::chrono::steady_clock::now();
    CHECK(jobs.kill(h.job_id).status == JobStatus::Cancelled);
    CHECK(std::chrono::steady_clock::now() - start < 3s);
}

TEST_CASE("retrieval happens iff outputs fit the threshold") {
    TempDir dir;
    persistence::WorkspaceRef ws(dir.path());
    JobManager jobs(ws);
    testing::write_file(dir / "p/input.dat", std::string(100, 'i'));
    auto script = "head -c 700 /dev/zero > a.bin; mkdir -p sub; head -c 300 /dev/zero > sub/b.bin";
    // The output size comes from walking the remote directory, so compute it
    // from a probe run first.
    auto probe = shell(script);
    probe.input_files = {"p/input.dat"};
    auto probe_handle = jobs.wait(jobs.launch(probe).job_id);
    auto remote = walk_sizes_without(connector_root(ws, kLocalConnector) / probe_handle.job_id, {"input.dat"});
    std::uintmax_t total = 0;
    for (const auto& [_, size] : remote) total += size;
    REQUIRE(total == 1000);

    for (auto threshold : {total - 1, total, total + 1}) {
        auto p = shell(script);
        p.input_files = {"p/input.dat"};
        p.retrieve_threshold_bytes = threshold;
        auto done = jobs.wait(jobs.launch(p).job_id);
        CHECK(done.status == JobStatus::Finished);
        auto result = jobs.retrieval(done.job_id);
        CHECK(result.total_bytes == total);
        auto local = testing::walk_sizes(dir / done.job_dir);
        CAPTURE(threshold);
        if (total <= threshold) {
            CHECK(result.retrieved.size() == 2);
            CHECK(local["a.bin"] == 700);
            CHECK(local["sub/b.bin"] == 300);
            CHECK_FALSE(local.count("input.dat"));
            CHECK(result.skipped.empty());
        } else {
            CHECK(result.retrieved.empty());
            CHECK(result.skipped.size() == 2);
            CHECK_FALSE(local.count("a.bin"));
            auto events = testing::payloads(jobs.stream_events(done.job_id, 0).drain());
            CHECK(std::any_of(events.begin(), events.end(),
                              [](auto& e) { return e.find("file_retrieved|skipped") == 0; }));
        }
    }
}

TEST_CASE("outputs named like job logs are not retrieved over them") {
    TempDir dir;
    JobManager jobs(persistence::WorkspaceRef(dir.path()));
    auto done = jobs.wait(jobs.launch(shell("echo real; echo fake > stdout.txt; echo ok > data.txt")).job_id);
    CHECK(testing::slurp(dir / done.job_dir / "stdout.txt") == "real\n");
    CHECK(testing::slurp(dir / done.job_dir / "data.txt") == "ok\n");
    auto r = jobs.retrieval(done.job_id);
    REQUIRE(r.skipped.size() == 1);
    CHECK(r.skipped[0].path == "stdout.txt");
}

TEST_CASE("local and sim-remote connectors produce the same events and bytes") {
    TempDir dir;
    persistence::WorkspaceRef ws(dir.path());
    JobManager jobs(ws);
    testing::write_file(dir / "p/in.txt", "3\n1\n2\n");
    for (const auto& connector : {std::string(kLocalConnector), std::string(kSimRemoteConnector)}) {
        auto p = shell("sort in.txt > sorted.txt; cat sorted.txt; echo warn >&2");
        p.input_files = {"p/in.txt"};
        p.connector_id = connector;
        p.sim.latency_ms = 5;
        auto done = jobs.wait(jobs.launch(p).job_id);
        CHECK(done.status == JobStatus::Finished);
        CHECK(testing::slurp(dir / done.job_dir / "sorted.txt") == "1\n2\n3\n");
    }
}
