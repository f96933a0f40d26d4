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

#include <cmath>
#include <random>
#include <set>

#include "forgeflow/error.hpp"
#include "forgeflow/items/builtin.hpp"
#include "forgeflow/items/data_ops.hpp"
#include "forgeflow/items/reduction.hpp"
#include "forgeflow/items/template.hpp"
#include "forgeflow/items/zip_writer.hpp"
#include "forgeflow/persistence/store.hpp"
#include "support.hpp"

using namespace forgeflow;
using namespace forgeflow::items;
using testing::TempDir;

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

core::Form solver_form() {
    core::Form f;
    f.groups = {{"solver",
                 {{"tolerance", core::EntryKind::Real, "1e-6", std::nullopt, true, ""},
                  {"steps", core::EntryKind::Integer, "40", std::nullopt, true, ""}}},
                {"mesh", {{"file", core::EntryKind::File, "p/mesh.dat", std::nullopt, false, ""}}}};
    return f;
}

bool close_rel(double got, long double want, double tol) {
    if (want == 0) return std::fabs(got) <= tol;
    return std::fabs((static_cast<long double>(got) - want) / want) <= tol;
}

}  // namespace

TEST_CASE("templates substitute every placeholder") {
    auto form = solver_form();
    std::string text = "tol=${solver.tolerance}\nsteps=${solver.steps} again ${solver.steps}\n$ {x} ${unclosed";
    CHECK(placeholders(text) == std::vector<std::string>{"solver.tolerance", "solver.steps"});
    auto out = render_text(text, form);
    CHECK(out == "tol=1e-6\nsteps=40 again 40\n$ {x} ${unclosed");
    CHECK(render_text(text, form) == out);
    try {
        render_text("a ${missing.entry} b", form);
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownPlaceholder);
        CHECK(std::string(e.what()).find("${missing.entry}") != std::string::npos);
    }
}

TEST_CASE("input sets write the rendered file and a manifest") {
    TempDir dir;
    persistence::WorkspaceRef ws(dir.path());
    testing::write_file(dir / "p/deck.tmpl", "steps ${solver.steps}\n");
    testing::write_file(dir / "p/mesh.dat", "mesh");
    auto form = solver_form();
    form.groups.push_back({"template", {{"file", core::EntryKind::File, "p/deck.tmpl", std::nullopt, true, ""}}});
    auto set = write_input_set({"p/deck.tmpl", "run/input.txt", "manifest.json"}, form, "p", ws);
    CHECK(set.main == "p/run/input.txt");
    CHECK(set.manifest == "p/manifest.json");
    CHECK(set.files == std::vector<std::string>{"p/run/input.txt", "p/mesh.dat"});
    CHECK(testing::slurp(dir / "p/run/input.txt") == "steps 40\n");
    auto manifest = nlohmann::json::parse(testing::slurp(dir / "p/manifest.json"));
    CHECK(manifest["main"] == "p/run/input.txt");
    CHECK(manifest["files"].size() == 2);
    CHECK(code_of([&] { write_input_set({"p/deck.tmpl", "m.json", "m.json"}, form, "p", ws); }) ==
          ErrorCode::DuplicateDest);
    CHECK(code_of([&] { write_input_set({"p/deck.tmpl", "deck.tmpl", "m.json"}, form, "p", ws); }) ==
          ErrorCode::DuplicateDest);
    CHECK(code_of([&] { write_input_set({"p/none.tmpl", "i", "m"}, form, "p", ws); }) == ErrorCode::IoFailure);
}

TEST_CASE("numeric CSV parsing reports where it fails") {
    auto t = parse_numeric_csv("a, b\r\n1,2\r\n\r\n3.5,-4e2\n");
    CHECK(t.header == std::vector<std::string>{"a", "b"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[1][1] == -400.0);
    auto where = [](const std::string& text) {
        try {
            parse_numeric_csv(text);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::MalformedCsv);
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(where("a,b\n1,2\n3,x\n").find("line 3, column 2") != std::string::npos);
    CHECK(where("a,b\n1,2,3\n").find("line 2") != std::string::npos);
    CHECK(where("a,b\n").find("no error") == std::string::npos);
    CHECK(where("").find("no error") == std::string::npos);
    CHECK(where("a,b\n1,nan\n").find("line 2, column 2") != std::string::npos);
}

TEST_CASE("reduction matches a brute-force long double oracle") {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> mag(-8, 8);
    for (int round = 0; round < 20; ++round) {
        CsvTable t;
        t.header = {"u", "v", "w"};
        auto rows = 1 + rng() % 400;
        for (std::size_t r = 0; r < rows; ++r) {
            t.rows.push_back({std::pow(10.0, mag(rng)) * (rng() % 2 ? 1 : -1), static_cast<double>(rng() % 1000),
                              1.0 + std::ldexp(static_cast<double>(rng() % 1024), -40)});
        }
        auto report = reduce_table(t, "x.csv");
        CHECK(report.row_count == rows);
        REQUIRE(report.columns.size() == 3);
        for (std::size_t c = 0; c < 3; ++c) {
            long double sum = 0;
            double lo = t.rows[0][c], hi = t.rows[0][c];
            for (const auto& row : t.rows) {
                sum += row[c];
                lo = std::min(lo, row[c]);
                hi = std::max(hi, row[c]);
            }
            const auto& col = report.columns[c];
            CHECK(col.name == t.header[c]);
            CHECK(col.count == rows);
            CHECK(col.min == lo);
            CHECK(col.max == hi);
            CHECK(close_rel(col.sum, sum, 1e-12));
            CHECK(close_rel(col.mean, sum / rows, 1e-12));
        }
    }
    CsvTable cancel{{"x"}, {{1e16}, {1.0}, {-1e16}, {1.0}}};
    CHECK(reduce_table(cancel, "c").columns[0].sum == 2.0);
}

TEST_CASE("reduce_columns writes its report beside the CSV") {
    TempDir dir;
    persistence::WorkspaceRef ws(dir.path());
    testing::write_file(dir / "p/out.csv", "a,b\n1,10\n2,20\n");
    std::string path;
    auto report = reduce_columns("p/out.csv", ws, &path);
    CHECK(path == "p/out.report.json");
    auto doc = nlohmann::json::parse(testing::slurp(dir / path));
    CHECK(doc == to_json(report));
    CHECK(doc["columns"][1]["mean"] == 15.0);
    CHECK(code_of([&] { reduce_columns("p/none.csv", ws); }) == ErrorCode::MissingInput);
}

TEST_CASE("crc32 and zip archives agree with reference implementations") {
    CHECK(crc32_of("123456789") == 0xCBF43926u);
    CHECK(crc32_of("") == 0u);
    TempDir dir;
    std::mt19937_64 rng(8);
    std::vector<ZipEntry> entries = {{"a.txt", "hello\n"}, {"dir/empty.bin", ""}, {"d/\xc3\xa9t\xc3\xa9.txt", "utf8"}};
    std::string big;
    for (int i = 0; i < 200000; ++i) big += static_cast<char>(rng() % 7 ? 'a' + rng() % 3 : rng() % 256);
    entries.push_back({"big.bin", big});
    auto zip = build_zip(entries);
    CHECK(build_zip(entries) == zip);
    CHECK(zip.size() < big.size());
    testing::write_file(dir / "t.zip", zip);
    auto extracted = testing::python_unzip(dir / "t.zip", dir / "x");
    REQUIRE(extracted.size() == entries.size());
    for (const auto& e : entries) CHECK(extracted[e.name] == e.data);
}

TEST_CASE("data operations check everything before touching anything") {
    TempDir dir;
    persistence::WorkspaceRef ws(dir.path());
    testing::write_file(dir / "p/a.txt", "A");
    testing::write_file(dir / "p/b.txt", "B");
    testing::write_file(dir / "p/tree/c.txt", "C");
    testing::write_file(dir / "p/tree/deep/d.txt", "D");

    CHECK(manage_data(DataOp::Copy, {"p/a.txt", "p/tree/c.txt", "p/a.txt"}, "backup", ws) == "backup");
    CHECK(testing::walk_sizes(dir / "backup") == std::map<std::string, std::uintmax_t>{{"a.txt", 1}, {"c.txt", 1}});
    CHECK(testing::slurp(dir / "backup/c.txt") == "C");
    CHECK(code_of([&] { manage_data(DataOp::Copy, {"p/tree"}, "fresh", ws); }) == ErrorCode::MissingInput);
    CHECK(code_of([&] { manage_data(DataOp::Copy, {"p/a.txt"}, "backup", ws); }) == ErrorCode::DuplicateDest);
    CHECK(code_of([&] { manage_data(DataOp::Copy, {"p/b.txt", "p/zzz"}, "fresh", ws); }) == ErrorCode::MissingInput);
    CHECK_FALSE(std::filesystem::exists(dir / "fresh"));
    CHECK(code_of([&] { manage_data(DataOp::Copy, {"../x"}, "fresh", ws); }) == ErrorCode::PathEscape);
    testing::write_file(dir / "q/c.txt", "other C");
    CHECK(code_of([&] { manage_data(DataOp::Copy, {"p/tree/c.txt", "q/c.txt"}, "fresh", ws); }) ==
          ErrorCode::DuplicateDest);
    CHECK_FALSE(std::filesystem::exists(dir / "fresh"));

    CHECK(manage_data(DataOp::Move, {"p/b.txt"}, "moved", ws) == "moved");
    CHECK_FALSE(std::filesystem::exists(dir / "p/b.txt"));
    CHECK(testing::slurp(dir / "moved/b.txt") == "B");

    CHECK(manage_data(DataOp::Archive, {"p/a.txt", "p/tree"}, "p/all.zip", ws) == "p/all.zip");
    auto files = testing::python_unzip(dir / "p/all.zip", dir / "unzipped");
    CHECK(files == std::map<std::string, std::string>{
                       {"p/a.txt", "A"}, {"p/tree/c.txt", "C"}, {"p/tree/deep/d.txt", "D"}});
    CHECK(code_of([&] { manage_data(DataOp::Archive, {"p/a.txt"}, "p/all.zip", ws); }) == ErrorCode::DuplicateDest);
    CHECK(code_of([&] { manage_data(DataOp::Archive, {"p/a.txt"}, "p/a.txt", ws); }) == ErrorCode::DuplicateDest);
    CHECK(parse_data_op("archive") == DataOp::Archive);
    CHECK(code_of([] { parse_data_op("delete"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("builtin descriptors are valid and fully wired") {
    TempDir dir;
    auto engine = testing::builtin_engine(dir.path());
    auto types = engine->list_item_types();
    std::vector<std::string> ids;
    for (const auto& t : types) ids.push_back(t.type_id);
    CHECK(ids == std::vector<std::string>{"data_management", "data_reduction", "full_study", "input_generation",
                                          "job_launch"});
    for (const auto& d : builtin_descriptors()) {
        CHECK(persistence::check_descriptor(d).empty());
        REQUIRE(d.form_template.actions.size() == 1);
        for (const auto& step : d.pipeline) {
            CHECK(engine->actions().find(step.action));
            for (const auto& [param, ref] : step.bindings) CHECK(d.form_template.find(ref));
        }
    }
}

TEST_CASE("job_launch runs the default echo and auto-stages its input file") {
    TempDir dir;
    auto engine = testing::builtin_engine(dir.path());
    testing::write_file(dir / "p/input.dat", "payload\n");
    auto item = engine->create_item("job_launch", "p");
    auto form = item.form;
    form.find("files.input_file")->value = "p/input.dat";
    form.find("job.args")->value = "-c 'cat input.dat; echo made > result.txt'";
    form.find("job.executable")->value = "sh";
    REQUIRE(engine->review_form(item.id, form).accepted());
    engine->process_item(item.id, "Launch the Job");
    auto done = engine->wait_item(item.id);
    REQUIRE(done.state == core::ItemState::Processed);
    auto job_dir = dir / "p" / done.last_job_id;
    CHECK(testing::slurp(job_dir / "stdout.txt") == "payload\n");
    CHECK(testing::slurp(job_dir / "result.txt") == "made\n");

    auto bad = engine->create_item("job_launch", "p");
    auto bad_form = bad.form;
    bad_form.find("job.connector")->value = "ssh";
    auto status = engine->review_form(bad.id, bad_form);
    CHECK_FALSE(status.accepted());
    CHECK(status.messages.size() == 1);
}

TEST_CASE("full study chains all four stages") {
    TempDir dir;
    auto engine = testing::builtin_engine(dir.path());
    testing::write_toy_study(dir.path(), "s");
    auto id = testing::prepare_full_study(*engine, "s", "25");
    engine->process_item(id, "Run Full Study");
    auto done = engine->wait_item(id);
    REQUIRE(done.state == core::ItemState::Processed);
    auto job_dir = dir / "s" / done.last_job_id;
    auto report = nlohmann::json::parse(testing::slurp(job_dir / "output.report.json"));
    CHECK(report["row_count"] == 25);
    CHECK(std::filesystem::exists(job_dir / (id + "-study.zip")));

    // Break stage 2 and check the chain stops there.
    auto form = done.form;
    form.find("job.executable")->value = "s/no-such-solver.sh";
    engine->edit_form(id, form);
    auto status = engine->review_form(id, form);
    CHECK_FALSE(status.accepted());
    form.find("job.executable")->value = "no-such-solver";
    REQUIRE(engine->review_form(id, form).accepted());
    engine->process_item(id, "Run Full Study");
    auto failed = engine->wait_item(id);
    CHECK(failed.state == core::ItemState::ProcessError);
    CHECK(failed.status_message.rfind("stage 2 (launch)", 0) == 0);
    auto failed_dir = dir / "s" / failed.last_job_id;
    CHECK_FALSE(std::filesystem::exists(failed_dir / "output.report.json"));
}
