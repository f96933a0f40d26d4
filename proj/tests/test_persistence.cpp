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

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <random>
#include <set>
#include <thread>

#include "forgeflow/error.hpp"
#include "forgeflow/persistence/codec.hpp"
#include "forgeflow/persistence/store.hpp"
#include "support.hpp"

using namespace forgeflow;
using namespace forgeflow::persistence;
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

}  // namespace

TEST_CASE("workspace paths stay inside the root") {
    TempDir dir;
    WorkspaceRef ws(dir.path());
    CHECK(ws.resolve("a/./b//c") == dir.path() / "a/b/c");
    CHECK(ws.resolve(".") == dir.path());
    CHECK(ws.resolve("a/../b") == dir.path() / "b");
    CHECK(code_of([&] { ws.resolve("../x"); }) == ErrorCode::PathEscape);
    CHECK(code_of([&] { ws.resolve("a/../../x"); }) == ErrorCode::PathEscape);
    CHECK(code_of([&] { ws.resolve("/etc"); }) == ErrorCode::PathEscape);
    CHECK(code_of([&] { ws.resolve(""); }) == ErrorCode::InvalidArgument);
    CHECK(ws.relative(dir.path() / "p/q.txt") == "p/q.txt");
    CHECK(ws.relative(dir.path() / "..foo") == "..foo");
    CHECK(code_of([] { WorkspaceRef("/nonexistent/forgeflow"); }) == ErrorCode::WorkspaceFailure);
    std::filesystem::create_directories(dir / "p1");
    std::filesystem::create_directories(dir / ".hidden");
    CHECK(ws.projects() == std::vector<std::string>{"p1"});
}

TEST_CASE("item documents are canonical") {
    std::mt19937_64 rng(5);
    auto item = testing::random_item(rng, 1);
    auto bytes = serialize_item(item);
    CHECK(bytes.back() == '\n');
    CHECK(bytes.find('\r') == std::string::npos);
    CHECK(serialize_item(deserialize_item(bytes)) == bytes);
    auto doc = json::parse(bytes);
    CHECK(doc["schema_version"] == kItemSchemaVersion);
    CHECK(doc["state"] == std::string(core::to_string(item.state)));
}

TEST_CASE("canonical bytes match an independent encoder") {
    TempDir dir;
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
        auto item = testing::random_item(rng, i);
        auto path = dir / ("doc" + std::to_string(i) + ".json");
        testing::write_file(path, serialize_item(item));
        auto expected = testing::python_canonical(path);
        REQUIRE_FALSE(expected.empty());
        CHECK(testing::slurp(path) == expected);
    }
}

TEST_CASE("strict decoding") {
    std::mt19937_64 rng(2);
    auto item = testing::random_item(rng, 0);
    auto doc = json::parse(serialize_item(item));

    auto extra = doc;
    extra["surprise"] = 1;
    CHECK(code_of([&] { deserialize_item(extra.dump()); }) == ErrorCode::SerializationFailure);

    auto missing = doc;
    missing.erase("state");
    try {
        deserialize_item(missing.dump());
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SerializationFailure);
        CHECK(std::string(e.what()).find("state") != std::string::npos);
    }

    auto future = doc;
    future["schema_version"] = kItemSchemaVersion + 1;
    future.erase("form");
    CHECK(code_of([&] { deserialize_item(future.dump()); }) == ErrorCode::SchemaMismatch);

    auto bad_state = doc;
    bad_state["state"] = "Done";
    CHECK(code_of([&] { deserialize_item(bad_state.dump()); }) == ErrorCode::SerializationFailure);
    CHECK(code_of([&] { deserialize_item("{not json"); }) == ErrorCode::SerializationFailure);

    auto bad_utf8 = item;
    bad_utf8.name = "\xff\xfe";
    CHECK(code_of([&] { serialize_item(bad_utf8); }) == ErrorCode::SerializationFailure);

    auto wrong_owner = item;
    wrong_owner.form.item_id = "someone-else";
    CHECK(code_of([&] { serialize_item(wrong_owner); }) == ErrorCode::SerializationFailure);
}

TEST_CASE("200 random items round-trip through the workspace") {
    TempDir dir;
    WorkspaceRef ws(dir.path());
    std::mt19937_64 rng(20260101);
    std::vector<core::ItemRecord> items;
    std::map<std::string, std::string> bytes;
    for (int i = 0; i < 200; ++i) {
        items.push_back(testing::random_item(rng, i));
        auto rel = save_item(items.back(), ws);
        CHECK(rel == items.back().project + "/" + item_file_name(items.back()));
        bytes[rel] = testing::slurp(dir / rel);
    }
    auto loaded = load_workspace(ws);
    CHECK(loaded.diagnostics.empty());
    REQUIRE(loaded.items.size() == items.size());
    std::sort(items.begin(), items.end(), [](auto& a, auto& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < items.size(); ++i) {
        CHECK(loaded.items[i] == items[i]);
        auto rel = items[i].project + "/" + item_file_name(items[i]);
        CHECK(serialize_item(loaded.items[i]) == bytes[rel]);
    }
}

TEST_CASE("scan finds exactly the saved items in random project trees") {
    std::mt19937_64 rng(77);
    for (int round = 0; round < 5; ++round) {
        TempDir dir;
        WorkspaceRef ws(dir.path());
        std::set<std::string> saved;
        for (int i = 0; i < 30; ++i) {
            auto item = testing::random_item(rng, i);
            std::string project = "r" + std::to_string(rng() % 4);
            for (auto depth = rng() % 3; depth; --depth) project += "/d" + std::to_string(rng() % 3);
            item.project = project;
            save_item(item, ws);
            saved.insert(item.id);
        }
        testing::write_file(dir / "r0/notes.json", "{}");
        testing::write_file(dir / "r0/.hidden/x_t.item.json", "garbage");
        testing::write_file(dir / ".local/j1/y_t.item.json", "garbage");
        auto loaded = load_workspace(ws);
        CHECK(loaded.diagnostics.empty());
        std::set<std::string> found;
        for (const auto& item : loaded.items) found.insert(item.id);
        CHECK(found == saved);
    }
}

TEST_CASE("malformed documents are skipped with a diagnostic") {
    TempDir dir;
    WorkspaceRef ws(dir.path());
    std::mt19937_64 rng(3);
    auto good = testing::random_item(rng, 1);
    good.project = "p";
    save_item(good, ws);
    testing::write_file(dir / "p/broken_t.item.json", "{\"id\": ");
    auto misnamed = testing::random_item(rng, 2);
    misnamed.project = "p";
    testing::write_file(dir / "p/wrongname_t.item.json", serialize_item(misnamed));
    auto moved = testing::random_item(rng, 3);
    moved.project = "elsewhere";
    testing::write_file(dir / ("p/" + item_file_name(moved)), serialize_item(moved));
    auto twin = good;
    twin.project = "q";
    save_item(twin, ws);

    auto loaded = load_workspace(ws);
    REQUIRE(loaded.items.size() == 1);
    CHECK(loaded.items[0] == good);
    CHECK(loaded.diagnostics.size() == 4);
}

TEST_CASE("descriptor files load sorted and validated") {
    TempDir dir;
    WorkspaceRef ws(dir.path());
    auto a = testing::simple_descriptor("bbb", {"x"});
    auto b = testing::simple_descriptor("aaa", {"y"});
    testing::write_file(dir / ".items/one.descriptor.json", serialize_descriptor(a));
    testing::write_file(dir / ".items/two.descriptor.json", serialize_descriptor(b));
    auto bad = testing::simple_descriptor("ccc", {"z"});
    bad.form_template.groups[0].entries.push_back({"c", core::EntryKind::Choice, "", std::nullopt, false, ""});
    testing::write_file(dir / ".items/three.descriptor.json", serialize_descriptor(bad));
    testing::write_file(dir / ".items/dup.descriptor.json", serialize_descriptor(a));
    testing::write_file(dir / ".items/ignored.json", "nope");

    auto loaded = load_descriptors(ws);
    REQUIRE(loaded.descriptors.size() == 2);
    CHECK(loaded.descriptors[0] == b);
    CHECK(loaded.descriptors[1] == a);
    CHECK(loaded.diagnostics.size() == 2);
    CHECK(serialize_descriptor(deserialize_descriptor(serialize_descriptor(a))) == serialize_descriptor(a));
    CHECK(check_descriptor(bad).size() == 1);
}

TEST_CASE("killing a writer mid-save never leaves a truncated item file") {
    TempDir dir;
    WorkspaceRef ws(dir.path());
    std::mt19937_64 rng(99);
    // Big documents make the write window wide enough to be hit.
    std::vector<core::ItemRecord> versions;
    for (int v = 0; v < 4; ++v) {
        auto item = testing::random_item(rng, 0);
        item.id = "crash-target";
        item.form.item_id = item.id;
        item.type_id = "t";
        item.project = "p";
        item.form.description = std::string(200000 + v * 1000, 'a' + v);
        versions.push_back(item);
    }
    std::set<std::string> complete;
    for (const auto& v : versions) complete.insert(serialize_item(v));
    auto target = dir / ("p/" + item_file_name(versions[0]));

    int observed = 0;
    for (int round = 0; round < 25; ++round) {
        pid_t pid = ::fork();
        REQUIRE(pid >= 0);
        if (pid == 0) {
            for (int i = 0;; ++i) save_item(versions[i % versions.size()], ws);
        }
        std::this_thread::sleep_for(std::chrono::microseconds(500 + rng() % 20000));
        ::kill(pid, SIGKILL);
        int status = 0;
        ::waitpid(pid, &status, 0);
        if (std::filesystem::exists(target)) {
            ++observed;
            CHECK(complete.count(testing::slurp(target)) == 1);
        }
    }
    CHECK(observed > 0);
    auto loaded = load_workspace(ws);
    CHECK(loaded.diagnostics.empty());
    REQUIRE(loaded.items.size() == 1);
    CHECK(complete.count(serialize_item(loaded.items[0])) == 1);
}
