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

#include "forgeflow/exec/event_log.hpp"

#include <sstream>

#include "forgeflow/error.hpp"
#include "forgeflow/util/text.hpp"

namespace forgeflow::exec {

namespace {

// Payloads come straight from child processes; keep them valid UTF-8 so the
// in-memory event and its events.log line always agree.
std::string sanitize_utf8(std::string s) {
    auto dumped = nlohmann::json(s).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    return nlohmann::json::parse(dumped).get<std::string>();
}

}  // namespace

EventLog::EventLog(std::string job_id, const std::filesystem::path& log_file)
    : job_id_(std::move(job_id)) {
    std::filesystem::create_directories(log_file.parent_path());
    file_.open(log_file, std::ios::binary | std::ios::trunc);
    if (!file_) throw Error(ErrorCode::IoFailure, "cannot open " + log_file.string());
}

std::shared_ptr<EventLog> EventLog::replay(const std::filesystem::path& log_file) {
    std::ifstream in(log_file, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + log_file.string());
    std::shared_ptr<EventLog> log(new EventLog());
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            auto e = event_from_json(nlohmann::json::parse(line));
            if (log->job_id_.empty()) log->job_id_ = e.job_id;
            if (e.seq != log->events_.size()) break;
            log->events_.push_back(std::move(e));
        } catch (const std::exception&) {
            break;  // torn tail
        }
    }
    log->closed_ = true;
    return log;
}

JobEvent EventLog::append(EventKind kind, std::string payload) {
    std::lock_guard lock(mutex_);
    if (closed_) throw Error(ErrorCode::InvalidArgument, "event log for " + job_id_ + " is closed");
    JobEvent e{job_id_, events_.size(), kind, sanitize_utf8(std::move(payload)), util::utc_timestamp()};
    if (file_.is_open()) {
        file_ << event_line(e) << '\n';
        file_.flush();
    }
    events_.push_back(e);
    cv_.notify_all();
    return e;
}

void EventLog::close() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    if (file_.is_open()) file_.close();
    cv_.notify_all();
}

bool EventLog::closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
}

std::uint64_t EventLog::size() const {
    std::lock_guard lock(mutex_);
    return events_.size();
}

std::optional<JobEvent> EventLog::wait_for(std::uint64_t seq, std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mutex_);
    cv_.wait_for(lock, timeout, [&] { return seq < events_.size() || closed_; });
    if (seq < events_.size()) return events_[seq];
    return std::nullopt;
}

std::vector<JobEvent> EventLog::snapshot(std::uint64_t from_seq) const {
    std::lock_guard lock(mutex_);
    if (from_seq >= events_.size()) return {};
    return {events_.begin() + static_cast<std::ptrdiff_t>(from_seq), events_.end()};
}

std::optional<JobEvent> EventStream::next(std::chrono::milliseconds timeout) {
    auto e = log_->wait_for(cursor_, timeout);
    if (e) ++cursor_;
    return e;
}

bool EventStream::done() const { return log_->closed() && cursor_ >= log_->size(); }

std::vector<JobEvent> EventStream::drain() {
    std::vector<JobEvent> out;
    while (!done()) {
        if (auto e = next(std::chrono::milliseconds(200))) out.push_back(std::move(*e));
    }
    return out;
}

}  // namespace forgeflow::exec
