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

#include "forgeflow/server/server.hpp"

#include <httplib.h>

#include <charconv>
#include <chrono>

#include "forgeflow/error.hpp"
#include "forgeflow/items/builtin.hpp"
#include "forgeflow/persistence/codec.hpp"

namespace forgeflow::server {

using persistence::json;

namespace {

constexpr auto kStreamPoll = std::chrono::milliseconds(200);
constexpr const char* kJson = "application/json";

struct BadRequest : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

void reply_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
    reply(res, status, json{{"error", code}, {"message", message}});
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    json doc = json::parse(req.body, nullptr, false);
    if (doc.is_discarded()) throw BadRequest("request body is not valid JSON");
    if (!doc.is_object()) throw BadRequest("request body must be a JSON object");
    return doc;
}

std::string string_field(const json& body, const char* key, bool required) {
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) {
        if (required) throw BadRequest(std::string("missing field '") + key + "'");
        return {};
    }
    if (!it->is_string()) throw BadRequest(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

// Wraps a handler so engine errors become JSON error responses.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const Error& e) {
            reply_error(res, http_status(e.code()), to_string(e.code()), e.what());
        } catch (const BadRequest& e) {
            reply_error(res, 400, "BadRequest", e.what());
        } catch (const json::exception& e) {
            reply_error(res, 400, "BadRequest", e.what());
        } catch (const std::exception& e) {
            reply_error(res, 500, "InternalError", e.what());
        }
    };
}

// Latest handle of a job, or one rebuilt from its events.log when the job
// ran under an earlier process.
json job_document(core::Engine& engine, const core::ItemRecord& item) {
    const auto& job_id = item.last_job_id;
    if (job_id.empty()) return nullptr;
    try {
        return exec::to_json(engine.jobs().poll(job_id));
    } catch (const Error& e) {
        if (e.code() != ErrorCode::UnknownJob) throw;
    }
    std::vector<exec::JobEvent> events;
    try {
        events = engine.jobs().stream_events(job_id, 0).drain();
    } catch (const Error&) {
        return json{{"job_id", job_id}, {"status", nullptr}};
    }
    exec::JobHandle h;
    h.job_id = job_id;
    h.job_dir = item.project + "/" + job_id;
    if (!events.empty()) h.started_at = events.front().timestamp;
    for (const auto& ev : events) {
        if (ev.kind != exec::EventKind::Status) continue;
        auto colon = ev.payload.find(':');
        h.status = exec::parse_job_status(ev.payload.substr(0, colon));
        h.message = colon == std::string::npos ? std::string() : ev.payload.substr(colon + 2);
        if (exec::is_terminal(h.status)) h.ended_at = ev.timestamp;
    }
    // Exit codes are only in the log as the Failed detail.
    if (h.status == exec::JobStatus::Finished) h.exit_code = 0;
    constexpr std::string_view kExit = "exit code ";
    if (h.status == exec::JobStatus::Failed && h.message.rfind(kExit, 0) == 0) {
        int code = 0;
        auto tail = h.message.substr(kExit.size());
        auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), code);
        if (ec == std::errc() && ptr == tail.data() + tail.size()) h.exit_code = code;
    }
    return exec::to_json(h);
}

}  // namespace

json status_document(core::Engine& engine, const std::string& item_id) {
    auto item = engine.get_item(item_id);
    return json{{"item_id", item.id},
                {"state", core::to_string(item.state)},
                {"status_message", item.status_message},
                {"job", job_document(engine, item)}};
}

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownItem:
        case ErrorCode::UnknownType:
        case ErrorCode::UnknownJob:
            return 404;
        case ErrorCode::WrongState:
        case ErrorCode::IllegalTransition:
        case ErrorCode::AlreadyExists:
        case ErrorCode::UnknownAction:
            return 409;
        case ErrorCode::InvalidProject:
        case ErrorCode::InvalidName:
        case ErrorCode::InvalidArgument:
        case ErrorCode::InvalidDescriptor:
        case ErrorCode::SerializationFailure:
        case ErrorCode::SchemaMismatch:
        case ErrorCode::PathEscape:
            return 400;
        default:
            return 500;
    }
}

Server::Server(ApiConfig cfg) : cfg_(std::move(cfg)) {
    owned_ = items::open_engine({cfg_.workspace_root, cfg_.id_seed});
    engine_ = owned_.get();
    install_routes();
}

Server::Server(ApiConfig cfg, core::Engine& engine) : cfg_(std::move(cfg)), engine_(&engine) {
    install_routes();
}

Server::~Server() { stop(); }

void Server::install_routes() {
    http_ = std::make_unique<httplib::Server>();
    http_->new_task_queue = [] { return new httplib::ThreadPool(64); };
    // No SO_REUSEPORT: a second server on a taken port must fail to bind.
    http_->set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });

    auto token = cfg_.auth_token;
    http_->set_pre_routing_handler([token](const httplib::Request& req, httplib::Response& res) {
        if (!token || req.path == "/health") return httplib::Server::HandlerResponse::Unhandled;
        if (req.get_header_value("Authorization") == "Bearer " + *token) {
            return httplib::Server::HandlerResponse::Unhandled;
        }
        reply_error(res, 401, "Unauthorized", "missing or wrong bearer token");
        return httplib::Server::HandlerResponse::Handled;
    });

    auto& engine = *engine_;

    http_->Get("/health", guarded([](const httplib::Request&, httplib::Response& res) {
                   reply(res, 200, json{{"status", "ok"}});
               }));

    http_->Get("/types", guarded([&engine](const httplib::Request&, httplib::Response& res) {
                   json out = json::array();
                   for (const auto& t : engine.list_item_types()) {
                       out.push_back({{"type_id", t.type_id}, {"display_name", t.display_name}});
                   }
                   reply(res, 200, out);
               }));

    http_->Post("/items", guarded([&engine](const httplib::Request& req, httplib::Response& res) {
                    auto body = parse_body(req);
                    core::CreateOptions options;
                    if (body.contains("id")) options.id = string_field(body, "id", true);
                    if (body.contains("name")) options.name = string_field(body, "name", true);
                    auto item = engine.create_item(string_field(body, "type_id", true),
                                                   string_field(body, "project", false), options);
                    reply(res, 201, persistence::to_json(item));
                }));

    http_->Get("/items", guarded([&engine](const httplib::Request&, httplib::Response& res) {
                   json out = json::array();
                   for (const auto& item : engine.list_items()) out.push_back(persistence::to_json(item));
                   reply(res, 200, out);
               }));

    http_->Get(R"(/items/([^/]+))", guarded([&engine](const httplib::Request& req, httplib::Response& res) {
                   reply(res, 200, persistence::to_json(engine.get_item(req.matches[1])));
               }));

    http_->Get(R"(/items/([^/]+)/form)", guarded([&engine](const httplib::Request& req, httplib::Response& res) {
                   reply(res, 200, persistence::to_json(engine.get_item(req.matches[1]).form));
               }));

    http_->Put(R"(/items/([^/]+)/form)", guarded([&engine](const httplib::Request& req, httplib::Response& res) {
                   auto form = persistence::form_from_json(parse_body(req));
                   auto status = engine.review_form(req.matches[1], form);
                   reply(res, status.accepted() ? 200 : 422, persistence::to_json(status));
               }));

    http_->Post(R"(/items/([^/]+)/process)",
                guarded([&engine](const httplib::Request& req, httplib::Response& res) {
                    auto body = parse_body(req);
                    auto ticket = engine.process_item(req.matches[1], string_field(body, "action", true));
                    reply(res, 200, json{{"ticket_id", ticket.ticket_id}, {"item_id", ticket.item_id}});
                }));

    http_->Post(R"(/items/([^/]+)/cancel)",
                guarded([&engine](const httplib::Request& req, httplib::Response& res) {
                    auto state = engine.cancel_item(req.matches[1]);
                    reply(res, 200, json{{"item_id", req.matches[1]}, {"state", core::to_string(state)}});
                }));

    http_->Get(R"(/items/([^/]+)/status)",
               guarded([&engine](const httplib::Request& req, httplib::Response& res) {
                   reply(res, 200, status_document(engine, req.matches[1]));
               }));

    http_->Get(R"(/jobs/([^/]+)/events)",
               guarded([this, &engine](const httplib::Request& req, httplib::Response& res) {
                   std::uint64_t from = 0;
                   if (req.has_param("from_seq")) {
                       auto text = req.get_param_value("from_seq");
                       auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), from);
                       if (ec != std::errc() || ptr != text.data() + text.size()) {
                           throw BadRequest("from_seq must be a non-negative integer");
                       }
                   }
                   auto stream = std::make_shared<exec::EventStream>(engine.jobs().stream_events(req.matches[1], from));
                   res.status = 200;
                   res.set_header("Cache-Control", "no-cache");
                   res.set_chunked_content_provider(
                       "text/event-stream", [this, stream](std::size_t, httplib::DataSink& sink) {
                           while (!stopping_) {
                               auto ev = stream->next(kStreamPoll);
                               if (ev) {
                                   auto frame = "data: " + exec::event_line(*ev) + "\n\n";
                                   if (!sink.write(frame.data(), frame.size())) return false;
                                   continue;
                               }
                               if (stream->done()) {
                                   sink.done();
                                   return true;
                               }
                               if (!sink.is_writable()) return false;
                           }
                           return false;
                       });
               }));
}

int Server::start() {
    if (listener_.joinable()) return port_;
    if (cfg_.port == 0) {
        port_ = http_->bind_to_any_port(cfg_.bind_address);
    } else {
        port_ = http_->bind_to_port(cfg_.bind_address, cfg_.port) ? cfg_.port : -1;
    }
    if (port_ < 0) {
        throw Error(ErrorCode::BindFailure, cfg_.bind_address + ":" + std::to_string(cfg_.port));
    }
    listener_ = std::thread([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
    return port_;
}

void Server::run() {
    start();
    listener_.join();
}

void Server::stop() {
    stopping_ = true;
    if (http_) http_->stop();
    if (listener_.joinable()) listener_.join();
}

}  // namespace forgeflow::server
