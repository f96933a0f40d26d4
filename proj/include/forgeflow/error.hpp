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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace forgeflow {

enum class ErrorCode {
    IllegalTransition,
    InvalidDescriptor,
    UnknownType,
    InvalidProject,
    UnknownItem,
    WrongState,
    UnknownAction,
    IoFailure,
    SerializationFailure,
    SchemaMismatch,
    PathEscape,
    MissingInput,
    StagingConflict,
    TransportFailure,
    UnknownConnector,
    SpawnFailure,
    UnknownJob,
    UnknownPlaceholder,
    MalformedCsv,
    DuplicateDest,
    AlreadyExists,
    InvalidName,
    InvalidArgument,
    BindFailure,
    WorkspaceFailure,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::IllegalTransition: return "IllegalTransition";
        case ErrorCode::InvalidDescriptor: return "InvalidDescriptor";
        case ErrorCode::UnknownType: return "UnknownType";
        case ErrorCode::InvalidProject: return "InvalidProject";
        case ErrorCode::UnknownItem: return "UnknownItem";
        case ErrorCode::WrongState: return "WrongState";
        case ErrorCode::UnknownAction: return "UnknownAction";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::SerializationFailure: return "SerializationFailure";
        case ErrorCode::SchemaMismatch: return "SchemaMismatch";
        case ErrorCode::PathEscape: return "PathEscape";
        case ErrorCode::MissingInput: return "MissingInput";
        case ErrorCode::StagingConflict: return "StagingConflict";
        case ErrorCode::TransportFailure: return "TransportFailure";
        case ErrorCode::UnknownConnector: return "UnknownConnector";
        case ErrorCode::SpawnFailure: return "SpawnFailure";
        case ErrorCode::UnknownJob: return "UnknownJob";
        case ErrorCode::UnknownPlaceholder: return "UnknownPlaceholder";
        case ErrorCode::MalformedCsv: return "MalformedCsv";
        case ErrorCode::DuplicateDest: return "DuplicateDest";
        case ErrorCode::AlreadyExists: return "AlreadyExists";
        case ErrorCode::InvalidName: return "InvalidName";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::BindFailure: return "BindFailure";
        case ErrorCode::WorkspaceFailure: return "WorkspaceFailure";
    }
    return "Unknown";
}

/// Every failure surfaced by the engine carries one of the codes above; the
/// message is meant for humans, the code for callers that branch on it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace forgeflow
