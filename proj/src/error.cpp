// SPDX-License-Identifier: Apache-2.0
#include "dpc/error.hpp"

#include <cstdio>

#include "dpc/ids.hpp"

namespace dpc {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::UnknownProcess: return "UnknownProcess";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::PathInvalidated: return "PathInvalidated";
    case ErrorCode::NotContracted: return "NotContracted";
    case ErrorCode::InvalidInterval: return "InvalidInterval";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownSource: return "UnknownSource";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ShutDown: return "ShutDown";
  }
  return "Unknown";
}

namespace {
template <class Tag>
std::string render(char prefix, Id<Tag> id) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%c%llu-%04x", prefix,
                static_cast<unsigned long long>(id.seq()),
                static_cast<unsigned>(id.salt()));
  return buf;
}
}  // namespace

std::string to_string(VariableId id) { return render('v', id); }
std::string to_string(ProcessId id) { return render('p', id); }
std::string to_string(UserId id) { return render('u', id); }
std::string to_string(EndpointId id) { return render('e', id); }
std::string to_string(ContractionId id) { return render('c', id); }

}  // namespace dpc
