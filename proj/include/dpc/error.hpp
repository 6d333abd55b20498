// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace dpc {

enum class ErrorCode {
  MissingField,
  TypeMismatch,
  DivisionByZero,
  Overflow,
  ParseError,
  UnknownVariable,
  UnknownProcess,
  UnknownVertex,
  CycleDetected,
  InvalidSpec,
  PathInvalidated,
  NotContracted,
  InvalidInterval,
  SyntaxError,
  UnknownSource,
  UnknownColumn,
  ConfigError,
  IoError,
  EmptyInput,
  ShutDown,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace dpc
