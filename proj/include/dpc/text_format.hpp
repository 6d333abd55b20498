// SPDX-License-Identifier: Apache-2.0
#pragma once

// Canonical line-oriented text forms. Grammar (one item per line):
//
//   scalar      := int | string | "true" | "false"
//   int         := ["-"] digit+
//   string      := '"' { char | '\"' | '\\' | '\n' | '\t' } '"'
//   expr        := ident | scalar | "(" op expr expr ")" | "(" "not" expr ")"
//   op          := "+" | "-" | "*" | "div" | "=" | "!=" | "<" | ">" | "<="
//                | ">=" | "and" | "or"
//   map line    := "map" { ident expr }
//   filter line := "filter" expr
//   row line    := "row" string { ident scalar }
//
// A transform is zero or more map/filter lines; a collection is zero or more
// row lines sorted by key, fields sorted by name. Blank lines and lines
// starting with '#' are ignored by the parsers.

#include <cstdint>
#include <string>
#include <string_view>

#include "dpc/expr.hpp"
#include "dpc/transform.hpp"
#include "dpc/value.hpp"

namespace dpc {

std::string to_text(const Scalar& s);
std::string to_text(const Expr& e);
/// Serialized field content, e.g. `a 1 b "x"`; the merge tie-break compares these.
std::string to_text(const Fields& fields);
std::string to_text(const Transform& t);
std::string to_text(const CollectionValue& c);

Scalar parse_scalar(std::string_view text);
Expr parse_expr(std::string_view text);
Transform parse_transform(std::string_view text);
CollectionValue parse_collection(std::string_view text);

bool is_identifier(std::string_view name) noexcept;

namespace text {

/// Token cursor over one line, shared by the record parsers.
class Cursor {
 public:
  explicit Cursor(std::string_view line) : line_(line) {}

  bool at_end();
  /// Next bare word (identifier, operator or number) without consuming.
  std::string_view peek_word();
  std::string_view word();
  void expect(std::string_view word);
  Scalar scalar();
  Expr expr();
  std::string string_literal();
  std::uint64_t unsigned_number();

 private:
  void skip_space();
  [[noreturn]] void fail(const std::string& what);

  std::string_view line_;
  std::size_t pos_ = 0;
};

/// Appends a transform's lines to `out`.
void append_lines(std::string& out, const Transform& t);
/// Parses one map/filter line into a step.
Step parse_step(std::string_view line);

}  // namespace text

}  // namespace dpc
