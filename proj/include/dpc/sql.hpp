// SPDX-License-Identifier: Apache-2.0
#pragma once

// A small SQL dialect compiled to dataflow processes:
//
//   CREATE TABLE t (c1, c2, ...);
//   CREATE VIEW v AS SELECT <cols> FROM <src> [WHERE <pred>];
//   INSERT INTO t (<key>, c1 = <literal>, ...);
//   SELECT <cols> FROM <src> [WHERE <pred>];
//
// The final `;` is optional. <cols> is `*` or a comma list of `column` /
// `expr AS name`. Keywords are case-insensitive, strings use single quotes
// ('' escapes a quote), `--` starts a line comment. Operators: + - * / DIV = != <> < > <= >= AND OR NOT.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dpc/expr.hpp"
#include "dpc/runtime.hpp"
#include "dpc/transform.hpp"

namespace dpc::sql {

struct Projection {
  std::string name;
  Expr expr;
  friend bool operator==(const Projection&, const Projection&) = default;
};

struct Select {
  bool star = false;
  std::vector<Projection> columns;
  std::string source;
  std::optional<Expr> where;
  friend bool operator==(const Select&, const Select&) = default;
};

struct CreateTable {
  std::string name;
  std::vector<std::string> columns;
  friend bool operator==(const CreateTable&, const CreateTable&) = default;
};

struct CreateView {
  std::string name;
  Select body;
  friend bool operator==(const CreateView&, const CreateView&) = default;
};

struct InsertRow {
  std::string table;
  std::string key;
  std::vector<std::pair<std::string, Scalar>> values;
  friend bool operator==(const InsertRow&, const InsertRow&) = default;
};

struct SelectQuery {
  Select body;
  friend bool operator==(const SelectQuery&, const SelectQuery&) = default;
};

using Statement = std::variant<CreateTable, CreateView, InsertRow, SelectQuery>;

/// Parses a script. Throws SyntaxError naming the line and what was expected.
std::vector<Statement> parse_sql(std::string_view text);

struct Relation {
  std::vector<std::string> columns;
  VariableId var;
  bool is_table = true;
  // Views only.
  std::string source;
  std::optional<VariableId> filtered;  // output of the WHERE process
  Transform transform;                 // WHERE then projection
};

/// Compiles statements against a runtime, keeping the schema.
class Session {
 public:
  explicit Session(Runtime& rt);

  /// Runs every statement; returns the result of each SELECT in order.
  std::vector<CollectionValue> execute_script(std::string_view text);
  /// Returns rows for a SELECT, nothing otherwise. Throws UnknownSource,
  /// UnknownColumn.
  std::optional<CollectionValue> execute(const Statement& s);

  const std::map<std::string, Relation, std::less<>>& schema() const { return schema_; }
  const Relation& relation(std::string_view name) const;

  /// Variable names for DOT output; WHERE outputs are "<view>.where".
  const std::map<VariableId, std::string>& names() const { return names_; }

  struct Lineage {
    std::string table;
    std::vector<VariableId> chain;  // table ... view
    Transform transform;            // table rows to view rows
  };
  /// The base table a view derives from and the composed transform.
  Lineage lineage(std::string_view view) const;

  void insert(std::string_view table, std::string key, Fields fields);

 private:
  const Relation& source_of(const Select& s) const;
  void check_columns(const Select& s, const Relation& src) const;
  std::vector<std::string> output_columns(const Select& s, const Relation& src) const;
  Transform projection(const Select& s) const;

  Runtime& rt_;
  UserId user_;
  std::map<std::string, Relation, std::less<>> schema_;
  std::map<VariableId, std::string> names_;
};

}  // namespace dpc::sql
