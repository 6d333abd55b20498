// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <set>
#include <string>
#include <variant>

#include "dpc/value.hpp"

namespace dpc {

enum class BinaryOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Gt, Le, Ge, And, Or };

const char* to_string(BinaryOp op) noexcept;

/// Immutable element-level expression tree. Copies share structure.
class Expr {
 public:
  struct FieldRef;
  struct Literal;
  struct Binary;
  struct Not;
  using Node = std::variant<FieldRef, Literal, Binary, Not>;

  Expr();

  static Expr field(std::string name);
  static Expr literal(Scalar value);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  static Expr negate(Expr operand);

  const Node& node() const noexcept;

  /// Names of all fields the expression references.
  std::set<std::string> fields() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

struct Expr::FieldRef {
  std::string name;
  friend bool operator==(const FieldRef&, const FieldRef&) = default;
};
struct Expr::Literal {
  Scalar value;
  friend bool operator==(const Literal&, const Literal&) = default;
};
struct Expr::Binary {
  BinaryOp op;
  Expr lhs;
  Expr rhs;
};
struct Expr::Not {
  Expr operand;
};

inline const Expr::Node& Expr::node() const noexcept { return *node_; }

/// Evaluates `e` against a row's fields. Throws dpc::Error with
/// MissingField, TypeMismatch, DivisionByZero or Overflow.
Scalar eval_expr(const Expr& e, const Fields& row);
inline Scalar eval_expr(const Expr& e, const Row& row) {
  return eval_expr(e, row.fields);
}

/// Terse builders, mostly for tests and the SQL compiler.
namespace ex {
inline Expr f(std::string name) { return Expr::field(std::move(name)); }
inline Expr lit(Scalar v) { return Expr::literal(std::move(v)); }
inline Expr add(Expr a, Expr b) { return Expr::binary(BinaryOp::Add, std::move(a), std::move(b)); }
inline Expr sub(Expr a, Expr b) { return Expr::binary(BinaryOp::Sub, std::move(a), std::move(b)); }
inline Expr mul(Expr a, Expr b) { return Expr::binary(BinaryOp::Mul, std::move(a), std::move(b)); }
inline Expr div(Expr a, Expr b) { return Expr::binary(BinaryOp::Div, std::move(a), std::move(b)); }
inline Expr eq(Expr a, Expr b) { return Expr::binary(BinaryOp::Eq, std::move(a), std::move(b)); }
inline Expr ne(Expr a, Expr b) { return Expr::binary(BinaryOp::Ne, std::move(a), std::move(b)); }
inline Expr lt(Expr a, Expr b) { return Expr::binary(BinaryOp::Lt, std::move(a), std::move(b)); }
inline Expr gt(Expr a, Expr b) { return Expr::binary(BinaryOp::Gt, std::move(a), std::move(b)); }
inline Expr le(Expr a, Expr b) { return Expr::binary(BinaryOp::Le, std::move(a), std::move(b)); }
inline Expr ge(Expr a, Expr b) { return Expr::binary(BinaryOp::Ge, std::move(a), std::move(b)); }
inline Expr and_(Expr a, Expr b) { return Expr::binary(BinaryOp::And, std::move(a), std::move(b)); }
inline Expr or_(Expr a, Expr b) { return Expr::binary(BinaryOp::Or, std::move(a), std::move(b)); }
inline Expr not_(Expr a) { return Expr::negate(std::move(a)); }
}  // namespace ex

}  // namespace dpc
