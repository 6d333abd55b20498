// SPDX-License-Identifier: Apache-2.0
#include "dpc/expr.hpp"

#include "dpc/error.hpp"

namespace dpc {

const char* to_string(BinaryOp op) noexcept {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "div";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "and";
    case BinaryOp::Or: return "or";
  }
  return "?";
}

Expr::Expr() : Expr(std::make_shared<const Node>(Literal{Scalar{}})) {}

Expr Expr::field(std::string name) {
  return Expr(std::make_shared<const Node>(FieldRef{std::move(name)}));
}
Expr Expr::literal(Scalar value) {
  return Expr(std::make_shared<const Node>(Literal{std::move(value)}));
}
Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const Node>(Binary{op, std::move(lhs), std::move(rhs)}));
}
Expr Expr::negate(Expr operand) {
  return Expr(std::make_shared<const Node>(Not{std::move(operand)}));
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.index() != y.index()) return false;
  return std::visit(
      [&](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(y);
        if constexpr (std::is_same_v<T, Expr::Binary>) {
          return lhs.op == rhs.op && lhs.lhs == rhs.lhs && lhs.rhs == rhs.rhs;
        } else if constexpr (std::is_same_v<T, Expr::Not>) {
          return lhs.operand == rhs.operand;
        } else {
          return lhs == rhs;
        }
      },
      x);
}

namespace {

void collect_fields(const Expr& e, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::FieldRef>) {
          out.insert(n.name);
        } else if constexpr (std::is_same_v<T, Expr::Binary>) {
          collect_fields(n.lhs, out);
          collect_fields(n.rhs, out);
        } else if constexpr (std::is_same_v<T, Expr::Not>) {
          collect_fields(n.operand, out);
        }
      },
      e.node());
}

[[noreturn]] void mismatch(BinaryOp op, const Scalar& a, const Scalar& b) {
  raise(ErrorCode::TypeMismatch, std::string(to_string(op)) + " on " +
                                     to_string(a.kind()) + ", " +
                                     to_string(b.kind()));
}

Scalar arithmetic(BinaryOp op, const Scalar& a, const Scalar& b) {
  if (!a.is_int() || !b.is_int()) mismatch(op, a, b);
  const std::int64_t x = a.as_int();
  const std::int64_t y = b.as_int();
  std::int64_t r = 0;
  bool overflow = false;
  switch (op) {
    case BinaryOp::Add: overflow = __builtin_add_overflow(x, y, &r); break;
    case BinaryOp::Sub: overflow = __builtin_sub_overflow(x, y, &r); break;
    case BinaryOp::Mul: overflow = __builtin_mul_overflow(x, y, &r); break;
    case BinaryOp::Div:
      if (y == 0) raise(ErrorCode::DivisionByZero, "div by zero");
      if (x == INT64_MIN && y == -1) overflow = true;
      else r = x / y;
      break;
    default: break;
  }
  if (overflow) raise(ErrorCode::Overflow, to_string(op));
  return r;
}

Scalar comparison(BinaryOp op, const Scalar& a, const Scalar& b) {
  if (a.kind() != b.kind()) mismatch(op, a, b);
  int c = 0;
  switch (a.kind()) {
    case ScalarKind::Int:
      c = a.as_int() < b.as_int() ? -1 : (a.as_int() > b.as_int() ? 1 : 0);
      break;
    case ScalarKind::Text: {
      const int t = a.as_text().compare(b.as_text());
      c = t < 0 ? -1 : (t > 0 ? 1 : 0);
      break;
    }
    case ScalarKind::Bool:
      c = int(a.as_bool()) - int(b.as_bool());
      break;
  }
  switch (op) {
    case BinaryOp::Eq: return c == 0;
    case BinaryOp::Ne: return c != 0;
    case BinaryOp::Lt: return c < 0;
    case BinaryOp::Gt: return c > 0;
    case BinaryOp::Le: return c <= 0;
    case BinaryOp::Ge: return c >= 0;
    default: break;
  }
  return false;
}

}  // namespace

std::set<std::string> Expr::fields() const {
  std::set<std::string> out;
  collect_fields(*this, out);
  return out;
}

Scalar eval_expr(const Expr& e, const Fields& row) {
  return std::visit(
      [&](const auto& n) -> Scalar {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::FieldRef>) {
          auto it = row.find(n.name);
          if (it == row.end()) raise(ErrorCode::MissingField, n.name);
          return it->second;
        } else if constexpr (std::is_same_v<T, Expr::Literal>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, Expr::Not>) {
          Scalar v = eval_expr(n.operand, row);
          if (!v.is_bool()) {
            raise(ErrorCode::TypeMismatch,
                  std::string("not on ") + to_string(v.kind()));
          }
          return !v.as_bool();
        } else {
          // Both operands are always evaluated; and/or do not short-circuit.
          Scalar a = eval_expr(n.lhs, row);
          Scalar b = eval_expr(n.rhs, row);
          switch (n.op) {
            case BinaryOp::Add:
            case BinaryOp::Sub:
            case BinaryOp::Mul:
            case BinaryOp::Div:
              return arithmetic(n.op, a, b);
            case BinaryOp::And:
            case BinaryOp::Or:
              if (!a.is_bool() || !b.is_bool()) mismatch(n.op, a, b);
              return n.op == BinaryOp::And ? (a.as_bool() && b.as_bool())
                                           : (a.as_bool() || b.as_bool());
            default:
              return comparison(n.op, a, b);
          }
        }
      },
      e.node());
}

}  // namespace dpc
