// SPDX-License-Identifier: Apache-2.0
#include "dpc/text_format.hpp"

#include <charconv>
#include <optional>

#include "dpc/error.hpp"

namespace dpc {

namespace {

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

void quote(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
}

void append(std::string& out, const Scalar& s) {
  switch (s.kind()) {
    case ScalarKind::Int: out += std::to_string(s.as_int()); break;
    case ScalarKind::Text: quote(out, s.as_text()); break;
    case ScalarKind::Bool: out += s.as_bool() ? "true" : "false"; break;
  }
}

void append(std::string& out, const Expr& e) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::FieldRef>) {
          out += n.name;
        } else if constexpr (std::is_same_v<T, Expr::Literal>) {
          append(out, n.value);
        } else if constexpr (std::is_same_v<T, Expr::Not>) {
          out += "(not ";
          append(out, n.operand);
          out += ')';
        } else {
          out += '(';
          out += to_string(n.op);
          out += ' ';
          append(out, n.lhs);
          out += ' ';
          append(out, n.rhs);
          out += ')';
        }
      },
      e.node());
}

std::optional<BinaryOp> op_from_word(std::string_view w) {
  static constexpr BinaryOp all[] = {
      BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div,
      BinaryOp::Eq,  BinaryOp::Ne,  BinaryOp::Lt,  BinaryOp::Gt,
      BinaryOp::Le,  BinaryOp::Ge,  BinaryOp::And, BinaryOp::Or};
  for (BinaryOp op : all) {
    if (w == to_string(op)) return op;
  }
  return std::nullopt;
}

template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    std::size_t lead = line.find_first_not_of(' ');
    if (lead == std::string_view::npos || line[lead] == '#') continue;
    try {
      fn(line.substr(lead));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ParseError) throw;
      raise(ErrorCode::ParseError,
            "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace

bool is_identifier(std::string_view name) noexcept {
  if (name.empty() || !is_ident_start(name[0])) return false;
  for (char c : name) {
    if (!is_ident_char(c)) return false;
  }
  return name != "true" && name != "false" && name != "not" &&
         name != "and" && name != "or" && name != "div";
}

std::string to_text(const Scalar& s) {
  std::string out;
  append(out, s);
  return out;
}

std::string to_text(const Expr& e) {
  std::string out;
  append(out, e);
  return out;
}

std::string to_text(const Fields& fields) {
  std::string out;
  for (const auto& [name, value] : fields) {
    if (!out.empty()) out += ' ';
    out += name;
    out += ' ';
    append(out, value);
  }
  return out;
}

std::string to_text(const Transform& t) {
  std::string out;
  text::append_lines(out, t);
  return out;
}

std::string to_text(const CollectionValue& c) {
  std::string out;
  for (const auto& [key, fields] : c) {
    out += "row ";
    quote(out, key);
    if (!fields.empty()) {
      out += ' ';
      out += to_text(fields);
    }
    out += '\n';
  }
  return out;
}

Scalar parse_scalar(std::string_view s) {
  text::Cursor cur(s);
  Scalar v = cur.scalar();
  if (!cur.at_end()) raise(ErrorCode::ParseError, "trailing input after scalar");
  return v;
}

Expr parse_expr(std::string_view s) {
  text::Cursor cur(s);
  Expr e = cur.expr();
  if (!cur.at_end()) raise(ErrorCode::ParseError, "trailing input after expression");
  return e;
}

Transform parse_transform(std::string_view s) {
  Transform t;
  for_each_line(s, [&](std::string_view line) { t.steps.push_back(text::parse_step(line)); });
  return t;
}

CollectionValue parse_collection(std::string_view s) {
  CollectionValue c;
  for_each_line(s, [&](std::string_view line) {
    text::Cursor cur(line);
    cur.expect("row");
    Row row{cur.string_literal(), {}};
    while (!cur.at_end()) {
      std::string name(cur.word());
      if (!is_identifier(name)) raise(ErrorCode::ParseError, "bad field name '" + name + "'");
      Scalar v = cur.scalar();
      if (!row.fields.emplace(std::move(name), std::move(v)).second) {
        raise(ErrorCode::ParseError, "duplicate field");
      }
    }
    if (c.contains(row.key)) raise(ErrorCode::ParseError, "duplicate key");
    c.insert(std::move(row));
  });
  return c;
}

namespace text {

void append_lines(std::string& out, const Transform& t) {
  for (const auto& step : t.steps) {
    if (const auto* m = std::get_if<MapStep>(&step)) {
      out += "map";
      for (const auto& [name, e] : m->outputs) {
        out += ' ';
        out += name;
        out += ' ';
        append(out, e);
      }
    } else {
      out += "filter ";
      append(out, std::get<FilterStep>(step).predicate);
    }
    out += '\n';
  }
}

Step parse_step(std::string_view line) {
  Cursor cur(line);
  const std::string_view head = cur.word();
  if (head == "filter") {
    FilterStep f{cur.expr()};
    if (!cur.at_end()) raise(ErrorCode::ParseError, "trailing input after filter");
    return f;
  }
  if (head != "map") {
    raise(ErrorCode::ParseError, "expected 'map' or 'filter', got '" + std::string(head) + "'");
  }
  MapStep m;
  while (!cur.at_end()) {
    std::string name(cur.word());
    if (!is_identifier(name)) raise(ErrorCode::ParseError, "bad output name '" + name + "'");
    Expr e = cur.expr();
    if (!m.outputs.emplace(std::move(name), std::move(e)).second) {
      raise(ErrorCode::ParseError, "duplicate map output");
    }
  }
  return m;
}

void Cursor::skip_space() {
  while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
}

void Cursor::fail(const std::string& what) {
  raise(ErrorCode::ParseError, what + " at column " + std::to_string(pos_ + 1));
}

bool Cursor::at_end() {
  skip_space();
  return pos_ >= line_.size();
}

std::string_view Cursor::peek_word() {
  skip_space();
  std::size_t end = pos_;
  while (end < line_.size() && line_[end] != ' ' && line_[end] != '\t' &&
         line_[end] != '(' && line_[end] != ')' && line_[end] != '"') {
    ++end;
  }
  return line_.substr(pos_, end - pos_);
}

std::string_view Cursor::word() {
  std::string_view w = peek_word();
  if (w.empty()) fail("expected a word");
  pos_ += w.size();
  return w;
}

void Cursor::expect(std::string_view w) {
  if (word() != w) fail("expected '" + std::string(w) + "'");
}

std::string Cursor::string_literal() {
  skip_space();
  if (pos_ >= line_.size() || line_[pos_] != '"') fail("expected string literal");
  ++pos_;
  std::string out;
  while (true) {
    if (pos_ >= line_.size()) fail("unterminated string");
    char c = line_[pos_++];
    if (c == '"') break;
    if (c == '\\') {
      if (pos_ >= line_.size()) fail("dangling escape");
      char e = line_[pos_++];
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        default: fail("unknown escape");
      }
    } else {
      out += c;
    }
  }
  return out;
}

std::uint64_t Cursor::unsigned_number() {
  std::string_view w = word();
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
  if (ec != std::errc{} || ptr != w.data() + w.size()) fail("expected unsigned number");
  return v;
}

Scalar Cursor::scalar() {
  skip_space();
  if (pos_ < line_.size() && line_[pos_] == '"') return string_literal();
  std::string_view w = word();
  if (w == "true") return true;
  if (w == "false") return false;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
  if (ec != std::errc{} || ptr != w.data() + w.size()) fail("expected scalar, got '" + std::string(w) + "'");
  return v;
}

Expr Cursor::expr() {
  skip_space();
  if (pos_ >= line_.size()) fail("expected expression");
  const char c = line_[pos_];
  if (c == '"') return Expr::literal(string_literal());
  if (c == '(') {
    ++pos_;
    std::string_view head = word();
    Expr out;
    if (head == "not") {
      out = Expr::negate(expr());
    } else if (auto op = op_from_word(head)) {
      Expr lhs = expr();
      Expr rhs = expr();
      out = Expr::binary(*op, std::move(lhs), std::move(rhs));
    } else {
      fail("unknown operator '" + std::string(head) + "'");
    }
    skip_space();
    if (pos_ >= line_.size() || line_[pos_] != ')') fail("expected ')'");
    ++pos_;
    return out;
  }
  std::string_view w = peek_word();
  if (w == "true" || w == "false" || (!w.empty() && (is_digit(w[0]) || w[0] == '-'))) {
    return Expr::literal(scalar());
  }
  if (!is_identifier(w)) fail("expected expression, got '" + std::string(w) + "'");
  pos_ += w.size();
  return Expr::field(std::string(w));
}

}  // namespace text

}  // namespace dpc
