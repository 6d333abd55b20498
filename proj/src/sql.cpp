// SPDX-License-Identifier: Apache-2.0
#include "dpc/sql.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "dpc/error.hpp"

namespace dpc::sql {

namespace {

enum class Tok { Ident, Int, String, Symbol, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
};

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t i = 0;
  auto fail = [&](const std::string& what) {
    raise(ErrorCode::SyntaxError, "line " + std::to_string(line) + ": " + what);
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), line});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Int, std::string(src.substr(i, j - i)), line});
      i = j;
    } else if (c == '\'') {
      std::string text;
      const std::size_t start_line = line;
      ++i;
      while (true) {
        if (i >= src.size()) fail("unterminated string");
        if (src[i] == '\'') {
          if (i + 1 < src.size() && src[i + 1] == '\'') {
            text += '\'';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        if (src[i] == '\n') ++line;
        text += src[i++];
      }
      out.push_back({Tok::String, std::move(text), start_line});
    } else {
      static constexpr std::string_view two[] = {"<=", ">=", "!=", "<>"};
      std::string sym(1, c);
      for (auto t : two) {
        if (src.substr(i, 2) == t) sym = std::string(t);
      }
      if (sym.size() == 1 && std::string_view("(),;=<>+-*/").find(c) == std::string_view::npos) {
        fail(std::string("unexpected character '") + c + "'");
      }
      out.push_back({Tok::Symbol, sym, line});
      i += sym.size();
    }
  }
  out.push_back({Tok::End, "", line});
  return out;
}

const std::set<std::string> kKeywords = {"CREATE", "TABLE", "VIEW", "AS",   "SELECT", "FROM",
                                         "WHERE",  "INSERT", "INTO", "AND", "OR",     "NOT",
                                         "DIV",    "TRUE",  "FALSE"};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  std::vector<Statement> script() {
    std::vector<Statement> out;
    while (peek().kind != Tok::End) {
      out.push_back(statement());
      // The last statement may omit its terminator.
      if (peek().kind != Tok::End) expect_symbol(";");
    }
    return out;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    const std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    raise(ErrorCode::SyntaxError,
          "line " + std::to_string(t.line) + ": expected " + expected + ", got " + got);
  }

  bool is_keyword(std::string_view kw) const {
    return peek().kind == Tok::Ident && upper(peek().text) == kw;
  }
  bool accept_keyword(std::string_view kw) {
    if (!is_keyword(kw)) return false;
    ++pos_;
    return true;
  }
  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) fail(std::string(kw));
  }
  bool is_symbol(std::string_view s) const {
    return peek().kind == Tok::Symbol && peek().text == s;
  }
  bool accept_symbol(std::string_view s) {
    if (!is_symbol(s)) return false;
    ++pos_;
    return true;
  }
  void expect_symbol(std::string_view s) {
    if (!accept_symbol(s)) fail("'" + std::string(s) + "'");
  }
  std::string identifier(const std::string& what) {
    if (peek().kind != Tok::Ident || kKeywords.contains(upper(peek().text))) fail(what);
    return take().text;
  }

  Statement statement() {
    if (accept_keyword("CREATE")) {
      if (accept_keyword("TABLE")) {
        CreateTable t{identifier("table name"), {}};
        expect_symbol("(");
        do {
          t.columns.push_back(identifier("column name"));
        } while (accept_symbol(","));
        expect_symbol(")");
        return t;
      }
      if (accept_keyword("VIEW")) {
        CreateView v;
        v.name = identifier("view name");
        expect_keyword("AS");
        expect_keyword("SELECT");
        v.body = select_body();
        return v;
      }
      fail("TABLE or VIEW");
    }
    if (accept_keyword("INSERT")) {
      expect_keyword("INTO");
      InsertRow r;
      r.table = identifier("table name");
      expect_symbol("(");
      if (peek().kind == Tok::String || peek().kind == Tok::Int) {
        r.key = take().text;
      } else {
        fail("row key");
      }
      while (accept_symbol(",")) {
        std::string col = identifier("column name");
        expect_symbol("=");
        r.values.emplace_back(std::move(col), literal());
      }
      expect_symbol(")");
      return r;
    }
    if (accept_keyword("SELECT")) return SelectQuery{select_body()};
    fail("CREATE, INSERT or SELECT");
  }

  Select select_body() {
    Select s;
    if (accept_symbol("*")) {
      s.star = true;
    } else {
      do {
        const bool bare = peek().kind == Tok::Ident && !kKeywords.contains(upper(peek().text)) &&
                          (toks_[pos_ + 1].kind == Tok::Symbol
                               ? toks_[pos_ + 1].text == ","
                               : toks_[pos_ + 1].kind == Tok::Ident &&
                                     upper(toks_[pos_ + 1].text) == "FROM");
        if (bare) {
          std::string name = take().text;
          s.columns.push_back({name, Expr::field(name)});
        } else {
          Expr e = expr();
          expect_keyword("AS");
          s.columns.push_back({identifier("column alias"), std::move(e)});
        }
      } while (accept_symbol(","));
    }
    expect_keyword("FROM");
    s.source = identifier("source name");
    if (accept_keyword("WHERE")) s.where = expr();
    return s;
  }

  Scalar literal() {
    const bool negative = accept_symbol("-");
    const Token& t = peek();
    if (t.kind == Tok::Int) {
      std::int64_t v = 0;
      std::string digits = (negative ? "-" : "") + t.text;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (ec != std::errc{} || ptr != digits.data() + digits.size()) fail("integer in range");
      take();
      return v;
    }
    if (negative) fail("integer");
    if (t.kind == Tok::String) return take().text;
    if (accept_keyword("TRUE")) return true;
    if (accept_keyword("FALSE")) return false;
    fail("literal");
  }

  Expr expr() {
    Expr lhs = and_expr();
    while (accept_keyword("OR")) lhs = ex::or_(std::move(lhs), and_expr());
    return lhs;
  }
  Expr and_expr() {
    Expr lhs = not_expr();
    while (accept_keyword("AND")) lhs = ex::and_(std::move(lhs), not_expr());
    return lhs;
  }
  Expr not_expr() {
    if (accept_keyword("NOT")) return ex::not_(not_expr());
    return comparison();
  }
  Expr comparison() {
    Expr lhs = additive();
    static const std::pair<std::string_view, BinaryOp> ops[] = {
        {"=", BinaryOp::Eq}, {"!=", BinaryOp::Ne}, {"<>", BinaryOp::Ne}, {"<", BinaryOp::Lt},
        {">", BinaryOp::Gt}, {"<=", BinaryOp::Le}, {">=", BinaryOp::Ge}};
    for (const auto& [sym, op] : ops) {
      if (accept_symbol(sym)) return Expr::binary(op, std::move(lhs), additive());
    }
    return lhs;
  }
  Expr additive() {
    Expr lhs = multiplicative();
    while (true) {
      if (accept_symbol("+")) {
        lhs = ex::add(std::move(lhs), multiplicative());
      } else if (accept_symbol("-")) {
        lhs = ex::sub(std::move(lhs), multiplicative());
      } else {
        return lhs;
      }
    }
  }
  Expr multiplicative() {
    Expr lhs = unary();
    while (true) {
      if (accept_symbol("*")) {
        lhs = ex::mul(std::move(lhs), unary());
      } else if (accept_symbol("/") || accept_keyword("DIV")) {
        lhs = ex::div(std::move(lhs), unary());
      } else {
        return lhs;
      }
    }
  }
  Expr unary() {
    if (is_symbol("-")) {
      if (toks_[pos_ + 1].kind == Tok::Int) return Expr::literal(literal());
      take();
      return ex::sub(ex::lit(0), unary());
    }
    return primary();
  }
  Expr primary() {
    const Token& t = peek();
    if (t.kind == Tok::Int || t.kind == Tok::String || is_keyword("TRUE") || is_keyword("FALSE")) {
      return Expr::literal(literal());
    }
    if (accept_symbol("(")) {
      Expr e = expr();
      expect_symbol(")");
      return e;
    }
    return Expr::field(identifier("expression"));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Statement> parse_sql(std::string_view text) { return Parser(lex(text)).script(); }

Session::Session(Runtime& rt) : rt_(rt), user_(rt.new_user()) {}

const Relation& Session::relation(std::string_view name) const {
  auto it = schema_.find(name);
  if (it == schema_.end()) raise(ErrorCode::UnknownSource, std::string(name));
  return it->second;
}

const Relation& Session::source_of(const Select& s) const { return relation(s.source); }

void Session::check_columns(const Select& s, const Relation& src) const {
  auto known = [&](const std::string& c) {
    return std::find(src.columns.begin(), src.columns.end(), c) != src.columns.end();
  };
  auto check = [&](const Expr& e) {
    for (const auto& f : e.fields()) {
      if (!known(f)) raise(ErrorCode::UnknownColumn, f + " in " + s.source);
    }
  };
  if (s.where) check(*s.where);
  std::set<std::string> seen;
  for (const auto& p : s.columns) {
    check(p.expr);
    if (!seen.insert(p.name).second) raise(ErrorCode::UnknownColumn, "duplicate output column " + p.name);
  }
}

std::vector<std::string> Session::output_columns(const Select& s, const Relation& src) const {
  if (s.star) return src.columns;
  std::vector<std::string> out;
  for (const auto& p : s.columns) out.push_back(p.name);
  return out;
}

Transform Session::projection(const Select& s) const {
  if (s.star) return Transform::identity();
  std::map<std::string, Expr> outputs;
  for (const auto& p : s.columns) outputs.emplace(p.name, p.expr);
  return Transform::map(std::move(outputs));
}

std::optional<CollectionValue> Session::execute(const Statement& stmt) {
  if (const auto* t = std::get_if<CreateTable>(&stmt)) {
    if (schema_.contains(t->name)) raise(ErrorCode::InvalidSpec, t->name + " already exists");
    std::set<std::string> uniq(t->columns.begin(), t->columns.end());
    if (uniq.size() != t->columns.size()) raise(ErrorCode::InvalidSpec, "duplicate column in " + t->name);
    Relation r;
    r.columns = t->columns;
    r.var = rt_.declare_variable();
    names_[r.var] = t->name;
    schema_.emplace(t->name, std::move(r));
    return std::nullopt;
  }
  if (const auto* v = std::get_if<CreateView>(&stmt)) {
    if (schema_.contains(v->name)) raise(ErrorCode::InvalidSpec, v->name + " already exists");
    const Relation& src = source_of(v->body);
    check_columns(v->body, src);
    Relation r;
    r.is_table = false;
    r.columns = output_columns(v->body, src);
    r.source = v->body.source;
    VariableId from = src.var;
    if (v->body.where) {
      Transform filter = Transform::filter(*v->body.where);
      VariableId tmp = rt_.declare_variable();
      names_[tmp] = v->name + ".where";
      rt_.spawn_process(ProcessSpec::unary(from, filter, tmp));
      r.filtered = tmp;
      r.transform = filter;
      from = tmp;
    }
    r.var = rt_.declare_variable();
    names_[r.var] = v->name;
    Transform proj = projection(v->body);
    rt_.spawn_process(ProcessSpec::unary(from, proj, r.var));
    r.transform = compose_transforms(r.transform, proj);
    schema_.emplace(v->name, std::move(r));
    return std::nullopt;
  }
  if (const auto* ins = std::get_if<InsertRow>(&stmt)) {
    Fields fields;
    for (const auto& [c, val] : ins->values) fields.insert_or_assign(c, val);
    insert(ins->table, ins->key, std::move(fields));
    return std::nullopt;
  }

  const Select& q = std::get<SelectQuery>(stmt).body;
  const Relation& src = source_of(q);
  check_columns(q, src);
  if (q.star && !q.where) {
    rt_.quiesce();
    return rt_.read_variable(src.var, user_);
  }

  // A transient view: same processes as CREATE VIEW, torn down after the read.
  std::vector<ProcessId> transient;
  VariableId from = src.var;
  if (q.where) {
    VariableId tmp = rt_.declare_variable();
    transient.push_back(rt_.spawn_process(ProcessSpec::unary(from, Transform::filter(*q.where), tmp)));
    from = tmp;
  }
  VariableId out = rt_.declare_variable();
  transient.push_back(rt_.spawn_process(ProcessSpec::unary(from, projection(q), out)));
  rt_.quiesce();
  CollectionValue rows = rt_.read_variable(out, user_);
  for (auto pid : transient) rt_.terminate_process(pid);
  return rows;
}

std::vector<CollectionValue> Session::execute_script(std::string_view text) {
  std::vector<CollectionValue> results;
  for (const auto& stmt : parse_sql(text)) {
    if (auto rows = execute(stmt)) results.push_back(std::move(*rows));
  }
  return results;
}

void Session::insert(std::string_view table, std::string key, Fields fields) {
  const Relation& r = relation(table);
  if (!r.is_table) raise(ErrorCode::UnknownSource, std::string(table) + " is not a table");
  for (const auto& [c, val] : fields) {
    if (std::find(r.columns.begin(), r.columns.end(), c) == r.columns.end()) {
      raise(ErrorCode::UnknownColumn, c + " in " + std::string(table));
    }
  }
  CollectionValue delta;
  delta.insert(Row{std::move(key), std::move(fields)});
  rt_.update_variable(r.var, delta, user_);
}

Session::Lineage Session::lineage(std::string_view view) const {
  std::vector<const Relation*> stack;
  const Relation* cur = &relation(view);
  while (!cur->is_table) {
    stack.push_back(cur);
    cur = &relation(cur->source);
  }
  Lineage out;
  out.chain.push_back(cur->var);
  for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
    if ((*it)->filtered) out.chain.push_back(*(*it)->filtered);
    out.chain.push_back((*it)->var);
    out.transform = compose_transforms(out.transform, (*it)->transform);
  }
  out.table = names_.at(cur->var);
  return out;
}

}  // namespace dpc::sql
