// SPDX-License-Identifier: Apache-2.0
// Reference evaluators, brute-force oracles and random generators shared by
// the unit tests and the acceptance suite. Nothing here calls the library's
// own evaluation code.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "dpc/depgraph.hpp"
#include "dpc/expr.hpp"
#include "dpc/process_spec.hpp"
#include "dpc/runtime.hpp"
#include "dpc/transform.hpp"
#include "dpc/value.hpp"

namespace ref {

using dpc::BinaryOp;
using dpc::CollectionValue;
using dpc::Expr;
using dpc::Fields;
using dpc::Scalar;

/// Evaluates `e`, or nullopt on any evaluation error.
inline std::optional<Scalar> eval(const Expr& e, const Fields& row) {
  if (auto* f = std::get_if<Expr::FieldRef>(&e.node())) {
    auto it = row.find(f->name);
    if (it == row.end()) return std::nullopt;
    return it->second;
  }
  if (auto* l = std::get_if<Expr::Literal>(&e.node())) return l->value;
  if (auto* n = std::get_if<Expr::Not>(&e.node())) {
    auto v = eval(n->operand, row);
    if (!v || !v->is_bool()) return std::nullopt;
    return Scalar(!v->as_bool());
  }
  const auto& b = std::get<Expr::Binary>(e.node());
  auto x = eval(b.lhs, row);
  auto y = eval(b.rhs, row);
  if (!x || !y) return std::nullopt;
  switch (b.op) {
    case BinaryOp::Add:
    case BinaryOp::Sub:
    case BinaryOp::Mul:
    case BinaryOp::Div: {
      if (!x->is_int() || !y->is_int()) return std::nullopt;
      const __int128 p = x->as_int(), q = y->as_int();
      __int128 r = 0;
      if (b.op == BinaryOp::Add) r = p + q;
      if (b.op == BinaryOp::Sub) r = p - q;
      if (b.op == BinaryOp::Mul) r = p * q;
      if (b.op == BinaryOp::Div) {
        if (q == 0) return std::nullopt;
        r = p / q;
      }
      if (r > INT64_MAX || r < INT64_MIN) return std::nullopt;
      return Scalar(static_cast<std::int64_t>(r));
    }
    case BinaryOp::And:
    case BinaryOp::Or:
      if (!x->is_bool() || !y->is_bool()) return std::nullopt;
      return Scalar(b.op == BinaryOp::And ? (x->as_bool() && y->as_bool())
                                          : (x->as_bool() || y->as_bool()));
    default: break;
  }
  if (x->kind() != y->kind()) return std::nullopt;
  // Three-way comparison on the same kind.
  int c = 0;
  if (x->is_int()) c = (x->as_int() > y->as_int()) - (x->as_int() < y->as_int());
  if (x->is_bool()) c = int(x->as_bool()) - int(y->as_bool());
  if (x->is_text()) c = (x->as_text() > y->as_text()) - (x->as_text() < y->as_text());
  switch (b.op) {
    case BinaryOp::Eq: return Scalar(c == 0);
    case BinaryOp::Ne: return Scalar(c != 0);
    case BinaryOp::Lt: return Scalar(c < 0);
    case BinaryOp::Gt: return Scalar(c > 0);
    case BinaryOp::Le: return Scalar(c <= 0);
    default: return Scalar(c >= 0);
  }
}

/// Row-at-a-time application of a transform.
inline CollectionValue apply(const dpc::Transform& t, const CollectionValue& c) {
  CollectionValue out;
  for (const auto& [key, fields] : c) {
    std::optional<Fields> row = fields;
    for (const auto& step : t.steps) {
      if (!row) break;
      if (auto* m = std::get_if<dpc::MapStep>(&step)) {
        Fields next;
        for (const auto& [name, e] : m->outputs) {
          auto v = eval(e, *row);
          if (!v) {
            row.reset();
            break;
          }
          next[name] = *v;
        }
        if (row) row = std::move(next);
      } else {
        auto keep = eval(std::get<dpc::FilterStep>(step).predicate, *row);
        if (!keep || !keep->is_bool() || !keep->as_bool()) row.reset();
      }
    }
    if (row) out.assign(key, *row);
  }
  return out;
}

inline CollectionValue apply_all(const std::vector<dpc::Transform>& ts, CollectionValue c) {
  for (const auto& t : ts) c = apply(t, c);
  return c;
}

/// All paths v0 .. vk (k >= 2) along unary process edges whose endpoints are
/// necessary and whose interiors are unnecessary, by exhaustive search.
inline std::set<std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>>
brute_force_paths(const dpc::DepGraph& g) {
  using dpc::VertexRef;
  std::map<VertexRef, int> in, out;
  std::set<VertexRef> observed;
  for (const auto& e : g.edges()) {
    ++out[e.src];
    ++in[e.dst];
    if (e.is_user()) {
      observed.insert(e.src);
      observed.insert(e.dst);
    }
  }
  auto unnecessary = [&](VertexRef v) {
    return v.is_variable() && in[v] == 1 && out[v] == 1 && !observed.contains(v);
  };
  std::set<std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>> found;
  std::vector<std::uint64_t> vs, ps;
  auto dfs = [&](auto&& self, VertexRef at) -> void {
    for (const auto& e : g.edges()) {
      if (e.src != at || e.kind != dpc::EdgeKind::Unary) continue;
      vs.push_back(e.dst.raw);
      ps.push_back(std::get<dpc::ProcessId>(e.label).raw);
      if (!unnecessary(e.dst)) {
        if (vs.size() >= 3) found.insert({vs, ps});
      } else {
        self(self, e.dst);
      }
      vs.pop_back();
      ps.pop_back();
    }
  };
  for (auto v : g.vertices()) {
    if (!v.is_variable() || unnecessary(v)) continue;
    vs = {v.raw};
    ps.clear();
    dfs(dfs, v);
  }
  return found;
}

inline auto as_set(const std::vector<dpc::Path>& paths) {
  std::set<std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>> out;
  for (const auto& p : paths) {
    std::vector<std::uint64_t> vs, ps;
    for (auto v : p.vertices) vs.push_back(v.raw);
    for (auto q : p.processes) ps.push_back(q.raw);
    out.insert({vs, ps});
  }
  return out;
}

/// Graph shape with process labels forgotten: each process becomes the
/// sorted list of its (src, dst, kind) edges; user edges keep their label.
inline auto shape(const dpc::DepGraph& g) {
  using E = std::tuple<dpc::VertexRef, dpc::VertexRef, int, std::uint64_t>;
  std::map<std::uint64_t, std::vector<E>> by_process;
  std::vector<E> user;
  for (const auto& e : g.edges()) {
    if (auto* p = std::get_if<dpc::ProcessId>(&e.label)) {
      by_process[p->raw].emplace_back(e.src, e.dst, int(e.kind), 0);
    } else {
      user.emplace_back(e.src, e.dst, int(e.kind), std::get<dpc::UserId>(e.label).raw);
    }
  }
  std::multiset<std::vector<E>> groups;
  for (auto& [pid, es] : by_process) {
    std::sort(es.begin(), es.end());
    groups.insert(es);
  }
  std::sort(user.begin(), user.end());
  return std::make_tuple(g.vertices(), groups, user);
}

}  // namespace ref

namespace gen {

using dpc::Expr;
using dpc::Scalar;
namespace ex = dpc::ex;

/// Random expressions, transforms and collections over rows with fields
/// x, y (int), b (bool) and s (text).
class Source {
 public:
  explicit Source(std::uint64_t seed) : rng(seed) {}

  std::mt19937_64 rng;

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng); }

  Expr int_expr(int depth) {
    if (depth == 0 || chance(0.35)) {
      if (chance(0.02)) return ex::lit(Scalar(std::int64_t{4000000000000000000}));
      if (chance(0.6)) return ex::f(chance(0.5) ? "x" : "y");
      return ex::lit(Scalar(std::int64_t{pick(-5, 5)}));
    }
    Expr a = int_expr(depth - 1), b = int_expr(depth - 1);
    switch (pick(0, 9)) {
      case 0: case 1: case 2: case 3: return ex::add(a, b);
      case 4: case 5: case 6: return ex::sub(a, b);
      case 7: case 8: return ex::mul(a, b);
      default: return ex::div(a, b);
    }
  }

  Expr bool_expr(int depth) {
    if (depth == 0 || chance(0.25)) {
      switch (pick(0, 3)) {
        case 0: return ex::f("b");
        case 1: return ex::lit(Scalar(chance(0.5)));
        case 2: return ex::eq(ex::f("s"), ex::lit(Scalar(std::string(1, char('a' + pick(0, 2))))));
        default: return ex::gt(ex::f("x"), ex::lit(Scalar(std::int64_t{pick(-10, 10)})));
      }
    }
    switch (pick(0, 8)) {
      case 0: return ex::and_(bool_expr(depth - 1), bool_expr(depth - 1));
      case 1: return ex::or_(bool_expr(depth - 1), bool_expr(depth - 1));
      case 2: return ex::not_(bool_expr(depth - 1));
      case 3: return ex::lt(int_expr(depth - 1), int_expr(depth - 1));
      case 4: return ex::le(int_expr(depth - 1), int_expr(depth - 1));
      case 5: return ex::ge(int_expr(depth - 1), int_expr(depth - 1));
      case 6: return ex::ne(int_expr(depth - 1), int_expr(depth - 1));
      case 7: return ex::eq(ex::f("b"), bool_expr(depth - 1));
      default: return ex::gt(int_expr(depth - 1), int_expr(depth - 1));
    }
  }

  dpc::Step step() {
    if (chance(0.4)) {
      Expr p = bool_expr(2);
      // A predicate of the wrong kind now and then.
      if (chance(0.02)) p = int_expr(1);
      return dpc::FilterStep{p};
    }
    dpc::MapStep m;
    m.outputs.emplace("x", int_expr(2));
    m.outputs.emplace("y", chance(0.7) ? int_expr(2) : ex::f("y"));
    if (!chance(0.05)) m.outputs.emplace("b", chance(0.6) ? ex::f("b") : bool_expr(2));
    m.outputs.emplace("s", ex::f("s"));
    return m;
  }

  dpc::Transform transform(int max_steps = 3) {
    dpc::Transform t;
    const int n = pick(0, max_steps);
    for (int i = 0; i < n; ++i) t.steps.push_back(step());
    return t;
  }

  dpc::Fields row() {
    return dpc::Fields{{"x", std::int64_t{pick(-20, 20)}},
                       {"y", std::int64_t{pick(-20, 20)}},
                       {"b", chance(0.5)},
                       {"s", std::string(1, char('a' + pick(0, 2)))}};
  }

  dpc::CollectionValue collection(int max_rows = 20, int key_space = 30) {
    dpc::CollectionValue c;
    const int n = pick(0, max_rows);
    for (int i = 0; i < n; ++i) c.insert(dpc::Row{"k" + std::to_string(pick(0, key_space - 1)), row()});
    return c;
  }
};

/// A random acyclic topology: variable i is written by processes reading
/// only variables below i.
struct Topology {
  int variables = 0;
  struct Proc {
    bool unary = true;
    int in = 0;
    int right = 0;
    dpc::SetOp op = dpc::SetOp::Union;
    dpc::Transform transform;
    int out = 0;
  };
  std::vector<Proc> procs;
};

inline Topology topology(Source& s, int max_vars = 8) {
  Topology t;
  t.variables = s.pick(2, max_vars);
  // Products never feed other products, which keeps collections small.
  std::vector<bool> product_fed(t.variables, false);
  for (int i = 1; i < t.variables; ++i) {
    const int writers = s.chance(0.15) ? 0 : (s.chance(0.1) ? 2 : 1);
    for (int w = 0; w < writers; ++w) {
      Topology::Proc p;
      p.out = i;
      if (i >= 2 && s.chance(0.15)) {
        p.unary = false;
        p.in = s.pick(0, i - 1);
        do {
          p.right = s.pick(0, i - 1);
        } while (p.right == p.in);
        p.op = static_cast<dpc::SetOp>(s.pick(0, 2));
        if (p.op == dpc::SetOp::Product && (product_fed[p.in] || product_fed[p.right])) {
          p.op = dpc::SetOp::Union;
        }
        if (p.op == dpc::SetOp::Product || product_fed[p.in] || product_fed[p.right]) {
          product_fed[i] = true;
        }
      } else {
        // Mostly extend a chain from the previous variable.
        p.in = s.chance(0.7) ? i - 1 : s.pick(0, i - 1);
        p.transform = s.transform(2);
        if (product_fed[p.in]) product_fed[i] = true;
      }
      t.procs.push_back(p);
    }
  }
  return t;
}

/// Declares and spawns `t` on `rt`; returns variables and processes in
/// topology order.
inline std::pair<std::vector<dpc::VariableId>, std::vector<dpc::ProcessId>> build(
    dpc::Runtime& rt, const Topology& t) {
  std::vector<dpc::VariableId> vars;
  for (int i = 0; i < t.variables; ++i) vars.push_back(rt.declare_variable());
  std::vector<dpc::ProcessId> pids;
  for (const auto& p : t.procs) {
    pids.push_back(rt.spawn_process(
        p.unary ? dpc::ProcessSpec::unary(vars[p.in], p.transform, vars[p.out])
                : dpc::ProcessSpec::binary(p.op, vars[p.in], vars[p.right], vars[p.out])));
  }
  return {vars, pids};
}

}  // namespace gen
