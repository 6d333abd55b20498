// SPDX-License-Identifier: Apache-2.0
#include "dpc/depgraph.hpp"

#include <algorithm>
#include <cassert>
#include <queue>
#include <set>

#include "dpc/error.hpp"

namespace dpc {

namespace {

std::uint64_t label_seq(const EdgeLabel& l) {
  return std::visit([](auto id) { return id.seq(); }, l);
}

std::uint64_t label_raw(const EdgeLabel& l) {
  return std::visit([](auto id) { return id.raw; }, l);
}

bool edge_less(const Edge& a, const Edge& b) {
  return std::tie(a.src, a.dst, a.kind) < std::tie(b.src, b.dst, b.kind) ||
         (std::tie(a.src, a.dst, a.kind) == std::tie(b.src, b.dst, b.kind) &&
          label_raw(a.label) < label_raw(b.label));
}

std::string node_name(VertexRef v) {
  return (v.is_variable() ? "v" : "e") + std::to_string(v.raw >> 16);
}

}  // namespace

std::string to_string(VertexRef v) {
  return v.is_variable() ? to_string(v.variable()) : to_string(EndpointId{v.raw});
}

void DepGraph::require_variable(VariableId v) const {
  if (!vertices_.contains(VertexRef::of(v))) raise(ErrorCode::UnknownVertex, to_string(v));
}

void DepGraph::add_edge(Edge e) {
  const EdgeKey k = next_edge_++;
  out_[e.src].push_back(k);
  in_[e.dst].push_back(k);
  edges_.emplace(k, std::move(e));
}

void DepGraph::remove_edge(EdgeKey k) {
  auto it = edges_.find(k);
  if (it == edges_.end()) return;
  auto drop = [k](std::vector<EdgeKey>& v) { std::erase(v, k); };
  drop(out_[it->second.src]);
  drop(in_[it->second.dst]);
  edges_.erase(it);
}

void DepGraph::apply(const GraphEvent& ev) {
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, event::VariableDeclared>) {
          vertices_.try_emplace(VertexRef::of(e.var));
        } else if constexpr (std::is_same_v<T, event::ProcessSpawned>) {
          const auto inputs = e.spec.inputs();
          for (auto in : inputs) require_variable(in);
          require_variable(e.spec.output);
          if (would_create_cycle(inputs, e.spec.output)) {
            raise(ErrorCode::CycleDetected, to_string(e.pid));
          }
          EdgeKind kind = e.contraction ? EdgeKind::Contraction
                          : e.spec.is_unary() ? EdgeKind::Unary
                                              : EdgeKind::Binary;
          for (auto in : inputs) {
            add_edge(Edge{VertexRef::of(in), VertexRef::of(e.spec.output), e.pid, kind, {}});
          }
        } else if constexpr (std::is_same_v<T, event::ProcessTerminated>) {
          std::vector<EdgeKey> doomed;
          for (const auto& [k, edge] : edges_) {
            if (const auto* p = std::get_if<ProcessId>(&edge.label); p && *p == e.pid) {
              doomed.push_back(k);
            }
          }
          for (auto k : doomed) remove_edge(k);
        } else if constexpr (std::is_same_v<T, event::UserOp>) {
          require_variable(e.var);
          const VertexRef user = VertexRef::of(e.endpoint);
          vertices_.try_emplace(user);
          const VertexRef var = VertexRef::of(e.var);
          if (e.kind == event::UserOp::Kind::Write) {
            add_edge(Edge{user, var, e.user, EdgeKind::UserWrite, e.lease_expiry});
          } else {
            add_edge(Edge{var, user, e.user, EdgeKind::UserRead, e.lease_expiry});
          }
        }
      },
      ev);
}

std::size_t DepGraph::in_degree(VertexRef v) const {
  auto it = in_.find(v);
  return it == in_.end() ? 0 : it->second.size();
}

std::size_t DepGraph::out_degree(VertexRef v) const {
  auto it = out_.find(v);
  return it == out_.end() ? 0 : it->second.size();
}

VertexClass DepGraph::classify(VertexRef v) const {
  if (!vertices_.contains(v)) raise(ErrorCode::UnknownVertex, to_string(v));
  if (!v.is_variable() || in_degree(v) != 1 || out_degree(v) != 1) return VertexClass::Necessary;
  // A live user edge keeps the vertex observable.
  const bool user = edges_.at(in_.at(v).front()).is_user() || edges_.at(out_.at(v).front()).is_user();
  return user ? VertexClass::Necessary : VertexClass::Unnecessary;
}

std::vector<Path> DepGraph::find_contraction_paths() const {
  auto sole_in = [&](VertexRef v) -> const Edge& { return edges_.at(in_.at(v).front()); };
  auto sole_out = [&](VertexRef v) -> const Edge& { return edges_.at(out_.at(v).front()); };
  // An interior must be unnecessary with unary process edges on both sides.
  auto interior_ok = [&](VertexRef v) {
    return v.is_variable() && classify(v) == VertexClass::Unnecessary &&
           sole_in(v).kind == EdgeKind::Unary && sole_out(v).kind == EdgeKind::Unary;
  };

  std::vector<Path> paths;
  std::set<VertexRef> visited;
  for (VertexRef v : topological_order()) {
    if (visited.contains(v) || !interior_ok(v)) continue;

    // Grow upwards to the head, then downwards to the tail.
    std::vector<VariableId> up;
    std::vector<ProcessId> up_labels;
    VertexRef cur = v;
    bool valid = true;
    while (true) {
      const Edge& e = sole_in(cur);
      up_labels.push_back(std::get<ProcessId>(e.label));
      VertexRef prev = e.src;
      if (classify(prev) == VertexClass::Necessary) {
        up.push_back(prev.variable());
        break;
      }
      if (!interior_ok(prev)) {
        valid = false;
        break;
      }
      // Interior vertices are reached by at most one path.
      assert(!visited.contains(prev));
      visited.insert(prev);
      up.push_back(prev.variable());
      cur = prev;
    }
    visited.insert(v);
    std::vector<VariableId> down{v.variable()};
    std::vector<ProcessId> down_labels;
    cur = v;
    while (true) {
      const Edge& e = sole_out(cur);
      down_labels.push_back(std::get<ProcessId>(e.label));
      VertexRef next = e.dst;
      if (classify(next) == VertexClass::Necessary) {
        down.push_back(next.variable());
        break;
      }
      if (!interior_ok(next)) {
        valid = false;
        visited.insert(next);
        break;
      }
      visited.insert(next);
      down.push_back(next.variable());
      cur = next;
    }
    if (!valid) continue;

    Path p;
    p.vertices.assign(up.rbegin(), up.rend());
    p.vertices.insert(p.vertices.end(), down.begin(), down.end());
    p.processes.assign(up_labels.rbegin(), up_labels.rend());
    p.processes.insert(p.processes.end(), down_labels.begin(), down_labels.end());
    paths.push_back(std::move(p));
  }
  return paths;
}

void DepGraph::expire_leases(std::uint64_t now) {
  std::vector<EdgeKey> doomed;
  for (const auto& [k, e] : edges_) {
    if (e.lease_expiry && *e.lease_expiry <= now) doomed.push_back(k);
  }
  std::set<VertexRef> endpoints;
  for (auto k : doomed) {
    const Edge& e = edges_.at(k);
    endpoints.insert(e.src.is_variable() ? e.dst : e.src);
    remove_edge(k);
  }
  for (VertexRef v : endpoints) {
    if (in_degree(v) == 0 && out_degree(v) == 0) {
      vertices_.erase(v);
      in_.erase(v);
      out_.erase(v);
    }
  }
}

bool DepGraph::would_create_cycle(const std::vector<VariableId>& inputs,
                                  VariableId output) const {
  std::set<VertexRef> targets;
  for (auto in : inputs) targets.insert(VertexRef::of(in));
  // A cycle closes iff some input is reachable from the output.
  std::vector<VertexRef> stack{VertexRef::of(output)};
  std::set<VertexRef> seen;
  while (!stack.empty()) {
    VertexRef v = stack.back();
    stack.pop_back();
    if (targets.contains(v)) return true;
    if (!seen.insert(v).second) continue;
    auto it = out_.find(v);
    if (it == out_.end()) continue;
    for (auto k : it->second) stack.push_back(edges_.at(k).dst);
  }
  return false;
}

void DepGraph::set_tag(VariableId v, ContractionId tag) {
  require_variable(v);
  vertices_.at(VertexRef::of(v)).tag = tag;
}

void DepGraph::clear_tag(VariableId v) {
  require_variable(v);
  vertices_.at(VertexRef::of(v)).tag.reset();
}

std::optional<ContractionId> DepGraph::tag(VariableId v) const {
  require_variable(v);
  return vertices_.at(VertexRef::of(v)).tag;
}

std::vector<VertexRef> DepGraph::vertices() const {
  std::vector<VertexRef> out;
  out.reserve(vertices_.size());
  for (const auto& [v, info] : vertices_) out.push_back(v);
  return out;
}

std::vector<Edge> DepGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edges_.size());
  for (const auto& [k, e] : edges_) out.push_back(e);
  std::sort(out.begin(), out.end(), edge_less);
  return out;
}

std::vector<Edge> DepGraph::in_edges(VertexRef v) const {
  std::vector<Edge> out;
  if (auto it = in_.find(v); it != in_.end()) {
    for (auto k : it->second) out.push_back(edges_.at(k));
  }
  std::sort(out.begin(), out.end(), edge_less);
  return out;
}

std::vector<Edge> DepGraph::out_edges(VertexRef v) const {
  std::vector<Edge> out;
  if (auto it = out_.find(v); it != out_.end()) {
    for (auto k : it->second) out.push_back(edges_.at(k));
  }
  std::sort(out.begin(), out.end(), edge_less);
  return out;
}

std::vector<VertexRef> DepGraph::topological_order() const {
  std::map<VertexRef, std::size_t> pending;
  std::priority_queue<VertexRef, std::vector<VertexRef>, std::greater<>> ready;
  for (const auto& [v, info] : vertices_) {
    pending[v] = in_degree(v);
    if (pending[v] == 0) ready.push(v);
  }
  std::vector<VertexRef> order;
  order.reserve(vertices_.size());
  while (!ready.empty()) {
    VertexRef v = ready.top();
    ready.pop();
    order.push_back(v);
    if (auto it = out_.find(v); it != out_.end()) {
      for (auto k : it->second) {
        if (--pending[edges_.at(k).dst] == 0) ready.push(edges_.at(k).dst);
      }
    }
  }
  assert(order.size() == vertices_.size());
  return order;
}

std::string DepGraph::to_dot(const std::map<VariableId, std::string>& names) const {
  std::string out = "digraph dataflow {\n  rankdir=LR;\n";
  for (const auto& [v, info] : vertices_) {
    out += "  \"" + node_name(v) + "\" [";
    if (!v.is_variable()) {
      out += "shape=point";
    } else {
      auto it = names.find(v.variable());
      out += "label=\"" + (it != names.end() ? it->second : node_name(v)) + "\", ";
      if (info.tag) {
        out += "shape=ellipse, style=dashed";
      } else if (classify(v) == VertexClass::Unnecessary) {
        out += "shape=ellipse";
      } else {
        out += "shape=box";
      }
    }
    out += "];\n";
  }
  for (const Edge& e : edges()) {
    out += "  \"" + node_name(e.src) + "\" -> \"" + node_name(e.dst) + "\" [label=\"";
    out += std::holds_alternative<ProcessId>(e.label) ? 'p' : 'u';
    out += std::to_string(label_seq(e.label)) + "\"";
    switch (e.kind) {
      case EdgeKind::Contraction: out += ", style=bold"; break;
      case EdgeKind::Binary: out += ", arrowhead=diamond"; break;
      case EdgeKind::UserRead:
      case EdgeKind::UserWrite: out += ", style=dotted"; break;
      case EdgeKind::Unary: break;
    }
    out += "];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace dpc
