// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dpc/ids.hpp"
#include "dpc/process_spec.hpp"

namespace dpc {

/// A graph vertex: a dataflow variable or a per-operation user endpoint.
struct VertexRef {
  enum class Kind : std::uint8_t { Variable, Endpoint };
  Kind kind = Kind::Variable;
  std::uint64_t raw = 0;

  static VertexRef of(VariableId v) { return {Kind::Variable, v.raw}; }
  static VertexRef of(EndpointId e) { return {Kind::Endpoint, e.raw}; }

  bool is_variable() const noexcept { return kind == Kind::Variable; }
  VariableId variable() const noexcept { return VariableId{raw}; }

  friend auto operator<=>(const VertexRef&, const VertexRef&) = default;
};

std::string to_string(VertexRef v);

enum class EdgeKind : std::uint8_t { Unary, Binary, Contraction, UserWrite, UserRead };

using EdgeLabel = std::variant<ProcessId, UserId>;

struct Edge {
  VertexRef src;
  VertexRef dst;
  EdgeLabel label;
  EdgeKind kind = EdgeKind::Unary;
  /// Round at which a user edge expires; unset for process edges.
  std::optional<std::uint64_t> lease_expiry;

  bool is_user() const noexcept {
    return kind == EdgeKind::UserRead || kind == EdgeKind::UserWrite;
  }
  friend bool operator==(const Edge&, const Edge&) = default;
};

enum class VertexClass { Necessary, Unnecessary };

/// Events the graph manager consumes, in coordinator order.
namespace event {
struct VariableDeclared {
  VariableId var;
};
struct ProcessSpawned {
  ProcessId pid;
  ProcessSpec spec;
  /// Set when the process is the contraction edge of a path.
  std::optional<ContractionId> contraction;
};
struct ProcessTerminated {
  ProcessId pid;
};
struct ValueChanged {
  VariableId var;
  std::uint64_t version;
};
struct UserOp {
  enum class Kind { Read, Write };
  Kind kind;
  UserId user;
  VariableId var;
  EndpointId endpoint;
  std::uint64_t lease_expiry;
};
}  // namespace event

using GraphEvent = std::variant<event::VariableDeclared, event::ProcessSpawned,
                                event::ProcessTerminated, event::ValueChanged,
                                event::UserOp>;

/// Possible contraction path: necessary endpoints, unnecessary interiors.
struct Path {
  std::vector<VariableId> vertices;   // head, interiors..., tail
  std::vector<ProcessId> processes;   // edge labels, head to tail

  std::vector<VariableId> interiors() const {
    return {vertices.begin() + 1, vertices.end() - 1};
  }
  friend bool operator==(const Path&, const Path&) = default;
};

/// Labeled dependency DAG over variables and user endpoints.
class DepGraph {
 public:
  /// Applies one event. Throws CycleDetected (graph untouched) when a
  /// spawn would close a cycle, UnknownVertex for unknown variables.
  void apply(const GraphEvent& ev);

  bool has_vertex(VertexRef v) const { return vertices_.contains(v); }
  std::size_t in_degree(VertexRef v) const;
  std::size_t out_degree(VertexRef v) const;

  /// Unnecessary iff in-degree and out-degree are both exactly 1 and
  /// neither edge is a user edge. User endpoints are always necessary.
  /// Throws UnknownVertex.
  VertexClass classify(VertexRef v) const;
  VertexClass classify(VariableId v) const { return classify(VertexRef::of(v)); }

  /// Maximal chains of unary process edges between necessary vertices
  /// through at least one unnecessary vertex, in topological order.
  std::vector<Path> find_contraction_paths() const;

  /// Drops user edges whose lease ended at or before `now`, and the
  /// endpoint vertices left isolated.
  void expire_leases(std::uint64_t now);

  /// True when adding edges inputs -> output would close a cycle.
  bool would_create_cycle(const std::vector<VariableId>& inputs, VariableId output) const;

  void set_tag(VariableId v, ContractionId tag);
  void clear_tag(VariableId v);
  std::optional<ContractionId> tag(VariableId v) const;

  std::vector<VertexRef> vertices() const;
  /// All edges sorted by (src, dst, kind).
  std::vector<Edge> edges() const;
  std::vector<Edge> in_edges(VertexRef v) const;
  std::vector<Edge> out_edges(VertexRef v) const;

  /// Kahn order over all vertices; ties broken by vertex order.
  std::vector<VertexRef> topological_order() const;

  /// Graphviz rendering. Necessary vertices are boxes, unnecessary ones
  /// ellipses, contracted ones dashed ellipses, user endpoints points.
  std::string to_dot(const std::map<VariableId, std::string>& names = {}) const;

 private:
  struct VertexInfo {
    std::optional<ContractionId> tag;
  };
  using EdgeKey = std::uint64_t;

  void add_edge(Edge e);
  void remove_edge(EdgeKey k);
  void require_variable(VariableId v) const;

  std::map<VertexRef, VertexInfo> vertices_;
  std::map<EdgeKey, Edge> edges_;
  std::map<VertexRef, std::vector<EdgeKey>> out_;
  std::map<VertexRef, std::vector<EdgeKey>> in_;
  EdgeKey next_edge_ = 0;
};

}  // namespace dpc
