// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dpc/contraction.hpp"
#include "dpc/depgraph.hpp"
#include "dpc/ids.hpp"
#include "dpc/process_spec.hpp"
#include "dpc/value.hpp"

namespace dpc {

using RuntimeEvent = GraphEvent;

struct RuntimeOptions {
  /// Seeds the random component of identifiers.
  std::uint64_t id_seed = 0x5eed;
  /// Rounds a user read/write edge stays in the graph.
  std::uint64_t lease_rounds = 10;
  /// When false, rounds only advance through advance_round().
  bool auto_advance_rounds = true;
  /// Observer for every graph event, called on the coordinator thread.
  /// Must not call back into the runtime.
  std::function<void(const RuntimeEvent&)> event_sink;
};

struct ProcessInfo {
  ProcessId pid;
  ProcessSpec spec;
  bool contraction = false;
};

/// Dataflow runtime. One coordinator thread serializes variable writes,
/// graph maintenance and contraction; each process is an actor thread that
/// computes outputs from immutable input snapshots and commits them back
/// through the coordinator. All methods are thread-safe and must not be
/// called from the event sink.
class Runtime {
 public:
  explicit Runtime(RuntimeOptions options = {});
  ~Runtime();
  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  VariableId declare_variable();
  UserId new_user();

  /// Merges `delta` into the variable. Returns the resulting version.
  /// A contracted target is cleaved first.
  std::uint64_t update_variable(VariableId v, const CollectionValue& delta, UserId actor);
  /// Current value. A contracted target is cleaved and recomputed first.
  CollectionValue read_variable(VariableId v, UserId actor);

  ProcessId spawn_process(const ProcessSpec& spec);
  /// Stops a live process; its last output stays in place. Terminating a
  /// contraction process cleaves its path.
  void terminate_process(ProcessId p);
  /// Simulates a crash: the actor dies and the coordinator learns about it
  /// from the exit notification, as a monitor would.
  void inject_failure(ProcessId p);

  /// Blocks until no computation or exit notification is in flight.
  void quiesce();

  /// Starts a propagation round: expires leases and runs a scheduled
  /// optimization pass when due. Returns the new round number.
  std::uint64_t advance_round();
  std::uint64_t round();

  // Dynamic path contraction.
  std::vector<ContractionRecord> optimization_pass();
  /// Throws PathInvalidated when the path no longer qualifies.
  ContractionRecord contract_path(const Path& path);
  /// Restores the whole contracted path `v` belongs to. Throws NotContracted.
  void cleave_vertex(VariableId v);
  /// Runs an optimization pass every `interval` rounds. Throws InvalidInterval.
  void schedule_passes(std::uint64_t interval);
  void cancel_passes();
  std::vector<ContractionRecord> contractions();
  /// Soft-deletion store in its text form.
  std::string soft_deletion_store();

  // Inspection; none of these create user edges.
  CollectionValue peek(VariableId v);
  std::uint64_t version(VariableId v);
  /// Blocks until the version of `v` exceeds `above`; returns it.
  std::uint64_t wait_for_version(VariableId v, std::uint64_t above);
  DepGraph graph();
  std::vector<ProcessInfo> live_processes();
  std::vector<VariableId> variables();
  bool is_contracted(VariableId v);
  /// Rows dropped by evaluation errors so far.
  std::uint64_t dropped_rows();

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace dpc
