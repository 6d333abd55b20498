// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <future>
#include <map>
#include <memory>
#include <set>
#include <thread>
#include <variant>
#include <vector>

#include "dpc/runtime.hpp"
#include "mailbox.hpp"

namespace dpc {

using Snapshot = std::shared_ptr<const CollectionValue>;

struct Runtime::Impl {
  // Messages to a process actor.
  struct Job {
    std::shared_ptr<const ProcessSpec> spec;
    std::vector<Snapshot> inputs;
  };
  struct Stop {};
  struct Crash {};
  using ActorMsg = std::variant<Job, Stop, Crash>;

  // Messages to the coordinator.
  struct Call {
    std::function<void()> fn;
  };
  struct Result {
    ProcessId pid;
    Snapshot output;
    std::size_t dropped = 0;
  };
  struct Exited {
    ProcessId pid;
    bool crashed = false;
  };
  struct Shutdown {};
  using CoordMsg = std::variant<Call, Result, Exited, Shutdown>;

  struct Actor {
    detail::Mailbox<ActorMsg> mailbox;
    std::thread thread;
    bool outstanding = false;
  };

  struct Process {
    std::shared_ptr<const ProcessSpec> spec;
    std::optional<ContractionId> contraction;
    bool dirty = false;
    bool crashing = false;
  };

  struct Cell {
    CollectionValue user_state;
    /// Last outputs of processes that were terminated or crashed.
    CollectionValue retained;
    /// Latest output per writer process. Slots of soft-deleted processes
    /// stay here, frozen, until a cleave hands them to the respawned process.
    std::map<ProcessId, Snapshot> slots;
    Snapshot value = std::make_shared<const CollectionValue>();
    std::uint64_t version = 0;
    std::set<ProcessId> readers;
  };

  struct VersionWaiter {
    std::uint64_t above;
    std::shared_ptr<std::promise<std::uint64_t>> promise;
  };

  enum class SlotPolicy { Retain, Keep };

  explicit Impl(RuntimeOptions opts);
  ~Impl();

  template <class F>
  auto call(F&& fn) -> decltype(fn()) {
    using R = decltype(fn());
    auto task = std::make_shared<std::packaged_task<R()>>(std::forward<F>(fn));
    auto fut = task->get_future();
    inbox.push(Call{[task] { (*task)(); }});
    return fut.get();
  }

  // Coordinator thread.
  void run();
  void on_result(Result& r);
  void on_exited(const Exited& e);
  void shutdown_locked();

  // Everything below runs on the coordinator thread only.
  void emit(const GraphEvent& ev);
  Cell& cell(VariableId v);
  Process& process(ProcessId p);
  bool idle() const { return in_flight == 0 && pending_exits == 0; }
  void check_idle();

  void start_process(ProcessId pid, const ProcessSpec& spec, std::optional<ContractionId> contraction);
  void remove_process(ProcessId pid, SlotPolicy policy);
  void dispatch(ProcessId pid);
  void set_slot(VariableId out, ProcessId writer, Snapshot value, bool notify);
  void transfer_slot(VariableId v, ProcessId from, ProcessId to);
  void refresh(VariableId v, bool notify);

  std::uint64_t advance_round_locked();
  void add_user_edge(event::UserOp::Kind kind, UserId user, VariableId v);

  // Contraction engine (contraction.cpp).
  std::vector<ContractionRecord> optimization_pass_locked();
  ContractionRecord contract_path_locked(const Path& path);
  void validate_path(const Path& path) const;
  void cleave_record(ContractionId id);
  void cleave_if_contracted(VariableId v);

  RuntimeOptions options;
  IdSource ids;
  detail::Mailbox<CoordMsg> inbox;

  std::map<VariableId, Cell> cells;
  std::map<ProcessId, Process> processes;
  /// Live and retiring actors; an actor leaves once its exit is seen.
  std::map<ProcessId, std::unique_ptr<Actor>> actors;
  DepGraph graph_state;
  std::map<ContractionId, ContractionRecord> store;

  std::uint64_t in_flight = 0;
  std::uint64_t pending_exits = 0;
  std::uint64_t rounds = 0;
  std::uint64_t pass_interval = 0;
  std::uint64_t dropped = 0;
  std::vector<std::shared_ptr<std::promise<void>>> quiesce_waiters;
  std::multimap<VariableId, VersionWaiter> version_waiters;

  std::thread coordinator;
};

}  // namespace dpc
