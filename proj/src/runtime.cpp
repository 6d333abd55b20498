// SPDX-License-Identifier: Apache-2.0
#include "dpc/runtime.hpp"

#include "dpc/error.hpp"
#include "runtime_impl.hpp"

namespace dpc {

namespace {

void actor_loop(Runtime::Impl* rt, ProcessId pid, Runtime::Impl::Actor* self) {
  using Impl = Runtime::Impl;
  while (true) {
    Impl::ActorMsg msg = self->mailbox.pop();
    if (auto* job = std::get_if<Impl::Job>(&msg)) {
      std::vector<const CollectionValue*> inputs;
      inputs.reserve(job->inputs.size());
      for (const auto& s : job->inputs) inputs.push_back(s.get());
      std::size_t dropped = 0;
      Snapshot out = std::make_shared<const CollectionValue>(run_process(*job->spec, inputs, &dropped));
      rt->inbox.push(Impl::Result{pid, std::move(out), dropped});
    } else {
      rt->inbox.push(Impl::Exited{pid, std::holds_alternative<Impl::Crash>(msg)});
      return;
    }
  }
}

}  // namespace

Runtime::Impl::Impl(RuntimeOptions opts)
    : options(std::move(opts)), ids(options.id_seed) {
  coordinator = std::thread([this] { run(); });
}

Runtime::Impl::~Impl() {
  inbox.push(Shutdown{});
  coordinator.join();
}

void Runtime::Impl::run() {
  while (true) {
    CoordMsg msg = inbox.pop();
    if (auto* c = std::get_if<Call>(&msg)) {
      c->fn();
    } else if (auto* r = std::get_if<Result>(&msg)) {
      on_result(*r);
    } else if (auto* e = std::get_if<Exited>(&msg)) {
      on_exited(*e);
    } else {
      shutdown_locked();
      return;
    }
    check_idle();
  }
}

void Runtime::Impl::shutdown_locked() {
  for (auto& [pid, actor] : actors) actor->mailbox.push(Stop{});
  for (auto& [pid, actor] : actors) actor->thread.join();
  actors.clear();
  auto gone = std::make_exception_ptr(Error(ErrorCode::ShutDown, "runtime shut down"));
  for (auto& p : quiesce_waiters) p->set_exception(gone);
  for (auto& [v, w] : version_waiters) w.promise->set_exception(gone);
  quiesce_waiters.clear();
  version_waiters.clear();
}

void Runtime::Impl::on_result(Result& r) {
  --in_flight;
  if (auto a = actors.find(r.pid); a != actors.end()) a->second->outstanding = false;
  auto it = processes.find(r.pid);
  // Results of terminated processes are dropped.
  if (it == processes.end()) return;
  dropped += r.dropped;
  set_slot(it->second.spec->output, r.pid, std::move(r.output), true);
  if (it->second.dirty) {
    it->second.dirty = false;
    dispatch(r.pid);
  }
}

void Runtime::Impl::on_exited(const Exited& e) {
  if (auto a = actors.find(e.pid); a != actors.end()) {
    if (a->second->outstanding) --in_flight;
    a->second->thread.join();
    actors.erase(a);
  }
  if (!e.crashed) return;
  --pending_exits;
  auto it = processes.find(e.pid);
  if (it == processes.end()) return;
  if (it->second.contraction) {
    cleave_record(*it->second.contraction);
  } else {
    remove_process(e.pid, SlotPolicy::Retain);
  }
}

void Runtime::Impl::check_idle() {
  if (!idle() || quiesce_waiters.empty()) return;
  for (auto& p : quiesce_waiters) p->set_value();
  quiesce_waiters.clear();
}

void Runtime::Impl::emit(const GraphEvent& ev) {
  graph_state.apply(ev);
  if (options.event_sink) options.event_sink(ev);
}

Runtime::Impl::Cell& Runtime::Impl::cell(VariableId v) {
  auto it = cells.find(v);
  if (it == cells.end()) raise(ErrorCode::UnknownVariable, to_string(v));
  return it->second;
}

Runtime::Impl::Process& Runtime::Impl::process(ProcessId p) {
  auto it = processes.find(p);
  if (it == processes.end()) raise(ErrorCode::UnknownProcess, to_string(p));
  return it->second;
}

void Runtime::Impl::start_process(ProcessId pid, const ProcessSpec& spec,
                                  std::optional<ContractionId> contraction) {
  emit(event::ProcessSpawned{pid, spec, contraction});
  auto shared = std::make_shared<const ProcessSpec>(spec);
  processes.emplace(pid, Process{shared, contraction});
  for (auto in : spec.inputs()) cells.at(in).readers.insert(pid);
  auto actor = std::make_unique<Actor>();
  Actor* raw = actor.get();
  actor->thread = std::thread(actor_loop, this, pid, raw);
  actors.emplace(pid, std::move(actor));
}

void Runtime::Impl::remove_process(ProcessId pid, SlotPolicy policy) {
  auto it = processes.find(pid);
  const ProcessSpec spec = *it->second.spec;
  processes.erase(it);
  for (auto in : spec.inputs()) cells.at(in).readers.erase(pid);
  if (policy == SlotPolicy::Retain) {
    Cell& out = cells.at(spec.output);
    if (auto s = out.slots.find(pid); s != out.slots.end()) {
      merge_into(out.retained, *s->second);
      out.slots.erase(s);
    }
  }
  emit(event::ProcessTerminated{pid});
  if (auto a = actors.find(pid); a != actors.end()) a->second->mailbox.push(Stop{});
}

void Runtime::Impl::dispatch(ProcessId pid) {
  Process& p = processes.at(pid);
  Actor& actor = *actors.at(pid);
  if (actor.outstanding) {
    p.dirty = true;
    return;
  }
  Job job{p.spec, {}};
  for (auto in : p.spec->inputs()) job.inputs.push_back(cells.at(in).value);
  actor.outstanding = true;
  ++in_flight;
  actor.mailbox.push(std::move(job));
}

void Runtime::Impl::set_slot(VariableId out, ProcessId writer, Snapshot value, bool notify) {
  cells.at(out).slots[writer] = std::move(value);
  refresh(out, notify);
}

void Runtime::Impl::transfer_slot(VariableId v, ProcessId from, ProcessId to) {
  Cell& c = cells.at(v);
  auto node = c.slots.extract(from);
  if (node.empty()) return;
  node.key() = to;
  c.slots.insert(std::move(node));
}

void Runtime::Impl::refresh(VariableId v, bool notify) {
  Cell& c = cells.at(v);
  Snapshot next;
  if (c.user_state.empty() && c.retained.empty() && c.slots.size() == 1) {
    next = c.slots.begin()->second;
  } else {
    CollectionValue merged = c.user_state;
    merge_into(merged, c.retained);
    for (const auto& [pid, s] : c.slots) merge_into(merged, *s);
    next = std::make_shared<const CollectionValue>(std::move(merged));
  }
  if (next == c.value || *next == *c.value) {
    c.value = std::move(next);
    return;
  }
  c.value = std::move(next);
  ++c.version;
  if (options.event_sink) options.event_sink(event::ValueChanged{v, c.version});

  auto [lo, hi] = version_waiters.equal_range(v);
  for (auto it = lo; it != hi;) {
    if (c.version > it->second.above) {
      it->second.promise->set_value(c.version);
      it = version_waiters.erase(it);
    } else {
      ++it;
    }
  }
  if (notify) {
    for (auto reader : c.readers) dispatch(reader);
  }
}

std::uint64_t Runtime::Impl::advance_round_locked() {
  ++rounds;
  graph_state.expire_leases(rounds);
  if (pass_interval != 0 && rounds % pass_interval == 0) optimization_pass_locked();
  return rounds;
}

void Runtime::Impl::add_user_edge(event::UserOp::Kind kind, UserId user, VariableId v) {
  emit(event::UserOp{kind, user, v, ids.next<EndpointTag>(), rounds + options.lease_rounds});
}

// ---------------------------------------------------------------------------

Runtime::Runtime(RuntimeOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Runtime::~Runtime() = default;

VariableId Runtime::declare_variable() {
  return impl_->call([this] {
    VariableId v = impl_->ids.next<VariableTag>();
    impl_->cells.emplace(v, Impl::Cell{});
    impl_->emit(event::VariableDeclared{v});
    return v;
  });
}

UserId Runtime::new_user() {
  return impl_->call([this] { return impl_->ids.next<UserTag>(); });
}

std::uint64_t Runtime::update_variable(VariableId v, const CollectionValue& delta, UserId actor) {
  return impl_->call([&] {
    Impl& rt = *impl_;
    rt.cell(v);
    if (rt.options.auto_advance_rounds) rt.advance_round_locked();
    rt.cleave_if_contracted(v);
    rt.add_user_edge(event::UserOp::Kind::Write, actor, v);
    Impl::Cell& c = rt.cells.at(v);
    if (merge_into(c.user_state, delta)) rt.refresh(v, true);
    return c.version;
  });
}

CollectionValue Runtime::read_variable(VariableId v, UserId actor) {
  return impl_->call([&] {
    Impl& rt = *impl_;
    rt.cell(v);
    rt.cleave_if_contracted(v);
    rt.add_user_edge(event::UserOp::Kind::Read, actor, v);
    return *rt.cells.at(v).value;
  });
}

ProcessId Runtime::spawn_process(const ProcessSpec& spec) {
  return impl_->call([&] {
    Impl& rt = *impl_;
    const auto inputs = spec.inputs();
    for (auto in : inputs) rt.cell(in);
    rt.cell(spec.output);
    if (!spec.is_unary() && spec.as_binary().left == spec.as_binary().right) {
      raise(ErrorCode::InvalidSpec, "binary process needs two distinct inputs");
    }
    if (rt.graph_state.would_create_cycle(inputs, spec.output)) {
      raise(ErrorCode::CycleDetected, "spawn would close a cycle");
    }
    for (auto in : inputs) rt.cleave_if_contracted(in);
    rt.cleave_if_contracted(spec.output);
    ProcessId pid = rt.ids.next<ProcessTag>();
    rt.start_process(pid, spec, std::nullopt);
    rt.dispatch(pid);
    return pid;
  });
}

void Runtime::terminate_process(ProcessId p) {
  impl_->call([&] {
    Impl::Process& proc = impl_->process(p);
    if (proc.contraction) {
      impl_->cleave_record(*proc.contraction);
    } else {
      impl_->remove_process(p, Impl::SlotPolicy::Retain);
    }
  });
}

void Runtime::inject_failure(ProcessId p) {
  impl_->call([&] {
    Impl::Process& proc = impl_->process(p);
    if (proc.crashing) return;
    proc.crashing = true;
    ++impl_->pending_exits;
    impl_->actors.at(p)->mailbox.push(Impl::Crash{});
  });
}

void Runtime::quiesce() {
  auto done = std::make_shared<std::promise<void>>();
  auto fut = done->get_future();
  impl_->call([&] {
    if (impl_->idle()) {
      done->set_value();
    } else {
      impl_->quiesce_waiters.push_back(done);
    }
  });
  fut.get();
}

std::uint64_t Runtime::advance_round() {
  return impl_->call([this] { return impl_->advance_round_locked(); });
}

std::uint64_t Runtime::round() {
  return impl_->call([this] { return impl_->rounds; });
}

std::vector<ContractionRecord> Runtime::optimization_pass() {
  return impl_->call([this] { return impl_->optimization_pass_locked(); });
}

ContractionRecord Runtime::contract_path(const Path& path) {
  return impl_->call([&] { return impl_->contract_path_locked(path); });
}

void Runtime::cleave_vertex(VariableId v) {
  impl_->call([&] {
    impl_->cell(v);
    auto tag = impl_->graph_state.tag(v);
    if (!tag) raise(ErrorCode::NotContracted, to_string(v));
    impl_->cleave_record(*tag);
  });
}

void Runtime::schedule_passes(std::uint64_t interval) {
  if (interval < 1) raise(ErrorCode::InvalidInterval, "interval must be at least 1");
  impl_->call([&] { impl_->pass_interval = interval; });
}

void Runtime::cancel_passes() {
  impl_->call([this] { impl_->pass_interval = 0; });
}

std::vector<ContractionRecord> Runtime::contractions() {
  return impl_->call([this] {
    std::vector<ContractionRecord> out;
    for (const auto& [id, rec] : impl_->store) out.push_back(rec);
    return out;
  });
}

std::string Runtime::soft_deletion_store() { return to_text(contractions()); }

CollectionValue Runtime::peek(VariableId v) {
  return impl_->call([&] { return *impl_->cell(v).value; });
}

std::uint64_t Runtime::version(VariableId v) {
  return impl_->call([&] { return impl_->cell(v).version; });
}

std::uint64_t Runtime::wait_for_version(VariableId v, std::uint64_t above) {
  auto reached = std::make_shared<std::promise<std::uint64_t>>();
  auto fut = reached->get_future();
  impl_->call([&] {
    Impl::Cell& c = impl_->cell(v);
    if (c.version > above) {
      reached->set_value(c.version);
    } else {
      impl_->version_waiters.emplace(v, Impl::VersionWaiter{above, reached});
    }
  });
  return fut.get();
}

DepGraph Runtime::graph() {
  return impl_->call([this] { return impl_->graph_state; });
}

std::vector<ProcessInfo> Runtime::live_processes() {
  return impl_->call([this] {
    std::vector<ProcessInfo> out;
    for (const auto& [pid, p] : impl_->processes) {
      out.push_back(ProcessInfo{pid, *p.spec, p.contraction.has_value()});
    }
    return out;
  });
}

std::vector<VariableId> Runtime::variables() {
  return impl_->call([this] {
    std::vector<VariableId> out;
    for (const auto& [v, c] : impl_->cells) out.push_back(v);
    return out;
  });
}

bool Runtime::is_contracted(VariableId v) {
  return impl_->call([&] {
    impl_->cell(v);
    return impl_->graph_state.tag(v).has_value();
  });
}

std::uint64_t Runtime::dropped_rows() {
  return impl_->call([this] { return impl_->dropped; });
}

}  // namespace dpc
