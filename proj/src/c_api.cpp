// SPDX-License-Identifier: Apache-2.0
#include "dpc/c_api.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <map>
#include <memory>
#include <string>
#include <utility>

#include "dpc/bench.hpp"
#include "dpc/error.hpp"
#include "dpc/runtime.hpp"
#include "dpc/sql.hpp"
#include "dpc/text_format.hpp"

struct dpc_runtime {
  dpc::Runtime rt;
  explicit dpc_runtime(dpc::RuntimeOptions o) : rt(std::move(o)) {}
};

struct dpc_sql_session {
  dpc::Runtime& rt;
  dpc::sql::Session session;
  explicit dpc_sql_session(dpc::Runtime& r) : rt(r), session(r) {}
};

namespace {

thread_local std::string last_error;

dpc_status status_of(dpc::ErrorCode code) {
  using dpc::ErrorCode;
  switch (code) {
    case ErrorCode::MissingField:
    case ErrorCode::TypeMismatch:
    case ErrorCode::DivisionByZero:
    case ErrorCode::Overflow: return DPC_E_EVALUATION;
    case ErrorCode::ParseError: return DPC_E_PARSE;
    case ErrorCode::UnknownVariable: return DPC_E_UNKNOWN_VARIABLE;
    case ErrorCode::UnknownProcess: return DPC_E_UNKNOWN_PROCESS;
    case ErrorCode::UnknownVertex: return DPC_E_UNKNOWN_VERTEX;
    case ErrorCode::CycleDetected: return DPC_E_CYCLE;
    case ErrorCode::InvalidSpec: return DPC_E_INVALID_SPEC;
    case ErrorCode::PathInvalidated: return DPC_E_PATH_INVALIDATED;
    case ErrorCode::NotContracted: return DPC_E_NOT_CONTRACTED;
    case ErrorCode::InvalidInterval: return DPC_E_INVALID_INTERVAL;
    case ErrorCode::SyntaxError: return DPC_E_SYNTAX;
    case ErrorCode::UnknownSource: return DPC_E_UNKNOWN_SOURCE;
    case ErrorCode::UnknownColumn: return DPC_E_UNKNOWN_COLUMN;
    case ErrorCode::ConfigError: return DPC_E_CONFIG;
    case ErrorCode::IoError: return DPC_E_IO;
    case ErrorCode::EmptyInput: return DPC_E_EMPTY_INPUT;
    case ErrorCode::ShutDown: return DPC_E_SHUT_DOWN;
  }
  return DPC_E_INTERNAL;
}

template <class F>
dpc_status guard(F&& f) {
  try {
    f();
    last_error.clear();
    return DPC_OK;
  } catch (const dpc::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return DPC_E_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return DPC_E_INTERNAL;
  }
}

dpc_status invalid(const char* what) {
  last_error = what;
  return DPC_E_INVALID_ARGUMENT;
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

dpc::VariableId var(dpc_variable v) { return dpc::VariableId{v}; }

dpc::bench::ScenarioConfig to_config(const dpc_scenario_config& c) {
  dpc::bench::ScenarioConfig cfg;
  switch (c.scenario) {
    case DPC_SCENARIO_CHAIN: cfg.scenario = dpc::bench::Scenario::Chain; break;
    case DPC_SCENARIO_SQL: cfg.scenario = dpc::bench::Scenario::Sql; break;
    default: dpc::raise(dpc::ErrorCode::ConfigError, "unknown scenario");
  }
  switch (c.variant) {
    case DPC_NO_CONTRACTION: cfg.variant = dpc::bench::Variant::NoContraction; break;
    case DPC_CONTRACTION: cfg.variant = dpc::bench::Variant::Contraction; break;
    case DPC_CONTRACTION_RANDOM_READS:
      cfg.variant = dpc::bench::Variant::ContractionRandomReads;
      break;
    default: dpc::raise(dpc::ErrorCode::ConfigError, "unknown variant");
  }
  cfg.chain_length = c.chain_length;
  cfg.updates = c.updates;
  cfg.pass_interval = c.pass_interval;
  cfg.read_every = c.read_every;
  cfg.rng_seed = c.rng_seed;
  cfg.lease_rounds = c.lease_rounds;
  cfg.random_read_probability = c.random_read_probability;
  if (c.sql_script != nullptr) cfg.sql_script = c.sql_script;
  return cfg;
}

}  // namespace

extern "C" {

const char* dpc_last_error(void) { return last_error.c_str(); }

const char* dpc_status_name(dpc_status status) {
  switch (status) {
    case DPC_OK: return "ok";
    case DPC_E_INVALID_ARGUMENT: return "invalid argument";
    case DPC_E_PARSE: return "parse error";
    case DPC_E_UNKNOWN_VARIABLE: return "unknown variable";
    case DPC_E_UNKNOWN_PROCESS: return "unknown process";
    case DPC_E_UNKNOWN_VERTEX: return "unknown vertex";
    case DPC_E_CYCLE: return "cycle detected";
    case DPC_E_INVALID_SPEC: return "invalid spec";
    case DPC_E_PATH_INVALIDATED: return "path invalidated";
    case DPC_E_NOT_CONTRACTED: return "not contracted";
    case DPC_E_INVALID_INTERVAL: return "invalid interval";
    case DPC_E_SYNTAX: return "syntax error";
    case DPC_E_UNKNOWN_SOURCE: return "unknown source";
    case DPC_E_UNKNOWN_COLUMN: return "unknown column";
    case DPC_E_CONFIG: return "config error";
    case DPC_E_IO: return "io error";
    case DPC_E_EMPTY_INPUT: return "empty input";
    case DPC_E_EVALUATION: return "evaluation error";
    case DPC_E_SHUT_DOWN: return "shut down";
    case DPC_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void dpc_string_free(char* s) { std::free(s); }

void dpc_runtime_options_default(dpc_runtime_options* out) {
  if (out == nullptr) return;
  dpc::RuntimeOptions d;
  out->id_seed = d.id_seed;
  out->lease_rounds = d.lease_rounds;
  out->auto_advance_rounds = d.auto_advance_rounds ? 1 : 0;
}

dpc_status dpc_runtime_create(const dpc_runtime_options* options, dpc_runtime** out) {
  if (out == nullptr) return invalid("null output");
  return guard([&] {
    dpc::RuntimeOptions o;
    if (options != nullptr) {
      o.id_seed = options->id_seed;
      o.lease_rounds = options->lease_rounds;
      o.auto_advance_rounds = options->auto_advance_rounds != 0;
    }
    *out = new dpc_runtime(std::move(o));
  });
}

void dpc_runtime_destroy(dpc_runtime* rt) { delete rt; }

dpc_status dpc_declare_variable(dpc_runtime* rt, dpc_variable* out) {
  if (rt == nullptr || out == nullptr) return invalid("null argument");
  return guard([&] { *out = rt->rt.declare_variable().raw; });
}

dpc_status dpc_new_user(dpc_runtime* rt, dpc_user* out) {
  if (rt == nullptr || out == nullptr) return invalid("null argument");
  return guard([&] { *out = rt->rt.new_user().raw; });
}

dpc_status dpc_update_variable(dpc_runtime* rt, dpc_variable v, const char* delta_text,
                               dpc_user actor, uint64_t* out_version) {
  if (rt == nullptr || delta_text == nullptr) return invalid("null argument");
  return guard([&] {
    auto version = rt->rt.update_variable(var(v), dpc::parse_collection(delta_text),
                                          dpc::UserId{actor});
    if (out_version != nullptr) *out_version = version;
  });
}

dpc_status dpc_read_variable(dpc_runtime* rt, dpc_variable v, dpc_user actor, char** out_text) {
  if (rt == nullptr || out_text == nullptr) return invalid("null argument");
  return guard([&] { *out_text = dup(dpc::to_text(rt->rt.read_variable(var(v), dpc::UserId{actor}))); });
}

dpc_status dpc_variable_version(dpc_runtime* rt, dpc_variable v, uint64_t* out) {
  if (rt == nullptr || out == nullptr) return invalid("null argument");
  return guard([&] { *out = rt->rt.version(var(v)); });
}

dpc_status dpc_spawn_unary(dpc_runtime* rt, dpc_variable input, const char* transform_text,
                           dpc_variable output, dpc_process* out) {
  if (rt == nullptr || transform_text == nullptr || out == nullptr) return invalid("null argument");
  return guard([&] {
    auto spec = dpc::ProcessSpec::unary(var(input), dpc::parse_transform(transform_text), var(output));
    *out = rt->rt.spawn_process(spec).raw;
  });
}

dpc_status dpc_spawn_binary(dpc_runtime* rt, dpc_set_op op, dpc_variable left,
                            dpc_variable right, dpc_variable output, dpc_process* out) {
  if (rt == nullptr || out == nullptr) return invalid("null argument");
  dpc::SetOp set_op;
  switch (op) {
    case DPC_UNION: set_op = dpc::SetOp::Union; break;
    case DPC_INTERSECTION: set_op = dpc::SetOp::Intersection; break;
    case DPC_PRODUCT: set_op = dpc::SetOp::Product; break;
    default: return invalid("unknown set operator");
  }
  return guard([&] {
    *out = rt->rt.spawn_process(dpc::ProcessSpec::binary(set_op, var(left), var(right), var(output))).raw;
  });
}

dpc_status dpc_terminate_process(dpc_runtime* rt, dpc_process p) {
  if (rt == nullptr) return invalid("null runtime");
  return guard([&] { rt->rt.terminate_process(dpc::ProcessId{p}); });
}

dpc_status dpc_inject_failure(dpc_runtime* rt, dpc_process p) {
  if (rt == nullptr) return invalid("null runtime");
  return guard([&] { rt->rt.inject_failure(dpc::ProcessId{p}); });
}

dpc_status dpc_quiesce(dpc_runtime* rt) {
  if (rt == nullptr) return invalid("null runtime");
  return guard([&] { rt->rt.quiesce(); });
}

dpc_status dpc_advance_round(dpc_runtime* rt, uint64_t* out_round) {
  if (rt == nullptr) return invalid("null runtime");
  return guard([&] {
    auto r = rt->rt.advance_round();
    if (out_round != nullptr) *out_round = r;
  });
}

dpc_status dpc_optimization_pass(dpc_runtime* rt, uint64_t* out_contracted) {
  if (rt == nullptr) return invalid("null runtime");
  return guard([&] {
    auto n = rt->rt.optimization_pass().size();
    if (out_contracted != nullptr) *out_contracted = n;
  });
}

dpc_status dpc_cleave_vertex(dpc_runtime* rt, dpc_variable v) {
  if (rt == nullptr) return invalid("null runtime");
  return guard([&] { rt->rt.cleave_vertex(var(v)); });
}

dpc_status dpc_schedule_passes(dpc_runtime* rt, uint64_t interval) {
  if (rt == nullptr) return invalid("null runtime");
  return guard([&] { rt->rt.schedule_passes(interval); });
}

dpc_status dpc_cancel_passes(dpc_runtime* rt) {
  if (rt == nullptr) return invalid("null runtime");
  return guard([&] { rt->rt.cancel_passes(); });
}

dpc_status dpc_is_contracted(dpc_runtime* rt, dpc_variable v, int* out) {
  if (rt == nullptr || out == nullptr) return invalid("null argument");
  return guard([&] { *out = rt->rt.is_contracted(var(v)) ? 1 : 0; });
}

dpc_status dpc_soft_deletion_store(dpc_runtime* rt, char** out_text) {
  if (rt == nullptr || out_text == nullptr) return invalid("null argument");
  return guard([&] { *out_text = dup(rt->rt.soft_deletion_store()); });
}

dpc_status dpc_export_dot(dpc_runtime* rt, char** out_text) {
  if (rt == nullptr || out_text == nullptr) return invalid("null argument");
  return guard([&] { *out_text = dup(rt->rt.graph().to_dot({})); });
}

dpc_status dpc_sql_session_create(dpc_runtime* rt, dpc_sql_session** out) {
  if (rt == nullptr || out == nullptr) return invalid("null argument");
  return guard([&] { *out = new dpc_sql_session(rt->rt); });
}

void dpc_sql_session_destroy(dpc_sql_session* s) { delete s; }

dpc_status dpc_sql_execute(dpc_sql_session* s, const char* script, char** out_text) {
  if (s == nullptr || script == nullptr) return invalid("null argument");
  return guard([&] {
    auto results = s->session.execute_script(script);
    if (out_text == nullptr) return;
    std::string text;
    for (const auto& r : results) text += dpc::to_text(r) + "--\n";
    *out_text = dup(text);
  });
}

dpc_status dpc_sql_export_dot(dpc_sql_session* s, char** out_text) {
  if (s == nullptr || out_text == nullptr) return invalid("null argument");
  return guard([&] {
    s->rt.quiesce();
    *out_text = dup(s->rt.graph().to_dot(s->session.names()));
  });
}

void dpc_scenario_config_default(dpc_scenario_config* out) {
  if (out == nullptr) return;
  dpc::bench::ScenarioConfig d;
  out->scenario = DPC_SCENARIO_CHAIN;
  out->variant = DPC_NO_CONTRACTION;
  out->chain_length = d.chain_length;
  out->updates = d.updates;
  out->pass_interval = d.pass_interval;
  out->read_every = d.read_every;
  out->rng_seed = d.rng_seed;
  out->lease_rounds = d.lease_rounds;
  out->random_read_probability = d.random_read_probability;
  out->sql_script = nullptr;
}

dpc_status dpc_bench_run(const dpc_scenario_config* cfg, char** out_csv) {
  if (cfg == nullptr || out_csv == nullptr) return invalid("null argument");
  return guard([&] { *out_csv = dup(dpc::bench::to_csv(dpc::bench::run_scenario(to_config(*cfg)))); });
}

dpc_status dpc_bench_write_csv(const char* csv_text, const char* path) {
  if (csv_text == nullptr || path == nullptr) return invalid("null argument");
  return guard([&] { dpc::bench::emit_csv(dpc::bench::parse_csv(csv_text), path); });
}

dpc_status dpc_bench_read_file(const char* path, char** out_text) {
  if (path == nullptr || out_text == nullptr) return invalid("null argument");
  return guard([&] { *out_text = dup(dpc::bench::to_csv(dpc::bench::read_csv(path))); });
}

dpc_status dpc_bench_summarize(const char* csv_text, uint64_t warmup, dpc_summary* out) {
  if (csv_text == nullptr || out == nullptr) return invalid("null argument");
  return guard([&] {
    auto s = dpc::bench::summarize(dpc::bench::parse_csv(csv_text), warmup);
    *out = dpc_summary{s.median_us, s.p95_us, s.count};
  });
}

dpc_status dpc_bench_summary_report(const char* csv_text, uint64_t warmup, char** out_text) {
  if (csv_text == nullptr || out_text == nullptr) return invalid("null argument");
  return guard([&] {
    using namespace dpc::bench;
    std::map<std::pair<Scenario, Variant>, std::vector<LatencySample>> groups;
    for (const auto& s : parse_csv(csv_text)) groups[{s.scenario, s.variant}].push_back(s);
    if (groups.empty()) dpc::raise(dpc::ErrorCode::EmptyInput, "no samples to summarize");
    std::string text = "scenario,variant,count,median_us,p95_us\n";
    char buf[160];
    for (const auto& [key, samples] : groups) {
      auto s = summarize(samples, warmup);
      std::snprintf(buf, sizeof buf, "%s,%s,%zu,%.3f,%.3f\n", to_string(key.first),
                    to_string(key.second), s.count, s.median_us, s.p95_us);
      text += buf;
    }
    *out_text = dup(text);
  });
}

dpc_status dpc_bench_export_dot(const dpc_scenario_config* cfg, char** out_text) {
  if (cfg == nullptr || out_text == nullptr) return invalid("null argument");
  return guard([&] { *out_text = dup(dpc::bench::scenario_dot(to_config(*cfg))); });
}

dpc_status dpc_bench_product_demo(char** out_text, uint64_t* out_contracted) {
  if (out_text == nullptr) return invalid("null argument");
  return guard([&] {
    std::size_t n = 0;
    *out_text = dup(dpc::bench::product_demo_dot(&n));
    if (out_contracted != nullptr) *out_contracted = n;
  });
}

}  // extern "C"
