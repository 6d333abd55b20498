/* SPDX-License-Identifier: Apache-2.0 */
#ifndef DPC_C_API_H
#define DPC_C_API_H

/*
 * C interface to the dataflow runtime. Handles are opaque; every call
 * returns a dpc_status and writes results through out-parameters. Strings
 * returned through `char**` are owned by the caller and released with
 * dpc_string_free. Collections and transforms cross the boundary in their
 * canonical text form. After a failed call, dpc_last_error() describes the
 * failure on the calling thread.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(DPC_BUILDING_LIBRARY)
#    define DPC_API __declspec(dllexport)
#  else
#    define DPC_API __declspec(dllimport)
#  endif
#else
#  define DPC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dpc_status {
  DPC_OK = 0,
  DPC_E_INVALID_ARGUMENT = 1,
  DPC_E_PARSE = 2,
  DPC_E_UNKNOWN_VARIABLE = 3,
  DPC_E_UNKNOWN_PROCESS = 4,
  DPC_E_UNKNOWN_VERTEX = 5,
  DPC_E_CYCLE = 6,
  DPC_E_INVALID_SPEC = 7,
  DPC_E_PATH_INVALIDATED = 8,
  DPC_E_NOT_CONTRACTED = 9,
  DPC_E_INVALID_INTERVAL = 10,
  DPC_E_SYNTAX = 11,
  DPC_E_UNKNOWN_SOURCE = 12,
  DPC_E_UNKNOWN_COLUMN = 13,
  DPC_E_CONFIG = 14,
  DPC_E_IO = 15,
  DPC_E_EMPTY_INPUT = 16,
  DPC_E_EVALUATION = 17,
  DPC_E_SHUT_DOWN = 18,
  DPC_E_INTERNAL = 99
} dpc_status;

typedef struct dpc_runtime dpc_runtime;
typedef struct dpc_sql_session dpc_sql_session;

typedef uint64_t dpc_variable;
typedef uint64_t dpc_process;
typedef uint64_t dpc_user;

typedef enum dpc_set_op { DPC_UNION = 0, DPC_INTERSECTION = 1, DPC_PRODUCT = 2 } dpc_set_op;

typedef struct dpc_runtime_options {
  uint64_t id_seed;
  uint64_t lease_rounds;
  int auto_advance_rounds;
} dpc_runtime_options;

typedef enum dpc_scenario { DPC_SCENARIO_CHAIN = 0, DPC_SCENARIO_SQL = 1 } dpc_scenario;

typedef enum dpc_variant {
  DPC_NO_CONTRACTION = 0,
  DPC_CONTRACTION = 1,
  DPC_CONTRACTION_RANDOM_READS = 2
} dpc_variant;

typedef struct dpc_scenario_config {
  dpc_scenario scenario;
  dpc_variant variant;
  uint64_t chain_length;
  uint64_t updates;
  uint64_t pass_interval;
  uint64_t read_every;
  uint64_t rng_seed;
  uint64_t lease_rounds;
  double random_read_probability;
  /* Optional composed-view script text for the sql scenario; may be NULL. */
  const char* sql_script;
} dpc_scenario_config;

typedef struct dpc_summary {
  double median_us;
  double p95_us;
  uint64_t count;
} dpc_summary;

DPC_API const char* dpc_last_error(void);
DPC_API const char* dpc_status_name(dpc_status status);
DPC_API void dpc_string_free(char* s);

DPC_API void dpc_runtime_options_default(dpc_runtime_options* out);
DPC_API dpc_status dpc_runtime_create(const dpc_runtime_options* options, dpc_runtime** out);
DPC_API void dpc_runtime_destroy(dpc_runtime* rt);

DPC_API dpc_status dpc_declare_variable(dpc_runtime* rt, dpc_variable* out);
DPC_API dpc_status dpc_new_user(dpc_runtime* rt, dpc_user* out);
DPC_API dpc_status dpc_update_variable(dpc_runtime* rt, dpc_variable v, const char* delta_text,
                                       dpc_user actor, uint64_t* out_version);
DPC_API dpc_status dpc_read_variable(dpc_runtime* rt, dpc_variable v, dpc_user actor,
                                     char** out_text);
DPC_API dpc_status dpc_variable_version(dpc_runtime* rt, dpc_variable v, uint64_t* out);
DPC_API dpc_status dpc_spawn_unary(dpc_runtime* rt, dpc_variable input, const char* transform_text,
                                   dpc_variable output, dpc_process* out);
DPC_API dpc_status dpc_spawn_binary(dpc_runtime* rt, dpc_set_op op, dpc_variable left,
                                    dpc_variable right, dpc_variable output, dpc_process* out);
DPC_API dpc_status dpc_terminate_process(dpc_runtime* rt, dpc_process p);
DPC_API dpc_status dpc_inject_failure(dpc_runtime* rt, dpc_process p);
DPC_API dpc_status dpc_quiesce(dpc_runtime* rt);
DPC_API dpc_status dpc_advance_round(dpc_runtime* rt, uint64_t* out_round);

DPC_API dpc_status dpc_optimization_pass(dpc_runtime* rt, uint64_t* out_contracted);
DPC_API dpc_status dpc_cleave_vertex(dpc_runtime* rt, dpc_variable v);
DPC_API dpc_status dpc_schedule_passes(dpc_runtime* rt, uint64_t interval);
DPC_API dpc_status dpc_cancel_passes(dpc_runtime* rt);
DPC_API dpc_status dpc_is_contracted(dpc_runtime* rt, dpc_variable v, int* out);
DPC_API dpc_status dpc_soft_deletion_store(dpc_runtime* rt, char** out_text);
DPC_API dpc_status dpc_export_dot(dpc_runtime* rt, char** out_text);

DPC_API dpc_status dpc_sql_session_create(dpc_runtime* rt, dpc_sql_session** out);
DPC_API void dpc_sql_session_destroy(dpc_sql_session* s);
/* Runs a script; results of SELECT statements are written one after the
 * other, each followed by a line "--". */
DPC_API dpc_status dpc_sql_execute(dpc_sql_session* s, const char* script, char** out_text);
DPC_API dpc_status dpc_sql_export_dot(dpc_sql_session* s, char** out_text);

DPC_API void dpc_scenario_config_default(dpc_scenario_config* out);
DPC_API dpc_status dpc_bench_run(const dpc_scenario_config* cfg, char** out_csv);
DPC_API dpc_status dpc_bench_write_csv(const char* csv_text, const char* path);
DPC_API dpc_status dpc_bench_read_file(const char* path, char** out_text);
/* Summarizes CSV text, skipping samples whose update index is below warmup. */
DPC_API dpc_status dpc_bench_summarize(const char* csv_text, uint64_t warmup, dpc_summary* out);
/* Per (scenario, variant) group summary table as text. */
DPC_API dpc_status dpc_bench_summary_report(const char* csv_text, uint64_t warmup, char** out_text);
DPC_API dpc_status dpc_bench_export_dot(const dpc_scenario_config* cfg, char** out_text);
/* DOT export of the cross-product demo after one optimization pass. */
DPC_API dpc_status dpc_bench_product_demo(char** out_text, uint64_t* out_contracted);

#ifdef __cplusplus
}
#endif

#endif /* DPC_C_API_H */
