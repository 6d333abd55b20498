// SPDX-License-Identifier: Apache-2.0
// dpc: latency harness for the dataflow runtime.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dpc/c_api.h"

namespace {

constexpr int kConfigExit = 2;

struct Owned {
  char* p = nullptr;
  ~Owned() { dpc_string_free(p); }
};

int fail(dpc_status st) {
  std::cerr << "dpc: " << dpc_last_error() << "\n";
  return st == DPC_E_CONFIG ? kConfigExit : 1;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return false;
  std::stringstream ss;
  ss << f.rdbuf();
  out = ss.str();
  return true;
}

bool write_file(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return bool(std::cout);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  return bool(f);
}

struct ScenarioFlags {
  std::string scenario = "chain";
  std::string variant = "no-contraction";
  std::string sql_file;
  dpc_scenario_config cfg{};
};

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& f, bool with_demo) {
  if (with_demo) {
    cmd->add_option("--scenario", f.scenario, "chain, sql or product (cross-product demo)")
        ->check(CLI::IsMember({"chain", "sql", "product"}));
  } else {
    cmd->add_option("--scenario", f.scenario, "chain or sql")->check(CLI::IsMember({"chain", "sql"}));
  }
  cmd->add_option("--variant", f.variant, "no-contraction, contraction or contraction-random-reads")
      ->check(CLI::IsMember({"no-contraction", "contraction", "contraction-random-reads"}));
  cmd->add_option("--chain-length", f.cfg.chain_length, "vertices along the chain");
  cmd->add_option("--pass-interval", f.cfg.pass_interval, "rounds between optimization passes");
  cmd->add_option("--seed", f.cfg.rng_seed, "RNG seed");
  cmd->add_option("--lease-rounds", f.cfg.lease_rounds, "rounds a user edge stays in the graph");
  cmd->add_option("--sql-script", f.sql_file, "composed-view script for the sql scenario");
}

// Returns 0 or an exit code.
int finish_config(ScenarioFlags& f, std::string& script) {
  f.cfg.scenario = f.scenario == "sql" ? DPC_SCENARIO_SQL : DPC_SCENARIO_CHAIN;
  if (f.variant == "contraction") {
    f.cfg.variant = DPC_CONTRACTION;
  } else if (f.variant == "contraction-random-reads") {
    f.cfg.variant = DPC_CONTRACTION_RANDOM_READS;
  } else {
    f.cfg.variant = DPC_NO_CONTRACTION;
  }
  if (!f.sql_file.empty()) {
    if (!read_file(f.sql_file, script)) {
      std::cerr << "dpc: cannot read " << f.sql_file << "\n";
      return kConfigExit;
    }
    f.cfg.sql_script = script.c_str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dataflow path-contraction latency harness"};
  app.require_subcommand(1);

  ScenarioFlags run_flags;
  dpc_scenario_config_default(&run_flags.cfg);
  std::string run_out;
  auto* run = app.add_subcommand("run", "drive updates and write latency samples as CSV");
  add_scenario_flags(run, run_flags, false);
  run->add_option("--updates", run_flags.cfg.updates, "updates to measure");
  run->add_option("--read-every", run_flags.cfg.read_every, "read the output every N updates");
  run->add_option("--read-probability", run_flags.cfg.random_read_probability,
                  "chance per update of a random interior read");
  run->add_option("--out", run_out, "CSV path, stdout when omitted");

  std::string sum_in;
  std::uint64_t warmup = 10;
  auto* sum = app.add_subcommand("summarize", "median and p95 per scenario and variant");
  sum->add_option("--in", sum_in, "CSV produced by run")->required();
  sum->add_option("--warmup", warmup, "leading samples to skip");

  ScenarioFlags dot_flags;
  dpc_scenario_config_default(&dot_flags.cfg);
  std::string dot_out;
  auto* dot = app.add_subcommand("export-dot", "write the scenario graph in DOT");
  add_scenario_flags(dot, dot_flags, true);
  dot->add_option("--out", dot_out, "DOT path, stdout when omitted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigExit;
  }

  if (run->parsed()) {
    std::string script;
    if (int rc = finish_config(run_flags, script)) return rc;
    Owned csv;
    if (auto st = dpc_bench_run(&run_flags.cfg, &csv.p)) return fail(st);
    if (run_out.empty()) {
      std::cout << csv.p;
      return 0;
    }
    if (auto st = dpc_bench_write_csv(csv.p, run_out.c_str())) return fail(st);
    return 0;
  }

  if (sum->parsed()) {
    Owned csv, report;
    if (auto st = dpc_bench_read_file(sum_in.c_str(), &csv.p)) return fail(st);
    if (auto st = dpc_bench_summary_report(csv.p, warmup, &report.p)) return fail(st);
    std::cout << report.p;
    return 0;
  }

  std::string script;
  if (int rc = finish_config(dot_flags, script)) return rc;
  Owned text;
  if (dot_flags.scenario == "product") {
    if (auto st = dpc_bench_product_demo(&text.p, nullptr)) return fail(st);
  } else if (auto st = dpc_bench_export_dot(&dot_flags.cfg, &text.p)) {
    return fail(st);
  }
  if (!write_file(dot_out, text.p)) {
    std::cerr << "dpc: cannot write " << dot_out << "\n";
    return 1;
  }
  return 0;
}
