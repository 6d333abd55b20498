// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "dpc/bench.hpp"
#include "dpc/contraction.hpp"
#include "dpc/sql.hpp"
#include "dpc/text_format.hpp"
#include "scenarios.hpp"
#include "sql_oracle.hpp"

namespace {

constexpr int kTransparencyCases = 1000;
constexpr int kRoundTripCases = 500;
constexpr int kCompositionCases = 1000;
constexpr int kPathGraphs = 500;
constexpr int kChurnCases = 300;
constexpr std::size_t kLatencyUpdates = 1000;
constexpr std::size_t kWarmup = 10;
/// Contraction median must be at most this fraction of the baseline median.
constexpr double kMaxLatencyRatio = 0.90;
constexpr int kSqlRows = 100;

int failures = 0;
std::ostringstream report;

void verdict(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

void transparency() {
  const auto t0 = std::chrono::steady_clock::now();
  int passed = 0, contracted = 0;
  std::string first;
  for (int i = 0; i < kTransparencyCases; ++i) {
    auto o = cases::transparency(0x1000 + std::uint64_t(i));
    if (o.ok) ++passed;
    else if (first.empty()) first = " first failure seed " + std::to_string(0x1000 + i) + ": " + o.detail;
    if (o.contractions > 0) ++contracted;
  }
  verdict(1, "transparency", passed == kTransparencyCases,
          std::to_string(passed) + "/" + std::to_string(kTransparencyCases) + " cases equal, " +
              std::to_string(contracted) + " exercised contraction, exact match, " +
              fmt("%.1fs", seconds_since(t0)) + first);
}

void round_trip() {
  int run = 0, passed = 0;
  std::string first;
  for (std::uint64_t seed = 0x2000; run < kRoundTripCases && seed < 0x2000 + 20 * kRoundTripCases; ++seed) {
    auto o = cases::round_trip(seed);
    if (!o) continue;
    ++run;
    if (o->ok) ++passed;
    else if (first.empty()) first = " first failure seed " + std::to_string(seed) + ": " + o->detail;
  }
  verdict(2, "round-trip isomorphism", run == kRoundTripCases && passed == run,
          std::to_string(passed) + "/" + std::to_string(run) +
              " contract-then-cleave cases isomorphic with equal values, exact" + first);
}

void composition() {
  int passed = 0;
  for (int i = 0; i < kCompositionCases; ++i) {
    gen::Source s(0x3000 + std::uint64_t(i));
    const auto f = s.transform(), g = s.transform();
    const auto c = s.collection(20);
    const auto fused = dpc::apply_transform(dpc::compose_transforms(f, g), c);
    if (fused == ref::apply(g, ref::apply(f, c)) &&
        fused == dpc::apply_transform(g, dpc::apply_transform(f, c))) {
      ++passed;
    }
  }
  verdict(3, "composition", passed == kCompositionCases,
          std::to_string(passed) + "/" + std::to_string(kCompositionCases) +
              " triples equal to sequential application, exact");
}

double median_of(const dpc::bench::ScenarioConfig& cfg) {
  const auto samples = dpc::bench::run_scenario(cfg);
  const auto s = dpc::bench::summarize(samples, kWarmup);
  report << dpc::bench::to_string(cfg.scenario) << "," << dpc::bench::to_string(cfg.variant) << ","
         << s.count << "," << fmt("%.3f,%.3f", s.median_us, s.p95_us) << "\n";
  return s.median_us;
}

dpc::bench::ScenarioConfig latency_config(dpc::bench::Scenario sc, dpc::bench::Variant v) {
  dpc::bench::ScenarioConfig cfg;
  cfg.scenario = sc;
  cfg.variant = v;
  cfg.chain_length = 5;
  cfg.updates = kLatencyUpdates;
  cfg.read_every = 10;
  cfg.rng_seed = 42;
  return cfg;
}

double chain_no = 0, chain_con = 0, chain_rr = 0;

void chain_latency() {
  using namespace dpc::bench;
  chain_no = median_of(latency_config(Scenario::Chain, Variant::NoContraction));
  chain_con = median_of(latency_config(Scenario::Chain, Variant::Contraction));
  const double ratio = chain_con / chain_no;
  report << "chain ratio contraction/no-contraction," << fmt("%.3f", ratio) << "\n";
  verdict(4, "chain latency", ratio <= kMaxLatencyRatio,
          fmt("median %.2fus with contraction vs %.2fus without, ratio %.3f", chain_con, chain_no, ratio) +
              fmt(" (reduction %.1f%%, need >= %.0f%%)", 100 * (1 - ratio), 100 * (1 - kMaxLatencyRatio)));
}

void dynamism() {
  using namespace dpc::bench;
  chain_rr = median_of(latency_config(Scenario::Chain, Variant::ContractionRandomReads));
  report << "chain ratio random-reads/no-contraction," << fmt("%.3f", chain_rr / chain_no) << "\n";
  verdict(5, "dynamism overhead", chain_rr >= chain_con,
          fmt("random-reads median %.2fus >= contraction median %.2fus; %.3fx no-contraction", chain_rr,
              chain_con, chain_rr / chain_no));
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void sql_scenario() {
  using namespace dpc::bench;
  std::string detail;
  bool ok = true;

  ScenarioConfig dot_cfg = latency_config(Scenario::Sql, Variant::NoContraction);
  const std::string golden = slurp(DPC_GOLDEN_DIR "/composed_views.dot");
  const bool dot_ok = !golden.empty() && scenario_dot(dot_cfg) == golden;
  ok = ok && dot_ok;
  detail += dot_ok ? "DOT matches golden" : "DOT differs from golden";

  const auto oracle = sqlcheck::compare_with_oracle(std::string(builtin_sql_script()), kSqlRows, 77);
  ok = ok && oracle.ok;
  detail += oracle.ok ? ", SELECTs match oracle on " + std::to_string(kSqlRows) + " rows"
                      : ", oracle mismatch: " + oracle.detail;

  const double no = median_of(latency_config(Scenario::Sql, Variant::NoContraction));
  const double con = median_of(latency_config(Scenario::Sql, Variant::Contraction));
  const double ratio = con / no;
  report << "sql ratio contraction/no-contraction," << fmt("%.3f", ratio) << "\n";
  ok = ok && ratio <= kMaxLatencyRatio;
  detail += fmt(", median %.2fus vs %.2fus, ratio %.3f", con, no, ratio) +
            fmt(" (reduction %.1f%%, need >= %.0f%%)", 100 * (1 - ratio), 100 * (1 - kMaxLatencyRatio));
  verdict(6, "sql scenario", ok, detail);
}

void path_finding() {
  int passed = 0, with_paths = 0;
  std::string first;
  for (int i = 0; i < kPathGraphs; ++i) {
    auto o = cases::path_finding(0x7000 + std::uint64_t(i));
    if (o.ok) ++passed;
    else if (first.empty()) first = " first failure seed " + std::to_string(0x7000 + i);
    if (o.contractions > 0) ++with_paths;
  }
  verdict(7, "path finding", passed == kPathGraphs,
          std::to_string(passed) + "/" + std::to_string(kPathGraphs) + " graphs agree with enumeration (" +
              std::to_string(with_paths) + " with paths), exact" + first);
}

void churn() {
  int passed = 0, crashed = 0;
  std::string first;
  for (int i = 0; i < kChurnCases; ++i) {
    auto o = cases::transparency(0x8000 + std::uint64_t(i), true);
    if (o.ok) ++passed;
    else if (first.empty()) first = " first failure seed " + std::to_string(0x8000 + i) + ": " + o.detail;
    if (o.crashed) ++crashed;
  }
  verdict(8, "liveness under churn", passed == kChurnCases,
          std::to_string(passed) + "/" + std::to_string(kChurnCases) + " cases (" + std::to_string(crashed) +
              " with a crash) lost exactly the failed edges and stayed transparent" + first);
}

}  // namespace

int main() {
  report << "scenario,variant,count,median_us,p95_us\n";
  transparency();
  round_trip();
  composition();
  chain_latency();
  dynamism();
  sql_scenario();
  path_finding();
  churn();
  std::ofstream("benchmark_report.csv") << report.str();
  std::printf("%d of 8 criteria failed\n", failures);
  return failures;
}
