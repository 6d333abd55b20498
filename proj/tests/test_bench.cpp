// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dpc/bench.hpp"
#include "dpc/error.hpp"
#include "expect.hpp"

using namespace dpc;
using namespace dpc::bench;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("summarize") {
  CHECK(summarize(std::vector<double>{1, 2, 3}).median_us == 2);
  CHECK(summarize(std::vector<double>{4, 1, 3, 2}).median_us == 2);
  const auto sevens = summarize(std::vector<double>(100, 7.0));
  CHECK(sevens.median_us == 7);
  CHECK(sevens.p95_us == 7);
  CHECK(sevens.count == 100);
  std::vector<double> ramp;
  for (int i = 1; i <= 20; ++i) ramp.push_back(i);
  CHECK(summarize(ramp).p95_us == 19);
  CHECK(code_of([] { summarize(std::vector<double>{}); }) == ErrorCode::EmptyInput);

  std::vector<LatencySample> samples;
  for (std::size_t i = 0; i < 12; ++i) samples.push_back({i, i < 10 ? 1000.0 : 5.0});
  CHECK(summarize(samples, 10).median_us == 5);
  CHECK(summarize(samples, 10).count == 2);
}

TEST_CASE("csv") {
  CHECK(to_csv({}) == "update_index,latency_us,variant,scenario\n");
  const std::vector<LatencySample> s{{0, 1.5, Variant::NoContraction, Scenario::Chain},
                                     {1, 20.25, Variant::Contraction, Scenario::Sql},
                                     {2, 0.001, Variant::ContractionRandomReads, Scenario::Chain}};
  const auto text = to_csv(s);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(text.find("1,20.250,contraction,sql\n") != std::string::npos);
  CHECK(parse_csv(text) == s);
  CHECK(to_csv(parse_csv(text)) == text);

  const std::string path = "bench_test_roundtrip.csv";
  emit_csv(s, path);
  CHECK(slurp(path) == text);
  CHECK(read_csv(path) == s);
  std::remove(path.c_str());
  CHECK(code_of([] { emit_csv({}, "/nonexistent-dir/x.csv"); }) == ErrorCode::IoError);
  CHECK(code_of([] { parse_csv("wrong,header\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_csv("update_index,latency_us,variant,scenario\n1,-2,contraction,sql\n"); }) ==
        ErrorCode::ParseError);
}

TEST_CASE("config validation") {
  ScenarioConfig cfg;
  cfg.updates = 0;
  CHECK(code_of([&] { validate(cfg); }) == ErrorCode::ConfigError);
  cfg = {};
  cfg.variant = Variant::Contraction;
  cfg.chain_length = 2;
  CHECK(code_of([&] { run_scenario(cfg); }) == ErrorCode::ConfigError);
  cfg = {};
  cfg.pass_interval = 0;
  CHECK(code_of([&] { validate(cfg); }) == ErrorCode::ConfigError);
  cfg = {};
  cfg.random_read_probability = 1.5;
  CHECK(code_of([&] { validate(cfg); }) == ErrorCode::ConfigError);
  CHECK(parse_variant("contraction-random-reads") == Variant::ContractionRandomReads);
  CHECK_FALSE(parse_variant("fast").has_value());
  CHECK(parse_scenario("sql") == Scenario::Sql);
}

TEST_CASE("schedules depend only on seed and config") {
  ScenarioConfig cfg;
  cfg.updates = 500;
  cfg.variant = Variant::ContractionRandomReads;
  cfg.rng_seed = 5;
  const auto a = make_schedule(cfg, 3), b = make_schedule(cfg, 3);
  CHECK(a == b);
  std::size_t reads = 0, periodic = 0;
  for (const auto& s : a) {
    if (s.random_read) {
      ++reads;
      CHECK(*s.random_read < 3);
    }
    if (s.periodic_read) ++periodic;
  }
  CHECK(periodic == 50);
  CHECK(reads > 20);
  CHECK(reads < 90);
  cfg.rng_seed = 6;
  CHECK(make_schedule(cfg, 3) != a);
  cfg.variant = Variant::Contraction;
  for (const auto& s : make_schedule(cfg, 3)) CHECK_FALSE(s.random_read.has_value());
}

TEST_CASE("run_scenario shapes") {
  for (auto sc : {Scenario::Chain, Scenario::Sql}) {
    for (auto v : {Variant::NoContraction, Variant::Contraction, Variant::ContractionRandomReads}) {
      ScenarioConfig cfg;
      cfg.scenario = sc;
      cfg.variant = v;
      cfg.updates = 100;
      const auto samples = run_scenario(cfg);
      REQUIRE(samples.size() == 100);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        CHECK(samples[i].update_index == i);
        CHECK(samples[i].latency_us > 0);
        CHECK(samples[i].variant == v);
        CHECK(samples[i].scenario == sc);
      }
    }
  }
}

TEST_CASE("scenario dot") {
  ScenarioConfig cfg;
  const auto plain = scenario_dot(cfg);
  CHECK(plain.find("style=bold") == std::string::npos);
  cfg.variant = Variant::Contraction;
  const auto fused = scenario_dot(cfg);
  CHECK(fused.find("style=bold") != std::string::npos);
  CHECK(fused.find("dashed") != std::string::npos);
  cfg.scenario = Scenario::Sql;
  cfg.variant = Variant::NoContraction;
  CHECK(scenario_dot(cfg) == slurp(DPC_GOLDEN_DIR "/composed_views.dot"));
}

TEST_CASE("product demo blocks contraction") {
  std::size_t contracted = 99;
  const auto dot = product_demo_dot(&contracted);
  CHECK(contracted == 0);
  CHECK(dot.find("arrowhead=diamond") != std::string::npos);
  CHECK(dot.find("style=bold") == std::string::npos);
}
