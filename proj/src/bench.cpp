// SPDX-License-Identifier: Apache-2.0
#include "dpc/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>

#include "dpc/error.hpp"
#include "dpc/runtime.hpp"
#include "dpc/sql.hpp"

namespace dpc::bench {

namespace {

constexpr std::string_view kComposedViews =
    "-- Two composed views over one populated table.\n"
    "CREATE TABLE orders (qty, price, region);\n"
    "\n"
    "CREATE VIEW large_orders AS\n"
    "  SELECT qty, price, region FROM orders WHERE qty > 2;\n"
    "\n"
    "CREATE VIEW order_totals AS\n"
    "  SELECT qty * price AS total, region FROM large_orders WHERE price >= 10;\n";

[[noreturn]] void config_error(const std::string& what) { raise(ErrorCode::ConfigError, what); }

bool contracting(Variant v) { return v != Variant::NoContraction; }

// A built topology: one source feeding one sink through `interiors`.
struct Topology {
  std::unique_ptr<Runtime> rt;
  std::unique_ptr<sql::Session> session;
  VariableId source;
  VariableId sink;
  std::vector<VariableId> interiors;
  std::string table;
  Transform pipeline;
  std::map<VariableId, std::string> names;
};

Topology build(const ScenarioConfig& cfg) {
  RuntimeOptions opts;
  opts.id_seed = cfg.rng_seed;
  opts.lease_rounds = cfg.lease_rounds;
  opts.auto_advance_rounds = false;
  Topology t;
  t.rt = std::make_unique<Runtime>(opts);
  if (cfg.scenario == Scenario::Chain) {
    std::vector<VariableId> vars;
    for (std::size_t i = 0; i < cfg.chain_length; ++i) vars.push_back(t.rt->declare_variable());
    // No mutation along the path: identity processes only.
    for (std::size_t i = 0; i + 1 < vars.size(); ++i) {
      t.rt->spawn_process(ProcessSpec::unary(vars[i], Transform::identity(), vars[i + 1]));
    }
    t.source = vars.front();
    t.sink = vars.back();
    t.interiors.assign(vars.begin() + 1, vars.end() - 1);
    return t;
  }
  t.session = std::make_unique<sql::Session>(*t.rt);
  t.session->execute_script(cfg.sql_script.empty() ? kComposedViews : std::string_view(cfg.sql_script));
  std::string last_view;
  for (const auto& [name, rel] : t.session->schema()) {
    if (!rel.is_table && (last_view.empty() || rel.var > t.session->relation(last_view).var)) {
      last_view = name;
    }
  }
  if (last_view.empty()) config_error("sql script declares no view");
  auto lineage = t.session->lineage(last_view);
  t.source = lineage.chain.front();
  t.sink = lineage.chain.back();
  t.interiors.assign(lineage.chain.begin() + 1, lineage.chain.end() - 1);
  t.table = lineage.table;
  t.pipeline = lineage.transform;
  t.names = t.session->names();
  return t;
}

// Rows for the sql scenario that survive every view on the path, so each
// insert is observable at the sink.
Fields passing_row(const Topology& t, std::mt19937_64& rng, const std::string& key) {
  static const char* regions[] = {"north", "south", "east", "west"};
  std::uniform_int_distribution<int> qty(1, 10), price(1, 50), region(0, 3);
  const auto& columns = t.session->relation(t.table).columns;
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Fields f;
    for (const auto& c : columns) {
      if (c == "region") {
        f.emplace(c, regions[region(rng)]);
      } else if (c == "price") {
        f.emplace(c, std::int64_t{price(rng)});
      } else {
        f.emplace(c, std::int64_t{qty(rng)});
      }
    }
    CollectionValue probe{Row{key, f}};
    if (!apply_transform(t.pipeline, probe).empty()) return f;
  }
  config_error("could not generate a row that reaches the final view");
}

void await_contraction(Topology& t, const ScenarioConfig& cfg) {
  t.rt->schedule_passes(cfg.pass_interval);
  for (std::uint64_t i = 0; i < 2 * cfg.pass_interval + 1 && t.rt->contractions().empty(); ++i) {
    t.rt->advance_round();
  }
  if (t.rt->contractions().empty()) config_error("topology offers no contraction path");
  t.rt->quiesce();
}

}  // namespace

const char* to_string(Scenario s) noexcept {
  return s == Scenario::Chain ? "chain" : "sql";
}

const char* to_string(Variant v) noexcept {
  switch (v) {
    case Variant::NoContraction: return "no-contraction";
    case Variant::Contraction: return "contraction";
    case Variant::ContractionRandomReads: return "contraction-random-reads";
  }
  return "?";
}

std::optional<Scenario> parse_scenario(std::string_view s) noexcept {
  if (s == "chain") return Scenario::Chain;
  if (s == "sql") return Scenario::Sql;
  return std::nullopt;
}

std::optional<Variant> parse_variant(std::string_view s) noexcept {
  for (Variant v : {Variant::NoContraction, Variant::Contraction, Variant::ContractionRandomReads}) {
    if (s == to_string(v)) return v;
  }
  return std::nullopt;
}

void validate(const ScenarioConfig& cfg) {
  if (cfg.updates == 0) config_error("updates must be positive");
  if (cfg.pass_interval == 0) config_error("pass interval must be positive");
  if (cfg.read_every == 0) config_error("read-every must be positive");
  if (cfg.lease_rounds == 0) config_error("lease rounds must be positive");
  if (!(cfg.random_read_probability >= 0.0 && cfg.random_read_probability <= 1.0)) {
    config_error("random read probability must lie in [0, 1]");
  }
  if (cfg.scenario == Scenario::Chain) {
    if (cfg.chain_length < 2) config_error("chain needs at least 2 vertices");
    if (contracting(cfg.variant) && cfg.chain_length < 3) {
      config_error("contraction needs a chain of at least 3 vertices");
    }
  }
}

std::vector<Step> make_schedule(const ScenarioConfig& cfg, std::size_t interior_count) {
  std::mt19937_64 rng(cfg.rng_seed);
  std::bernoulli_distribution coin(cfg.random_read_probability);
  std::vector<Step> plan(cfg.updates);
  for (std::size_t i = 0; i < cfg.updates; ++i) {
    if (cfg.variant == Variant::ContractionRandomReads && interior_count > 0 && coin(rng)) {
      std::uniform_int_distribution<std::size_t> pick(0, interior_count - 1);
      plan[i].random_read = pick(rng);
    }
    plan[i].periodic_read = (i + 1) % cfg.read_every == 0;
  }
  return plan;
}

std::vector<LatencySample> run_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  Topology t = build(cfg);
  if (contracting(cfg.variant)) await_contraction(t, cfg);
  const auto plan = make_schedule(cfg, t.interiors.size());
  const UserId writer = t.rt->new_user();
  const UserId reader = t.rt->new_user();
  std::mt19937_64 rows(cfg.rng_seed ^ 0x9e3779b97f4a7c15ull);

  std::vector<LatencySample> samples;
  samples.reserve(cfg.updates);
  for (std::size_t i = 0; i < cfg.updates; ++i) {
    // Round bookkeeping (lease expiry, scheduled passes) stays outside the
    // measured window.
    t.rt->advance_round();
    const std::string key = "u" + std::to_string(i);
    CollectionValue delta;
    Fields fields = cfg.scenario == Scenario::Chain
                        ? Fields{{"seq", static_cast<std::int64_t>(i)}}
                        : passing_row(t, rows, key);
    delta.insert(Row{key, std::move(fields)});
    const std::uint64_t before = t.rt->version(t.sink);

    const auto start = std::chrono::steady_clock::now();
    t.rt->update_variable(t.source, delta, writer);
    if (plan[i].random_read) t.rt->read_variable(t.interiors[*plan[i].random_read], reader);
    t.rt->wait_for_version(t.sink, before);
    const auto stop = std::chrono::steady_clock::now();

    const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
    samples.push_back(LatencySample{i, static_cast<double>(ns) / 1000.0, cfg.variant, cfg.scenario});
    if (plan[i].periodic_read) t.rt->read_variable(t.sink, reader);
  }
  t.rt->quiesce();
  return samples;
}

Summary summarize(std::vector<double> xs) {
  if (xs.empty()) raise(ErrorCode::EmptyInput, "no samples to summarize");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  return Summary{xs[(n - 1) / 2], xs[std::max<std::size_t>(rank, 1) - 1], n};
}

Summary summarize(const std::vector<LatencySample>& samples, std::size_t warmup) {
  std::vector<double> xs;
  for (const auto& s : samples) {
    if (s.update_index >= warmup) xs.push_back(s.latency_us);
  }
  return summarize(std::move(xs));
}

std::string to_csv(const std::vector<LatencySample>& samples) {
  std::string out = "update_index,latency_us,variant,scenario\n";
  char buf[64];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%.3f", s.latency_us);
    out += std::to_string(s.update_index) + "," + buf + "," + to_string(s.variant) + "," +
           to_string(s.scenario) + "\n";
  }
  return out;
}

std::vector<LatencySample> parse_csv(std::string_view text) {
  std::vector<LatencySample> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto bad = [&](const std::string& why) {
    raise(ErrorCode::ParseError, "csv line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != "update_index,latency_us,variant,scenario") bad("unexpected header");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    if (cols.size() != 4) bad("expected 4 columns");
    LatencySample s;
    auto [p, ec] = std::from_chars(cols[0].data(), cols[0].data() + cols[0].size(), s.update_index);
    if (ec != std::errc{} || p != cols[0].data() + cols[0].size()) bad("bad update_index");
    char* end = nullptr;
    s.latency_us = std::strtod(cols[1].c_str(), &end);
    if (end != cols[1].c_str() + cols[1].size() || s.latency_us < 0) bad("bad latency");
    auto v = parse_variant(cols[2]);
    auto sc = parse_scenario(cols[3]);
    if (!v || !sc) bad("bad variant or scenario");
    s.variant = *v;
    s.scenario = *sc;
    out.push_back(s);
  }
  if (line_no == 0) bad("missing header");
  return out;
}

void emit_csv(const std::vector<LatencySample>& samples, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) raise(ErrorCode::IoError, "cannot open " + path);
  const std::string text = to_csv(samples);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) raise(ErrorCode::IoError, "cannot write " + path);
}

std::vector<LatencySample> read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) raise(ErrorCode::IoError, "cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str());
}

std::string scenario_dot(const ScenarioConfig& cfg) {
  validate(cfg);
  Topology t = build(cfg);
  if (contracting(cfg.variant)) t.rt->optimization_pass();
  t.rt->quiesce();
  return t.rt->graph().to_dot(t.names);
}

std::string product_demo_dot(std::size_t* contracted) {
  RuntimeOptions opts;
  opts.auto_advance_rounds = false;
  Runtime rt(opts);
  std::map<VariableId, std::string> names;
  auto var = [&](const char* name) {
    VariableId v = rt.declare_variable();
    names[v] = name;
    return v;
  };
  const VariableId orders = var("orders"), large = var("large"), regions = var("regions"),
                   north = var("north"), pairs = var("pairs"), out = var("totals");
  rt.spawn_process(ProcessSpec::unary(orders, Transform::filter(ex::gt(ex::f("qty"), ex::lit(2))), large));
  rt.spawn_process(ProcessSpec::unary(regions, Transform::filter(ex::eq(ex::f("name"), ex::lit("north"))), north));
  rt.spawn_process(ProcessSpec::binary(SetOp::Product, large, north, pairs));
  rt.spawn_process(ProcessSpec::unary(pairs, Transform::map({{"total", ex::mul(ex::f("qty"), ex::f("price"))}}), out));
  const UserId u = rt.new_user();
  rt.update_variable(orders, CollectionValue{Row{"o1", {{"qty", 3}, {"price", 5}}}}, u);
  rt.update_variable(regions, CollectionValue{Row{"n", {{"name", "north"}}}}, u);
  const auto done = rt.optimization_pass();
  if (contracted != nullptr) *contracted = done.size();
  rt.quiesce();
  return rt.graph().to_dot(names);
}

std::string_view builtin_sql_script() noexcept { return kComposedViews; }

}  // namespace dpc::bench
