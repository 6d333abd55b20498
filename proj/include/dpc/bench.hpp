// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dpc::bench {

enum class Scenario { Chain, Sql };
enum class Variant { NoContraction, Contraction, ContractionRandomReads };

const char* to_string(Scenario s) noexcept;
const char* to_string(Variant v) noexcept;
std::optional<Scenario> parse_scenario(std::string_view s) noexcept;
std::optional<Variant> parse_variant(std::string_view s) noexcept;

struct ScenarioConfig {
  Scenario scenario = Scenario::Chain;
  std::size_t chain_length = 5;
  std::size_t updates = 100;
  Variant variant = Variant::NoContraction;
  std::uint64_t pass_interval = 1;
  std::size_t read_every = 10;
  std::uint64_t rng_seed = 1;
  std::uint64_t lease_rounds = 10;
  /// Chance per update of reading a random interior vertex
  /// (contraction-random-reads only).
  double random_read_probability = 0.1;
  /// Composed-view script for the sql scenario; empty means the built-in one.
  std::string sql_script;
};

/// Throws ConfigError when the configuration is unusable.
void validate(const ScenarioConfig& cfg);

struct LatencySample {
  std::size_t update_index = 0;
  double latency_us = 0;
  Variant variant = Variant::NoContraction;
  Scenario scenario = Scenario::Chain;
  friend bool operator==(const LatencySample&, const LatencySample&) = default;
};

/// Per-update plan, fixed by the seed and config before anything runs.
struct Step {
  /// Interior index to read during the update, if any.
  std::optional<std::size_t> random_read;
  /// Read the output vertex after the update.
  bool periodic_read = false;
  friend bool operator==(const Step&, const Step&) = default;
};

std::vector<Step> make_schedule(const ScenarioConfig& cfg, std::size_t interior_count);

/// Builds the topology, drives `cfg.updates` updates and records the time
/// from each input update until the output version advances.
std::vector<LatencySample> run_scenario(const ScenarioConfig& cfg);

struct Summary {
  double median_us = 0;
  double p95_us = 0;
  std::size_t count = 0;
};

/// Lower-of-two median and nearest-rank p95. Throws EmptyInput.
Summary summarize(std::vector<double> latencies_us);
Summary summarize(const std::vector<LatencySample>& samples, std::size_t warmup = 0);

std::string to_csv(const std::vector<LatencySample>& samples);
std::vector<LatencySample> parse_csv(std::string_view text);
/// Throws IoError.
void emit_csv(const std::vector<LatencySample>& samples, const std::string& path);
std::vector<LatencySample> read_csv(const std::string& path);

/// DOT export of the scenario topology, after one optimization pass for
/// the contraction variants.
std::string scenario_dot(const ScenarioConfig& cfg);

/// Cross-product demo built from Binary(product) processes: two filtered
/// tables joined by a product feeding a projection. Runs one optimization
/// pass and returns the DOT export; `contracted` receives the number of
/// contractions the pass made, which is zero.
std::string product_demo_dot(std::size_t* contracted = nullptr);

/// The composed-view script used by the sql scenario.
std::string_view builtin_sql_script() noexcept;

}  // namespace dpc::bench
