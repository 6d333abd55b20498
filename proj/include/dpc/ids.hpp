// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <random>
#include <string>

namespace dpc {

/// Identifier packing a monotonic sequence number (high 48 bits) and a
/// random salt (low 16 bits). The tag makes each identifier family a
/// distinct type.
template <class Tag>
struct Id {
  std::uint64_t raw = 0;

  constexpr std::uint64_t seq() const noexcept { return raw >> 16; }
  constexpr std::uint16_t salt() const noexcept {
    return static_cast<std::uint16_t>(raw & 0xffffu);
  }
  constexpr bool valid() const noexcept { return raw != 0; }

  static constexpr Id make(std::uint64_t seq, std::uint16_t salt) noexcept {
    return Id{(seq << 16) | salt};
  }

  friend constexpr auto operator<=>(Id, Id) = default;
};

struct VariableTag {};
struct ProcessTag {};
struct UserTag {};
struct EndpointTag {};
struct ContractionTag {};

using VariableId = Id<VariableTag>;
using ProcessId = Id<ProcessTag>;
/// The client issuing reads and writes.
using UserId = Id<UserTag>;
/// A fresh graph vertex created per user operation.
using EndpointId = Id<EndpointTag>;
using ContractionId = Id<ContractionTag>;

/// Hands out never-reused identifiers for one runtime instance.
class IdSource {
 public:
  explicit IdSource(std::uint64_t seed) : rng_(seed) {}

  template <class Tag>
  Id<Tag> next() {
    return Id<Tag>::make(++counter_, static_cast<std::uint16_t>(rng_()));
  }

 private:
  std::uint64_t counter_ = 0;
  std::mt19937_64 rng_;
};

std::string to_string(VariableId id);
std::string to_string(ProcessId id);
std::string to_string(UserId id);
std::string to_string(EndpointId id);
std::string to_string(ContractionId id);

}  // namespace dpc

template <class Tag>
struct std::hash<dpc::Id<Tag>> {
  std::size_t operator()(dpc::Id<Tag> id) const noexcept {
    return std::hash<std::uint64_t>{}(id.raw);
  }
};
