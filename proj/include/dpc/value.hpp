// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <utility>
#include <variant>

namespace dpc {

enum class ScalarKind { Int, Text, Bool };

const char* to_string(ScalarKind kind) noexcept;

/// A row field value: 64-bit integer, text or boolean.
class Scalar {
 public:
  Scalar() : value_(std::int64_t{0}) {}
  Scalar(std::int64_t v) : value_(v) {}
  Scalar(int v) : value_(std::int64_t{v}) {}
  Scalar(std::string v) : value_(std::move(v)) {}
  Scalar(const char* v) : value_(std::string(v)) {}
  Scalar(bool v) : value_(v) {}

  ScalarKind kind() const noexcept {
    return static_cast<ScalarKind>(value_.index());
  }
  bool is_int() const noexcept { return kind() == ScalarKind::Int; }
  bool is_text() const noexcept { return kind() == ScalarKind::Text; }
  bool is_bool() const noexcept { return kind() == ScalarKind::Bool; }

  std::int64_t as_int() const { return std::get<std::int64_t>(value_); }
  const std::string& as_text() const { return std::get<std::string>(value_); }
  bool as_bool() const { return std::get<bool>(value_); }

  friend bool operator==(const Scalar&, const Scalar&) = default;

 private:
  std::variant<std::int64_t, std::string, bool> value_;
};

using Fields = std::map<std::string, Scalar, std::less<>>;

struct Row {
  std::string key;
  Fields fields;

  friend bool operator==(const Row&, const Row&) = default;
};

/// Grow-only keyed set of rows: at most one row per key.
class CollectionValue {
 public:
  using Storage = std::map<std::string, Fields, std::less<>>;
  using const_iterator = Storage::const_iterator;

  CollectionValue() = default;
  CollectionValue(std::initializer_list<Row> rows);

  /// Adds a row, resolving a key conflict with the merge tie-break.
  void insert(Row row);
  /// Adds or overwrites a row unconditionally.
  void assign(std::string key, Fields fields);

  const Fields* find(std::string_view key) const;
  bool contains(std::string_view key) const { return find(key) != nullptr; }

  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }
  const_iterator begin() const noexcept { return rows_.begin(); }
  const_iterator end() const noexcept { return rows_.end(); }

  friend bool operator==(const CollectionValue&,
                         const CollectionValue&) = default;

 private:
  Storage rows_;
};

/// Join of two collections: union of keys; on a conflicting key the row
/// whose canonical field serialization compares greater wins.
CollectionValue merge(const CollectionValue& a, const CollectionValue& b);

/// In-place variant of merge; returns true if `into` changed.
bool merge_into(CollectionValue& into, const CollectionValue& delta);

/// Picks the winner between two rows with the same key.
const Fields& merge_winner(const Fields& a, const Fields& b);

}  // namespace dpc
