// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "dpc/expr.hpp"
#include "dpc/value.hpp"

namespace dpc {

/// Rewrites every row to exactly the listed output fields, each computed
/// from the input row. The key is preserved.
struct MapStep {
  std::map<std::string, Expr> outputs;
  friend bool operator==(const MapStep&, const MapStep&) = default;
};

/// Keeps rows whose predicate evaluates to true.
struct FilterStep {
  Expr predicate;
  friend bool operator==(const FilterStep&, const FilterStep&) = default;
};

using Step = std::variant<MapStep, FilterStep>;

/// Left-to-right pipeline of element-level steps. Empty means identity.
struct Transform {
  std::vector<Step> steps;

  bool is_identity() const noexcept { return steps.empty(); }

  static Transform identity() { return {}; }
  static Transform map(std::map<std::string, Expr> outputs) {
    return Transform{{MapStep{std::move(outputs)}}};
  }
  static Transform filter(Expr predicate) {
    return Transform{{FilterStep{std::move(predicate)}}};
  }

  friend bool operator==(const Transform&, const Transform&) = default;
};

/// Applies `t` to every row of `c`. Rows whose evaluation fails are
/// dropped; their number is added to `*dropped` when given.
CollectionValue apply_transform(const Transform& t, const CollectionValue& c,
                                std::size_t* dropped = nullptr);

/// The transform equivalent to running `first` and then `second`.
Transform compose_transforms(const Transform& first, const Transform& second);

}  // namespace dpc
