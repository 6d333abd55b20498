// SPDX-License-Identifier: Apache-2.0
#include "dpc/transform.hpp"

#include <optional>

#include "dpc/error.hpp"

namespace dpc {

namespace {

// Runs every step on one row; nullopt when a filter rejects it.
std::optional<Fields> run_steps(const std::vector<Step>& steps, Fields row) {
  for (const auto& step : steps) {
    if (const auto* m = std::get_if<MapStep>(&step)) {
      Fields next;
      for (const auto& [name, e] : m->outputs) next.emplace(name, eval_expr(e, row));
      row = std::move(next);
    } else {
      const Scalar keep = eval_expr(std::get<FilterStep>(step).predicate, row);
      if (!keep.is_bool()) {
        raise(ErrorCode::TypeMismatch,
              std::string("filter predicate yields ") + to_string(keep.kind()));
      }
      if (!keep.as_bool()) return std::nullopt;
    }
  }
  return row;
}

}  // namespace

CollectionValue apply_transform(const Transform& t, const CollectionValue& c,
                                std::size_t* dropped) {
  if (t.is_identity()) return c;
  CollectionValue out;
  std::size_t errors = 0;
  for (const auto& [key, fields] : c) {
    try {
      if (auto row = run_steps(t.steps, fields)) out.assign(key, std::move(*row));
    } catch (const Error&) {
      ++errors;
    }
  }
  if (dropped != nullptr) *dropped += errors;
  return out;
}

Transform compose_transforms(const Transform& first, const Transform& second) {
  Transform out = first;
  out.steps.insert(out.steps.end(), second.steps.begin(), second.steps.end());
  return out;
}

}  // namespace dpc
