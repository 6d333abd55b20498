// SPDX-License-Identifier: Apache-2.0
#include "dpc/value.hpp"

#include "dpc/text_format.hpp"

namespace dpc {

const char* to_string(ScalarKind kind) noexcept {
  switch (kind) {
    case ScalarKind::Int: return "int";
    case ScalarKind::Text: return "text";
    case ScalarKind::Bool: return "bool";
  }
  return "?";
}

CollectionValue::CollectionValue(std::initializer_list<Row> rows) {
  for (const auto& r : rows) insert(r);
}

void CollectionValue::insert(Row row) {
  auto it = rows_.find(row.key);
  if (it == rows_.end()) {
    rows_.emplace(std::move(row.key), std::move(row.fields));
  } else if (&merge_winner(it->second, row.fields) == &row.fields) {
    it->second = std::move(row.fields);
  }
}

void CollectionValue::assign(std::string key, Fields fields) {
  rows_.insert_or_assign(std::move(key), std::move(fields));
}

const Fields* CollectionValue::find(std::string_view key) const {
  auto it = rows_.find(key);
  return it == rows_.end() ? nullptr : &it->second;
}

const Fields& merge_winner(const Fields& a, const Fields& b) {
  if (a == b) return a;
  return to_text(b) > to_text(a) ? b : a;
}

bool merge_into(CollectionValue& into, const CollectionValue& delta) {
  bool changed = false;
  for (const auto& [key, fields] : delta) {
    const Fields* existing = into.find(key);
    if (existing == nullptr) {
      into.assign(key, fields);
      changed = true;
    } else if (&merge_winner(*existing, fields) == &fields) {
      into.assign(key, fields);
      changed = true;
    }
  }
  return changed;
}

CollectionValue merge(const CollectionValue& a, const CollectionValue& b) {
  if (a.size() < b.size()) {
    CollectionValue out = b;
    merge_into(out, a);
    return out;
  }
  CollectionValue out = a;
  merge_into(out, b);
  return out;
}

}  // namespace dpc
