// SPDX-License-Identifier: Apache-2.0
#include "dpc/process_spec.hpp"

#include <cassert>

namespace dpc {

const char* to_string(SetOp op) noexcept {
  switch (op) {
    case SetOp::Union: return "union";
    case SetOp::Intersection: return "intersection";
    case SetOp::Product: return "product";
  }
  return "?";
}

std::vector<VariableId> ProcessSpec::inputs() const {
  if (is_unary()) return {as_unary().input};
  return {as_binary().left, as_binary().right};
}

CollectionValue apply_binary(SetOp op, const CollectionValue& left,
                             const CollectionValue& right) {
  switch (op) {
    case SetOp::Union:
      return merge(left, right);
    case SetOp::Intersection: {
      CollectionValue out;
      for (const auto& [key, fields] : left) {
        if (const Fields* other = right.find(key)) {
          out.assign(key, merge_winner(fields, *other));
        }
      }
      return out;
    }
    case SetOp::Product: {
      CollectionValue out;
      for (const auto& [lkey, lfields] : left) {
        for (const auto& [rkey, rfields] : right) {
          Fields row = lfields;
          for (const auto& [name, value] : rfields) {
            if (row.contains(name)) {
              row.emplace("r_" + name, value);
            } else {
              row.emplace(name, value);
            }
          }
          out.assign(std::to_string(lkey.size()) + ":" + lkey + rkey, std::move(row));
        }
      }
      return out;
    }
  }
  return {};
}

CollectionValue run_process(const ProcessSpec& spec,
                            const std::vector<const CollectionValue*>& inputs,
                            std::size_t* dropped) {
  if (spec.is_unary()) {
    assert(inputs.size() == 1);
    return apply_transform(spec.as_unary().transform, *inputs[0], dropped);
  }
  assert(inputs.size() == 2);
  return apply_binary(spec.as_binary().op, *inputs[0], *inputs[1]);
}

}  // namespace dpc
