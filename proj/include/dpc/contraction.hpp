// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dpc/ids.hpp"
#include "dpc/process_spec.hpp"

namespace dpc {

/// Soft-deleted state of one contracted path. Keeps the original process
/// triples so the path can be cleaved back into place.
struct ContractionRecord {
  ContractionId id;
  /// Live process carrying the composed transform.
  ProcessId process;
  /// Original processes head to tail; output of i is the input of i + 1.
  std::vector<std::pair<ProcessId, ProcessSpec>> original_specs;
  /// Interior variables, tagged with `id` while contracted.
  std::vector<VariableId> contracted_vertices;
  ProcessSpec composed_spec;

  friend bool operator==(const ContractionRecord&, const ContractionRecord&) = default;
};

/// Builds the record for a chain of unary specs. Throws InvalidSpec if
/// the specs are not a unary chain.
ContractionRecord make_contraction_record(
    ContractionId id, ProcessId process,
    std::vector<std::pair<ProcessId, ProcessSpec>> chain);

// Store format, one record per block:
//
//   contraction <cid> process <pid>
//   contracted <var>...
//   composed <in-var> <out-var> <step-count>
//   <step lines>
//   original <pid> <in-var> <out-var> <step-count>
//   <step lines>
//   ...
//   end
//
// Ids use the `v12-00af` rendering; step lines use the transform format.
std::string to_text(const std::vector<ContractionRecord>& records);
std::vector<ContractionRecord> parse_contraction_records(std::string_view text);

}  // namespace dpc
