// SPDX-License-Identifier: Apache-2.0
#include "dpc/contraction.hpp"

#include <charconv>

#include "dpc/error.hpp"
#include "dpc/text_format.hpp"
#include "runtime_impl.hpp"

namespace dpc {

ContractionRecord make_contraction_record(
    ContractionId id, ProcessId process,
    std::vector<std::pair<ProcessId, ProcessSpec>> chain) {
  if (chain.empty()) raise(ErrorCode::InvalidSpec, "empty contraction chain");
  Transform composed;
  std::vector<VariableId> interiors;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const ProcessSpec& spec = chain[i].second;
    if (!spec.is_unary()) raise(ErrorCode::InvalidSpec, "contraction chains are unary only");
    if (i > 0) {
      if (chain[i - 1].second.output != spec.as_unary().input) {
        raise(ErrorCode::InvalidSpec, "specs do not form a chain");
      }
      interiors.push_back(spec.as_unary().input);
    }
    composed = compose_transforms(composed, spec.as_unary().transform);
  }
  ProcessSpec composed_spec = ProcessSpec::unary(chain.front().second.as_unary().input,
                                                 std::move(composed),
                                                 chain.back().second.output);
  return ContractionRecord{id, process, std::move(chain), std::move(interiors),
                           std::move(composed_spec)};
}

// --- soft-deletion store text form -----------------------------------------

namespace {

template <class Tag>
Id<Tag> parse_id(std::string_view w, char prefix) {
  auto fail = [&] { raise(ErrorCode::ParseError, "bad id '" + std::string(w) + "'"); };
  if (w.size() < 4 || w[0] != prefix) fail();
  const auto dash = w.find('-');
  if (dash == std::string_view::npos) fail();
  std::uint64_t seq = 0;
  unsigned salt = 0;
  auto r1 = std::from_chars(w.data() + 1, w.data() + dash, seq);
  auto r2 = std::from_chars(w.data() + dash + 1, w.data() + w.size(), salt, 16);
  if (r1.ec != std::errc{} || r1.ptr != w.data() + dash || r2.ec != std::errc{} ||
      r2.ptr != w.data() + w.size() || salt > 0xffff) {
    fail();
  }
  return Id<Tag>::make(seq, static_cast<std::uint16_t>(salt));
}

void append_unary(std::string& out, const ProcessSpec& spec) {
  const auto& u = spec.as_unary();
  out += to_string(u.input) + " " + to_string(spec.output) + " " +
         std::to_string(u.transform.steps.size()) + "\n";
  text::append_lines(out, u.transform);
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  // Next non-blank line, or empty when exhausted.
  std::string_view next() {
    while (!text_.empty()) {
      ++line_no_;
      const auto nl = text_.find('\n');
      std::string_view line = text_.substr(0, nl);
      text_ = nl == std::string_view::npos ? std::string_view{} : text_.substr(nl + 1);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.find_first_not_of(' ') != std::string_view::npos) return line;
    }
    return {};
  }
  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t line_no_ = 0;
};

ProcessSpec read_unary(text::Cursor& cur, LineReader& lines) {
  VariableId in = parse_id<VariableTag>(cur.word(), 'v');
  VariableId out = parse_id<VariableTag>(cur.word(), 'v');
  const std::uint64_t n = cur.unsigned_number();
  Transform t;
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string_view line = lines.next();
    if (line.empty()) raise(ErrorCode::ParseError, "missing transform step");
    t.steps.push_back(text::parse_step(line));
  }
  return ProcessSpec::unary(in, std::move(t), out);
}

}  // namespace

std::string to_text(const std::vector<ContractionRecord>& records) {
  std::string out;
  for (const auto& rec : records) {
    out += "contraction " + to_string(rec.id) + " process " + to_string(rec.process) + "\n";
    out += "contracted";
    for (auto v : rec.contracted_vertices) out += " " + to_string(v);
    out += "\ncomposed ";
    append_unary(out, rec.composed_spec);
    for (const auto& [pid, spec] : rec.original_specs) {
      out += "original " + to_string(pid) + " ";
      append_unary(out, spec);
    }
    out += "end\n";
  }
  return out;
}

std::vector<ContractionRecord> parse_contraction_records(std::string_view text) {
  std::vector<ContractionRecord> out;
  LineReader lines(text);
  try {
    for (std::string_view line = lines.next(); !line.empty(); line = lines.next()) {
      ContractionRecord rec;
      text::Cursor head(line);
      head.expect("contraction");
      rec.id = parse_id<ContractionTag>(head.word(), 'c');
      head.expect("process");
      rec.process = parse_id<ProcessTag>(head.word(), 'p');

      text::Cursor vs(lines.next());
      vs.expect("contracted");
      while (!vs.at_end()) rec.contracted_vertices.push_back(parse_id<VariableTag>(vs.word(), 'v'));

      text::Cursor comp(lines.next());
      comp.expect("composed");
      rec.composed_spec = read_unary(comp, lines);

      while (true) {
        text::Cursor cur(lines.next());
        const std::string_view w = cur.word();
        if (w == "end") break;
        if (w != "original") raise(ErrorCode::ParseError, "expected 'original' or 'end'");
        ProcessId pid = parse_id<ProcessTag>(cur.word(), 'p');
        rec.original_specs.emplace_back(pid, read_unary(cur, lines));
      }
      out.push_back(std::move(rec));
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ParseError) throw;
    raise(ErrorCode::ParseError, "line " + std::to_string(lines.line_no()) + ": " + e.what());
  }
  return out;
}

// --- contraction engine ----------------------------------------------------

std::vector<ContractionRecord> Runtime::Impl::optimization_pass_locked() {
  std::vector<ContractionRecord> done;
  for (const Path& path : graph_state.find_contraction_paths()) {
    try {
      done.push_back(contract_path_locked(path));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PathInvalidated) throw;
    }
  }
  return done;
}

void Runtime::Impl::validate_path(const Path& path) const {
  auto invalid = [](const std::string& why) { raise(ErrorCode::PathInvalidated, why); };
  const auto& vs = path.vertices;
  if (vs.size() < 3 || path.processes.size() + 1 != vs.size()) invalid("malformed path");
  for (auto v : vs) {
    if (!cells.contains(v) || !graph_state.has_vertex(VertexRef::of(v))) invalid("unknown vertex");
    if (graph_state.tag(v)) invalid(to_string(v) + " is already contracted");
  }
  for (std::size_t i = 0; i < path.processes.size(); ++i) {
    auto it = processes.find(path.processes[i]);
    if (it == processes.end()) invalid(to_string(path.processes[i]) + " is gone");
    const Process& p = it->second;
    if (p.contraction || p.crashing || !p.spec->is_unary()) invalid("edge cannot be contracted");
    if (p.spec->as_unary().input != vs[i] || p.spec->output != vs[i + 1]) {
      invalid("edge does not follow the path");
    }
  }
  if (graph_state.classify(vs.front()) != VertexClass::Necessary ||
      graph_state.classify(vs.back()) != VertexClass::Necessary) {
    invalid("endpoint became unnecessary");
  }
  for (std::size_t i = 1; i + 1 < vs.size(); ++i) {
    if (graph_state.classify(vs[i]) != VertexClass::Unnecessary) {
      invalid(to_string(vs[i]) + " became necessary");
    }
    // An interior must be a pure function of its single writer, or the
    // composed transform would lose its local contents.
    const Cell& c = cells.at(vs[i]);
    if (!c.user_state.empty() || !c.retained.empty() || c.slots.size() > 1 ||
        (c.slots.size() == 1 && c.slots.begin()->first != path.processes[i - 1])) {
      invalid(to_string(vs[i]) + " holds state of its own");
    }
  }
}

ContractionRecord Runtime::Impl::contract_path_locked(const Path& path) {
  validate_path(path);
  std::vector<std::pair<ProcessId, ProcessSpec>> chain;
  for (auto pid : path.processes) chain.emplace_back(pid, *processes.at(pid).spec);

  const ContractionId cid = ids.next<ContractionTag>();
  const ProcessId cpid = ids.next<ProcessTag>();
  ContractionRecord rec = make_contraction_record(cid, cpid, std::move(chain));

  start_process(cpid, rec.composed_spec, cid);
  transfer_slot(rec.composed_spec.output, path.processes.back(), cpid);
  for (auto pid : path.processes) remove_process(pid, SlotPolicy::Keep);
  for (auto v : rec.contracted_vertices) graph_state.set_tag(v, cid);
  store.emplace(cid, rec);
  dispatch(cpid);
  return rec;
}

void Runtime::Impl::cleave_record(ContractionId id) {
  // Runs to completion inside one coordinator step, so distribution along
  // the path is paused until the originals are back.
  ContractionRecord rec = store.at(id);
  store.erase(id);
  if (processes.contains(rec.process)) remove_process(rec.process, SlotPolicy::Keep);
  for (auto v : rec.contracted_vertices) graph_state.clear_tag(v);

  const std::size_t n = rec.original_specs.size();
  std::vector<ProcessId> fresh;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [old_pid, spec] = rec.original_specs[i];
    ProcessId pid = ids.next<ProcessTag>();
    start_process(pid, spec, std::nullopt);
    transfer_slot(spec.output, i + 1 == n ? rec.process : old_pid, pid);
    fresh.push_back(pid);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const ProcessSpec& spec = rec.original_specs[i].second;
    std::size_t lost = 0;
    const CollectionValue& in = *cells.at(spec.as_unary().input).value;
    auto out = std::make_shared<const CollectionValue>(apply_transform(spec.as_unary().transform, in, &lost));
    dropped += lost;
    set_slot(spec.output, fresh[i], std::move(out), i + 1 == n);
  }
}

void Runtime::Impl::cleave_if_contracted(VariableId v) {
  if (auto tag = graph_state.tag(v)) cleave_record(*tag);
}

}  // namespace dpc
