// Line-delimited JSON trace format, version 1.
//
//   line 1:  header  {"format":"wfreg-trace","version":1,"construction":..,"n":..,
//                     "value_domain":..,"writes":[..],"reads_per_reader":..,
//                     "mutation":..,"schedule":{"mode":..,...}}
//   line 2+: one event per line, in sequence order.
//
// Verification-only data lives under "ghost" objects; deleting every "ghost"
// key yields a valid trace without ghost metadata.
#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "wfreg/checkers.hpp"
#include "wfreg/monitors.hpp"
#include "wfreg/trace.hpp"

namespace wfreg {

inline constexpr int kTraceFormatVersion = 1;
inline constexpr const char* kTraceFormatName = "wfreg-trace";

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class VersionMismatch : public ParseError {
 public:
  using ParseError::ParseError;
};

namespace trace_json {

using nlohmann::json;

inline json field(Field f) { return f.is_bottom() ? json(nullptr) : json(f.value()); }

inline json record(const Record& r, Construction c) {
  json j = json::object();
  json ghost = {{"seq", r.ghost}};
  if (r.value) j["value"] = *r.value;
  if (c == Construction::c0) {
    j["tag"] = r.tag;
  } else {
    j["tail"] = field(r.ts.tail);
    j["head"] = field(r.ts.head);
  }
  if (r.replicas) {
    j["slots"] = {r.replicas->values[0], r.replicas->values[1]};
    j["mark"] = r.replicas->mark;
    ghost["slots"] = {r.replicas->ghost[0], r.replicas->ghost[1]};
  }
  j["ghost"] = ghost;
  return j;
}

inline json schedule(const ScheduleSpec& s) {
  json j = {{"mode", std::string(to_string(s.mode))}};
  switch (s.mode) {
    case ScheduleSpec::Mode::random: j["seed"] = s.seed; break;
    case ScheduleSpec::Mode::replay: j["steps"] = s.steps; break;
    case ScheduleSpec::Mode::adversary:
      j["seed"] = s.seed;
      if (s.solo) {
        j["solo"] = *s.solo;
      } else {
        j["stalled"] = s.stalled;
        j["cut"] = s.cut;
      }
      break;
  }
  return j;
}

inline json header(const Trace& t) {
  const Workload& w = t.workload;
  return {{"format", kTraceFormatName},
          {"version", kTraceFormatVersion},
          {"construction", std::string(to_string(w.construction))},
          {"n", w.n},
          {"value_domain", w.value_domain},
          {"writes", w.writes},
          {"reads_per_reader", w.reads_per_reader},
          {"mutation", std::string(to_string(w.mutation))},
          {"schedule", schedule(t.schedule)}};
}

inline json event(const Event& e, Construction c) {
  json j = {{"seq", e.seq}, {"pid", e.pid.index}, {"op", e.op}, {"kind", std::string(to_string(e.kind))}};
  switch (e.kind) {
    case EventKind::invoke:
      j["op_kind"] = e.op_kind == OpKind::write ? "write" : "read";
      if (e.op_kind == OpKind::write) j["arg"] = e.arg;
      break;
    case EventKind::respond:
      j["op_kind"] = e.op_kind == OpKind::write ? "write" : "read";
      if (e.result) j["result"] = *e.result;
      j["steps"] = e.steps;
      if (e.read_case) j["case"] = std::string(to_string(*e.read_case));
      j["ghost"] = {{"seq", e.ghost}};
      break;
    case EventKind::cell_read:
    case EventKind::cell_write: {
      j["cell"] = {e.cell.owner.index, e.cell.reader.index};
      if (e.line != Line::none) j["line"] = std::string(to_string(e.line));
      json recs = json::array();
      for (const Record& r : e.payload.records()) recs.push_back(record(r, c));
      j["records"] = recs;
      break;
    }
  }
  return j;
}

// -- parsing ---------------------------------------------------------------

struct Reader {
  std::size_t line;
  bool ghost_seen = false;

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line, what); }

  const json& at(const json& j, const char* key) const {
    if (!j.is_object() || !j.contains(key)) fail(std::string("missing field \"") + key + "\"");
    return j.at(key);
  }

  template <class T>
  T get(const json& j, const char* key) const {
    try {
      return at(j, key).get<T>();
    } catch (const nlohmann::json::exception&) {
      fail(std::string("field \"") + key + "\" has the wrong type");
    }
  }

  Field field(const json& j, const char* key) const {
    const json& v = at(j, key);
    if (v.is_null()) return Field::bottom();
    if (!v.is_number_integer() || v.get<int>() < 0) fail(std::string("bad timestamp field \"") + key + "\"");
    return Field::of(v.get<int>());
  }

  GhostSeq ghost_seq(const json& j) {
    if (!j.contains("ghost")) return 0;
    ghost_seen = true;
    return get<GhostSeq>(j.at("ghost"), "seq");
  }

  Record record(const json& j, Construction c) {
    if (!j.is_object()) fail("record must be an object");
    Record r;
    r.value.reset();
    if (j.contains("value")) r.value = get<Value>(j, "value");
    if (c == Construction::c0) {
      r.tag = get<std::uint64_t>(j, "tag");
    } else {
      r.ts = Timestamp{field(j, "tail"), field(j, "head")};
    }
    if (j.contains("slots")) {
      ReplicaSlots s;
      const auto values = get<std::vector<Value>>(j, "slots");
      if (values.size() != 2) fail("\"slots\" must hold two values");
      s.values = {values[0], values[1]};
      s.mark = get<std::uint8_t>(j, "mark");
      if (s.mark > 1) fail("\"mark\" must be 0 or 1");
      if (j.contains("ghost") && j.at("ghost").contains("slots")) {
        const auto g = get<std::vector<GhostSeq>>(j.at("ghost"), "slots");
        if (g.size() != 2) fail("ghost \"slots\" must hold two entries");
        s.ghost = {g[0], g[1]};
      }
      r.replicas = s;
    }
    r.ghost = ghost_seq(j);
    return r;
  }
};

}  // namespace trace_json

inline std::string trace_header_line(const Trace& t) { return trace_json::header(t).dump(); }

inline void write_trace(std::ostream& os, const Trace& t) {
  os << trace_json::header(t).dump() << '\n';
  for (const Event& e : t.events) os << trace_json::event(e, t.workload.construction).dump() << '\n';
}

inline std::string to_jsonl(const Trace& t) {
  std::ostringstream os;
  write_trace(os, t);
  return os.str();
}

struct ParsedTrace {
  Trace trace;
  bool has_ghost = false;
};

inline ParsedTrace parse_trace(std::istream& is) {
  using nlohmann::json;
  ParsedTrace out;
  std::string text;
  std::size_t line = 0;
  bool have_header = false;
  while (std::getline(is, text)) {
    ++line;
    if (text.empty()) continue;
    trace_json::Reader rd{line};
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      rd.fail(std::string("malformed JSON: ") + e.what());
    }
    if (!have_header) {
      if (rd.get<std::string>(j, "format") != kTraceFormatName) rd.fail("not a wfreg trace");
      const int version = rd.get<int>(j, "version");
      if (version != kTraceFormatVersion) {
        throw VersionMismatch(line, "trace format version " + std::to_string(version) + ", expected " +
                                        std::to_string(kTraceFormatVersion));
      }
      Workload& w = out.trace.workload;
      const auto c = parse_construction(rd.get<std::string>(j, "construction"));
      if (!c) rd.fail("unknown construction");
      w.construction = *c;
      w.n = rd.get<int>(j, "n");
      w.value_domain = rd.get<int>(j, "value_domain");
      w.writes = rd.get<std::vector<Value>>(j, "writes");
      w.reads_per_reader = rd.get<int>(j, "reads_per_reader");
      const auto m = parse_mutation(rd.get<std::string>(j, "mutation"));
      if (!m) rd.fail("unknown mutation");
      w.mutation = *m;
      try {
        w.validate();
      } catch (const std::invalid_argument& e) {
        rd.fail(std::string("invalid workload: ") + e.what());
      }
      const json& s = rd.at(j, "schedule");
      ScheduleSpec& spec = out.trace.schedule;
      const std::string mode = rd.get<std::string>(s, "mode");
      if (mode == "random") {
        spec.mode = ScheduleSpec::Mode::random;
        spec.seed = rd.get<std::uint64_t>(s, "seed");
      } else if (mode == "replay") {
        spec.mode = ScheduleSpec::Mode::replay;
        spec.steps = rd.get<std::vector<int>>(s, "steps");
      } else if (mode == "adversary") {
        spec.mode = ScheduleSpec::Mode::adversary;
        spec.seed = rd.get<std::uint64_t>(s, "seed");
        if (s.contains("solo")) {
          spec.solo = rd.get<int>(s, "solo");
        } else {
          spec.stalled = rd.get<std::vector<int>>(s, "stalled");
          spec.cut = rd.get<std::uint64_t>(s, "cut");
        }
      } else {
        rd.fail("unknown schedule mode \"" + mode + "\"");
      }
      have_header = true;
      continue;
    }
    const Construction c = out.trace.workload.construction;
    const int n = out.trace.workload.n;
    Event e;
    e.seq = rd.get<Seq>(j, "seq");
    if (e.seq != out.trace.events.size()) rd.fail("sequence number " + std::to_string(e.seq) + " out of order");
    e.pid = {rd.get<int>(j, "pid")};
    if (e.pid.index < 0 || e.pid.index > n) rd.fail("pid out of range");
    e.op = rd.get<OpId>(j, "op");
    const std::string kind = rd.get<std::string>(j, "kind");
    auto op_kind = [&] {
      const std::string k = rd.get<std::string>(j, "op_kind");
      if (k == "write") return OpKind::write;
      if (k == "read") return OpKind::read;
      rd.fail("unknown op_kind \"" + k + "\"");
    };
    if (kind == "invoke") {
      e.kind = EventKind::invoke;
      e.op_kind = op_kind();
      if (e.op_kind == OpKind::write) e.arg = rd.get<Value>(j, "arg");
    } else if (kind == "respond") {
      e.kind = EventKind::respond;
      e.op_kind = op_kind();
      if (j.contains("result")) e.result = rd.get<Value>(j, "result");
      e.steps = rd.get<int>(j, "steps");
      if (j.contains("case")) {
        e.read_case = parse_read_case(rd.get<std::string>(j, "case"));
        if (!e.read_case) rd.fail("unknown read case");
      }
      e.ghost = rd.ghost_seq(j);
    } else if (kind == "cell-read" || kind == "cell-write") {
      e.kind = kind == "cell-read" ? EventKind::cell_read : EventKind::cell_write;
      const auto id = rd.get<std::vector<int>>(j, "cell");
      if (id.size() != 2 || id[0] < 0 || id[0] > n || id[1] < 0 || id[1] > n) rd.fail("bad cell id");
      e.cell = cell(id[0], id[1]);
      if (j.contains("line")) {
        const auto l = parse_line(rd.get<std::string>(j, "line"));
        if (!l) rd.fail("unknown line label");
        e.line = *l;
      }
      const json& recs = rd.at(j, "records");
      const std::size_t arity = id[0] < n && id[1] == n ? 2 : 1;
      if (!recs.is_array() || recs.size() != arity) rd.fail("record count does not match cell arity");
      e.payload = arity == 2 ? CellContent(rd.record(recs[0], c), rd.record(recs[1], c))
                             : CellContent(rd.record(recs[0], c));
    } else {
      rd.fail("unknown event kind \"" + kind + "\"");
    }
    out.has_ghost = out.has_ghost || rd.ghost_seen;
    out.trace.events.push_back(e);
  }
  if (!have_header) throw ParseError(line + 1, "missing header");
  try {
    operations(out.trace);
  } catch (const std::invalid_argument& e) {
    throw ParseError(line, std::string("inconsistent events: ") + e.what());
  }
  return out;
}

inline ParsedTrace parse_trace(const std::string& text) {
  std::istringstream is(text);
  return parse_trace(is);
}

/// Removes every "ghost" object from a trace, line by line. The result
/// parses as a trace without verification metadata.
inline void strip_ghost(std::istream& is, std::ostream& os) {
  using nlohmann::json;
  std::string text;
  std::size_t line = 0;
  auto strip = [](auto& self, json& j) -> void {
    if (j.is_object()) {
      j.erase("ghost");
      for (auto& el : j.items()) self(self, el.value());
    } else if (j.is_array()) {
      for (json& v : j) self(self, v);
    }
  };
  while (std::getline(is, text)) {
    ++line;
    if (text.empty()) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(line, std::string("malformed JSON: ") + e.what());
    }
    strip(strip, j);
    os << j.dump() << '\n';
  }
}

// -- reports ---------------------------------------------------------------

inline nlohmann::json to_json(const Verdict& v) {
  nlohmann::json j = {{"check", v.check}, {"status", std::string(to_string(v.status))}};
  if (!v.detail.empty()) j["detail"] = v.detail;
  if (!v.order.empty()) j["order"] = v.order;
  return j;
}

}  // namespace wfreg
