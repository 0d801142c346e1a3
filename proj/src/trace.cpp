#include "pcoord/trace.hpp"

#include <istream>
#include <ostream>

namespace pcoord {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(Regime r) {
  return r == Regime::kControlled ? "controlled" : "braking";
}

std::string to_string(RobotStatus s) {
  switch (s) {
    case RobotStatus::kQueued: return "queued";
    case RobotStatus::kRequested: return "requested";
    case RobotStatus::kAccepted: return "accepted";
    case RobotStatus::kExited: return "exited";
  }
  return "queued";
}

namespace {

Regime parse_regime(const std::string& s) {
  if (s == "controlled") return Regime::kControlled;
  if (s == "braking") return Regime::kBraking;
  throw TraceError("unknown regime '" + s + "'");
}

RobotStatus parse_status(const std::string& s) {
  if (s == "queued") return RobotStatus::kQueued;
  if (s == "requested") return RobotStatus::kRequested;
  if (s == "accepted") return RobotStatus::kAccepted;
  if (s == "exited") return RobotStatus::kExited;
  throw TraceError("unknown status '" + s + "'");
}

RobotId parse_id(const json& j) { return static_cast<RobotId>(j.get<std::uint32_t>()); }

}  // namespace

void JsonlTraceWriter::on_header(const TraceHeader& h) {
  ordered_json j;
  j["kind"] = "header";
  j["schema_version"] = h.schema_version;
  j["seed"] = h.seed;
  j["config_hash"] = h.config_hash;
  j["name"] = h.name;
  j["n_sub"] = h.n_sub;
  j["footprint"] = h.footprint;
  j["kinodynamics"] = {{"v_max", h.kin.v_max},
                       {"u_min", h.kin.u_min},
                       {"u_max", h.kin.u_max}};
  j["drain_after"] = h.drain_after ? ordered_json(*h.drain_after)
                                   : ordered_json(nullptr);
  ordered_json paths = ordered_json::array();
  for (const TracePath& p : h.paths) {
    paths.push_back({{"id", p.id}, {"x_entry", p.x_entry},
                     {"x_exit", p.x_exit}});
  }
  j["paths"] = std::move(paths);
  out_ << j.dump() << '\n';
}

void JsonlTraceWriter::on_slot(const SlotRecord& s) {
  ordered_json j;
  j["kind"] = "slot";
  j["slot"] = s.slot;
  ordered_json edges = ordered_json::array();
  for (const auto& [w, l] : s.edges) edges.push_back({to_int(w), to_int(l)});
  j["edges"] = std::move(edges);
  ordered_json events = ordered_json::array();
  for (const TraceEvent& e : s.events) {
    events.push_back({{"type", e.type}, {"robot", to_int(e.robot)}});
  }
  j["events"] = std::move(events);
  out_ << j.dump() << '\n';
  for (const RobotRecord& r : s.robots) {
    ordered_json rj;
    rj["kind"] = "robot";
    rj["slot"] = s.slot;
    rj["id"] = to_int(r.id);
    rj["path"] = r.path;
    rj["x"] = r.x;
    rj["v"] = r.v;
    rj["u"] = r.u ? ordered_json(*r.u) : ordered_json(nullptr);
    rj["regime"] = to_string(r.regime);
    rj["status"] = to_string(r.status);
    out_ << rj.dump() << '\n';
  }
}

void JsonlTraceWriter::on_footer(const TraceFooter& f) {
  ordered_json j;
  j["kind"] = "footer";
  j["slots"] = f.slots;
  j["status"] = f.status;
  j["diagnostic"] = f.diagnostic;
  out_ << j.dump() << '\n';
  out_.flush();
}

void TeeSink::on_header(const TraceHeader& h) {
  for (TraceSink* s : sinks_) s->on_header(h);
}
void TeeSink::on_slot(const SlotRecord& r) {
  for (TraceSink* s : sinks_) s->on_slot(r);
}
void TeeSink::on_footer(const TraceFooter& f) {
  for (TraceSink* s : sinks_) s->on_footer(f);
}

void read_trace(std::istream& in, TraceSink& sink) {
  std::string line;
  int line_no = 0;
  bool have_header = false;
  bool have_footer = false;
  std::optional<SlotRecord> pending;
  auto flush = [&] {
    if (pending) sink.on_slot(*pending);
    pending.reset();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "trace line " + std::to_string(line_no);
    if (have_footer) throw TraceError(where + ": content after footer");
    try {
      const json j = json::parse(line);
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "header") {
        if (have_header) throw TraceError(where + ": second header");
        TraceHeader h;
        h.schema_version = j.at("schema_version").get<int>();
        if (h.schema_version != kTraceSchemaVersion) {
          throw TraceError(where + ": unsupported schema_version " +
                           std::to_string(h.schema_version));
        }
        h.seed = j.at("seed").get<std::uint64_t>();
        h.config_hash = j.at("config_hash").get<std::uint64_t>();
        h.name = j.at("name").get<std::string>();
        h.n_sub = j.at("n_sub").get<int>();
        h.footprint = j.at("footprint").get<double>();
        const json& k = j.at("kinodynamics");
        h.kin = {k.at("v_max").get<double>(), k.at("u_min").get<double>(),
                 k.at("u_max").get<double>()};
        if (!j.at("drain_after").is_null()) {
          h.drain_after = j.at("drain_after").get<int>();
        }
        for (const json& p : j.at("paths")) {
          h.paths.push_back({p.at("id").get<std::string>(),
                             p.at("x_entry").get<double>(),
                             p.at("x_exit").get<double>()});
        }
        have_header = true;
        sink.on_header(h);
        continue;
      }
      if (!have_header) throw TraceError(where + ": missing header");
      if (kind == "slot") {
        flush();
        SlotRecord s;
        s.slot = j.at("slot").get<int>();
        for (const json& e : j.at("edges")) {
          if (!e.is_array() || e.size() != 2) {
            throw TraceError(where + ": malformed edge");
          }
          s.edges.emplace_back(parse_id(e[0]), parse_id(e[1]));
        }
        for (const json& e : j.at("events")) {
          s.events.push_back(
              {e.at("type").get<std::string>(), parse_id(e.at("robot"))});
        }
        pending = std::move(s);
      } else if (kind == "robot") {
        if (!pending || j.at("slot").get<int>() != pending->slot) {
          throw TraceError(where + ": robot line outside its slot");
        }
        RobotRecord r;
        r.id = parse_id(j.at("id"));
        r.path = j.at("path").get<std::string>();
        r.x = j.at("x").get<double>();
        r.v = j.at("v").get<double>();
        if (!j.at("u").is_null()) r.u = j.at("u").get<double>();
        r.regime = parse_regime(j.at("regime").get<std::string>());
        r.status = parse_status(j.at("status").get<std::string>());
        pending->robots.push_back(std::move(r));
      } else if (kind == "footer") {
        flush();
        TraceFooter f;
        f.slots = j.at("slots").get<int>();
        f.status = j.at("status").get<std::string>();
        f.diagnostic = j.at("diagnostic").get<std::string>();
        have_footer = true;
        sink.on_footer(f);
      } else {
        throw TraceError(where + ": unknown kind '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw TraceError(where + ": " + e.what());
    }
  }
  if (!have_header) throw TraceError("trace is empty");
  if (!have_footer) throw TraceError("trace has no footer");
}

Trace read_trace(std::istream& in) {
  TraceCollector c;
  read_trace(in, c);
  return c.release();
}

}  // namespace pcoord
