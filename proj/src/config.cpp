#include "pcoord/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>

#ifndef PCOORD_PRESET_DIR
#define PCOORD_PRESET_DIR "presets"
#endif

namespace pcoord {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (known.count(key) == 0) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
void maybe(const json& j, const std::string& key, const std::string& where,
           T& out) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

Vec2 get_vec(const json& j, const std::string& key, const std::string& where) {
  const auto v = get<std::vector<double>>(j, key, where);
  if (v.size() != 2) throw ConfigError(where + "." + key + ": need [x, y]");
  return {v[0], v[1]};
}

ControlOverride parse_override(const json& j, const std::string& where) {
  reject_unknown(j, {"from", "to", "target", "control"}, where);
  ControlOverride o;
  o.from = get<int>(j, "from", where);
  o.to = get<int>(j, "to", where);
  const json& target = j.at("target");
  if (target.is_string()) {
    const auto t = target.get<std::string>();
    if (t == "all") {
      o.target = ControlOverride::Target::kAll;
    } else if (t == "first_accepted") {
      o.target = ControlOverride::Target::kFirstAccepted;
    } else {
      throw ConfigError(where + ".target: unknown target '" + t + "'");
    }
  } else {
    o.target = ControlOverride::Target::kIds;
    o.ids = get<std::vector<std::uint32_t>>(j, "target", where);
  }
  const auto control = get<std::string>(j, "control", where);
  if (control == "brake") {
    o.control = OverrideControl::kBrake;
  } else if (control == "throttle") {
    o.control = OverrideControl::kThrottle;
  } else {
    throw ConfigError(where + ".control: unknown control '" + control + "'");
  }
  return o;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

double ScenarioConfig::rate_of(std::size_t path) const {
  return paths.at(path).arrival_rate.value_or(arrival_rate);
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (!(footprint_diameter > 0)) fail("footprint_diameter must be positive");
  if (!(kin.u_min < 0 && kin.u_max > 0 && kin.v_max > 0)) {
    fail("kinodynamics: need u_min < 0 < u_max and v_max > 0");
  }
  if (paths.empty()) fail("at least one path is required");
  std::set<std::string> ids;
  for (const PathConfig& p : paths) {
    if (!ids.insert(p.id).second) fail("duplicate path id " + p.id);
    if (p.arrival_rate && !(*p.arrival_rate >= 0 && *p.arrival_rate <= 1)) {
      fail("path " + p.id + ": arrival_rate outside [0, 1]");
    }
    if (!(p.length > 0)) fail("path " + p.id + ": length must be positive");
  }
  if (!(arrival_rate >= 0 && arrival_rate <= 1)) {
    fail("arrival_rate outside [0, 1]");
  }
  if (!(p >= 0 && p <= 1 && q >= 0 && q <= 1)) fail("p, q outside [0, 1]");
  if (!(entry_offset >= 0 && exit_offset >= 0)) {
    fail("offsets must be non-negative");
  }
  if (horizon <= 0) fail("horizon must be positive");
  if (update_period <= 0) fail("update_period must be positive");
  if (n_sub <= 0) fail("n_sub must be positive");
  if (drain_after && (*drain_after < 0 || *drain_after > horizon)) {
    fail("drain_after must lie in [0, horizon]");
  }
  for (const InitialRobot& r : initial_robots) {
    if (ids.count(r.path) == 0) fail("initial robot on unknown path " + r.path);
    if (!(r.v >= 0 && r.v <= kin.v_max)) fail("initial robot speed invalid");
  }
  for (const ControlOverride& o : overrides) {
    if (o.from < 0 || o.to < o.from) fail("override needs 0 <= from <= to");
  }
}

namespace {

ScenarioConfig parse_config(const json& j) {
  const std::string w = "config";
  reject_unknown(j,
                 {"schema_version", "name", "footprint_diameter",
                  "kinodynamics", "paths", "entry_offset", "exit_offset",
                  "arrival_rate", "p", "q", "horizon", "seed",
                  "update_period", "n_sub", "drain_after", "initial_robots",
                  "overrides", "strict_acceptance", "monitors"},
                 w);
  const int version = get<int>(j, "schema_version", w);
  if (version != kConfigSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(version));
  }
  ScenarioConfig c;
  maybe(j, "name", w, c.name);
  maybe(j, "footprint_diameter", w, c.footprint_diameter);
  if (j.contains("kinodynamics")) {
    const json& k = j.at("kinodynamics");
    reject_unknown(k, {"v_max", "u_min", "u_max"}, "kinodynamics");
    maybe(k, "v_max", "kinodynamics", c.kin.v_max);
    maybe(k, "u_min", "kinodynamics", c.kin.u_min);
    maybe(k, "u_max", "kinodynamics", c.kin.u_max);
  }
  const json& paths = j.at("paths");
  if (!paths.is_array()) throw ConfigError("paths: expected an array");
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const std::string pw = "paths[" + std::to_string(i) + "]";
    const json& pj = paths[i];
    reject_unknown(pj,
                   {"id", "origin", "direction", "length", "x_entry",
                    "x_exit", "arrival_rate"},
                   pw);
    PathConfig p;
    p.id = get<std::string>(pj, "id", pw);
    p.origin = get_vec(pj, "origin", pw);
    p.direction = get_vec(pj, "direction", pw);
    const double n = norm(p.direction);
    if (!(n > 0)) throw ConfigError(pw + ".direction: zero vector");
    p.direction = (1.0 / n) * p.direction;
    p.length = get<double>(pj, "length", pw);
    if (pj.contains("x_entry")) p.x_entry = get<double>(pj, "x_entry", pw);
    if (pj.contains("x_exit")) p.x_exit = get<double>(pj, "x_exit", pw);
    if (pj.contains("arrival_rate")) {
      p.arrival_rate = get<double>(pj, "arrival_rate", pw);
    }
    c.paths.push_back(std::move(p));
  }
  maybe(j, "entry_offset", w, c.entry_offset);
  maybe(j, "exit_offset", w, c.exit_offset);
  maybe(j, "arrival_rate", w, c.arrival_rate);
  maybe(j, "p", w, c.p);
  maybe(j, "q", w, c.q);
  maybe(j, "horizon", w, c.horizon);
  maybe(j, "seed", w, c.seed);
  maybe(j, "update_period", w, c.update_period);
  maybe(j, "n_sub", w, c.n_sub);
  if (j.contains("drain_after") && !j.at("drain_after").is_null()) {
    c.drain_after = get<int>(j, "drain_after", w);
  }
  if (j.contains("initial_robots")) {
    for (const json& r : j.at("initial_robots")) {
      reject_unknown(r, {"path", "x", "v"}, "initial_robots");
      c.initial_robots.push_back({get<std::string>(r, "path", "initial_robots"),
                                  get<double>(r, "x", "initial_robots"),
                                  r.value("v", 0.0)});
    }
  }
  if (j.contains("overrides")) {
    for (const json& o : j.at("overrides")) {
      c.overrides.push_back(parse_override(o, "overrides"));
    }
  }
  maybe(j, "strict_acceptance", w, c.strict_acceptance);
  maybe(j, "monitors", w, c.monitors);
  c.validate();
  // Geometry errors (overlapping parallel paths, bad markers) surface here.
  try {
    build_paths(c);
  } catch (const GeometryError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

}  // namespace

ScenarioConfig config_from_json(const json& j) {
  try {
    return parse_config(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ordered_json config_to_json(const ScenarioConfig& c) {
  ordered_json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["name"] = c.name;
  j["footprint_diameter"] = c.footprint_diameter;
  j["kinodynamics"] = {{"v_max", c.kin.v_max},
                       {"u_min", c.kin.u_min},
                       {"u_max", c.kin.u_max}};
  ordered_json paths = ordered_json::array();
  for (const PathConfig& p : c.paths) {
    ordered_json pj;
    pj["id"] = p.id;
    pj["origin"] = {p.origin.x, p.origin.y};
    pj["direction"] = {p.direction.x, p.direction.y};
    pj["length"] = p.length;
    if (p.x_entry) pj["x_entry"] = *p.x_entry;
    if (p.x_exit) pj["x_exit"] = *p.x_exit;
    if (p.arrival_rate) pj["arrival_rate"] = *p.arrival_rate;
    paths.push_back(std::move(pj));
  }
  j["paths"] = std::move(paths);
  j["entry_offset"] = c.entry_offset;
  j["exit_offset"] = c.exit_offset;
  j["arrival_rate"] = c.arrival_rate;
  j["p"] = c.p;
  j["q"] = c.q;
  j["horizon"] = c.horizon;
  j["seed"] = c.seed;
  j["update_period"] = c.update_period;
  j["n_sub"] = c.n_sub;
  j["drain_after"] = c.drain_after ? ordered_json(*c.drain_after) : ordered_json(nullptr);
  ordered_json robots = ordered_json::array();
  for (const InitialRobot& r : c.initial_robots) {
    robots.push_back({{"path", r.path}, {"x", r.x}, {"v", r.v}});
  }
  j["initial_robots"] = std::move(robots);
  ordered_json overrides = ordered_json::array();
  for (const ControlOverride& o : c.overrides) {
    ordered_json oj;
    oj["from"] = o.from;
    oj["to"] = o.to;
    switch (o.target) {
      case ControlOverride::Target::kAll: oj["target"] = "all"; break;
      case ControlOverride::Target::kFirstAccepted:
        oj["target"] = "first_accepted";
        break;
      case ControlOverride::Target::kIds: oj["target"] = o.ids; break;
    }
    oj["control"] = o.control == OverrideControl::kBrake ? "brake" : "throttle";
    overrides.push_back(std::move(oj));
  }
  j["overrides"] = std::move(overrides);
  j["strict_acceptance"] = c.strict_acceptance;
  j["monitors"] = c.monitors;
  return j;
}

ScenarioConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::filesystem::path preset_dir() {
  if (const char* env = std::getenv("PCOORD_PRESET_DIR")) return env;
  return PCOORD_PRESET_DIR;
}

ScenarioConfig resolve_config(const std::string& path_or_preset) {
  const std::filesystem::path direct(path_or_preset);
  if (std::filesystem::is_regular_file(direct)) return load_config(direct);
  const auto preset = preset_dir() / (path_or_preset + ".json");
  if (std::filesystem::is_regular_file(preset)) return load_config(preset);
  throw ConfigError("no config file or preset named '" + path_or_preset + "'");
}

std::uint64_t config_hash(const ScenarioConfig& c) {
  ordered_json j = config_to_json(c);
  j.erase("seed");
  return fnv1a(j.dump());
}

std::vector<PathSpec> build_paths(const ScenarioConfig& c) {
  const Footprint f(c.footprint_diameter);
  // Provisional specs spanning the whole path, used to compute sections.
  std::vector<PathSpec> raw;
  for (const PathConfig& p : c.paths) {
    raw.emplace_back(p.id, p.origin, p.direction, p.length, 0.0, p.length);
  }
  std::vector<PathSpec> out;
  for (std::size_t a = 0; a < raw.size(); ++a) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t b = 0; b < raw.size(); ++b) {
      if (a == b) continue;
      const PairSection sec = pair_section(raw[a], raw[b], f);
      if (sec.kind() != SectionKind::kCrossing) continue;
      const Interval e = sec.extent(Axis::kFirst);
      lo = std::min(lo, e.lo);
      hi = std::max(hi, e.hi);
    }
    const PathConfig& p = c.paths[a];
    double entry = 0.0;
    double exit = p.length;
    if (lo <= hi) {
      entry = std::clamp(lo - c.entry_offset, 0.0, p.length);
      exit = std::clamp(hi + c.exit_offset, 0.0, p.length);
    }
    out.emplace_back(p.id, p.origin, p.direction, p.length,
                     p.x_entry.value_or(entry), p.x_exit.value_or(exit));
  }
  return out;
}

}  // namespace pcoord
