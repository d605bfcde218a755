#include "invivo/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "invivo/errors.hpp"

namespace invivo {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string_view to_string(ProtocolVariant p) {
  return p == ProtocolVariant::basic ? "basic" : "handshake";
}

std::string_view to_string(ScenarioKind s) {
  switch (s) {
    case ScenarioKind::photothermal: return "photothermal";
    case ScenarioKind::drug_delivery: return "drug_delivery";
    case ScenarioKind::hidden_terminal: return "hidden_terminal";
    case ScenarioKind::clique_contention: return "clique_contention";
  }
  return "?";
}

std::string_view to_string(ClusterKind k) {
  return k == ClusterKind::fluor_sensor ? "fluor_sensor" : "actuator";
}

std::optional<ProtocolVariant> protocol_from_string(std::string_view s) {
  if (s == "basic") return ProtocolVariant::basic;
  if (s == "handshake") return ProtocolVariant::handshake;
  return std::nullopt;
}

std::optional<ScenarioKind> scenario_from_string(std::string_view s) {
  for (auto k : {ScenarioKind::photothermal, ScenarioKind::drug_delivery,
                 ScenarioKind::hidden_terminal, ScenarioKind::clique_contention}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

namespace {

// Field reader that records type problems instead of throwing.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void error(const std::string& key, const std::string& what) {
    errors_.push_back(key + ": " + what);
  }

  bool object(const json& j, const std::string& key) {
    if (j.is_object()) return true;
    error(key, "expected an object");
    return false;
  }

  template <typename T>
  void number(const json& j, const char* name, const std::string& path, T& out) {
    if (!j.contains(name)) return;
    const json& v = j.at(name);
    const std::string key = path + name;
    if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) return error(key, "expected a number");
      out = v.get<T>();
    } else {
      if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0)) {
        return error(key, "expected a nonnegative integer");
      }
      out = v.get<T>();
    }
  }

  void boolean(const json& j, const char* name, const std::string& path, bool& out) {
    if (!j.contains(name)) return;
    if (!j.at(name).is_boolean()) return error(path + name, "expected true or false");
    out = j.at(name).get<bool>();
  }

  bool string(const json& j, const char* name, const std::string& path, std::string& out,
              bool required = false) {
    if (!j.contains(name)) {
      if (required) error(path + name, "missing");
      return false;
    }
    if (!j.at(name).is_string()) {
      error(path + name, "expected a string");
      return false;
    }
    out = j.at(name).get<std::string>();
    return true;
  }

  bool vec3(const json& v, const std::string& key, Vec3& out) {
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
        !v[2].is_number()) {
      error(key, "expected [x, y, z]");
      return false;
    }
    out = {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
    return true;
  }

  void vec3(const json& j, const char* name, const std::string& path, Vec3& out,
            bool required = false) {
    if (!j.contains(name)) {
      if (required) error(path + name, "missing");
      return;
    }
    vec3(j.at(name), path + name, out);
  }

 private:
  std::vector<std::string>& errors_;
};

void read_clock(Reader& rd, const json& j, ClockConfig& c) {
  if (!rd.object(j, "clock")) return;
  rd.number(j, "bits_per_frame", "clock.", c.bits_per_frame);
  rd.number(j, "guard_bits", "clock.", c.guard_bits);
  rd.number(j, "pulse_rate", "clock.", c.pulse_rate);
  rd.number(j, "g_sync", "clock.", c.g_sync);
  rd.number(j, "g_mode", "clock.", c.g_mode);
}

void read_grid(Reader& rd, const json& j, WorldConfig& cfg) {
  if (!rd.object(j, "grid")) return;
  rd.number(j, "cell_radius", "grid.", cfg.cell_radius);
  if (j.contains("rows")) {
    const json& rows = j.at("rows");
    if (!rows.is_array()) return rd.error("grid.rows", "expected an array");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string key = "grid.rows[" + std::to_string(i) + "]";
      const json& r = rows[i];
      if (!r.is_array() || r.size() != 3 || !r[0].is_number_integer() ||
          !r[1].is_number_integer() || !r[2].is_number_integer()) {
        rd.error(key, "expected [r, q_min, q_max]");
        continue;
      }
      cfg.rows.push_back({r[0].get<int>(), r[1].get<int>(), r[2].get<int>()});
    }
  } else if (j.contains("rectangle")) {
    const json& r = j.at("rectangle");
    if (!rd.object(r, "grid.rectangle")) return;
    int q0 = 0, q1 = 0, r0 = 0, r1 = 0;
    for (auto [name, out] : {std::pair{"q_min", &q0}, std::pair{"q_max", &q1},
                             std::pair{"r_min", &r0}, std::pair{"r_max", &r1}}) {
      if (!r.contains(name) || !r.at(name).is_number_integer()) {
        rd.error(std::string("grid.rectangle.") + name, "expected an integer");
        return;
      }
      *out = r.at(name).get<int>();
    }
    for (int row = r0; row <= r1; ++row) cfg.rows.push_back({row, q0, q1});
  } else {
    rd.error("grid.rows", "missing");
  }
}

void read_channel(Reader& rd, const json& j, ChannelConfig& c) {
  if (!rd.object(j, "channel")) return;
  rd.number(j, "mu", "channel.", c.mu);
  rd.number(j, "theta_detect", "channel.", c.theta_detect);
  rd.number(j, "theta_fluor", "channel.", c.theta_fluor);
  rd.number(j, "tx_power", "channel.", c.tx_power);
  rd.number(j, "fluor_power", "channel.", c.fluor_power);
}

void read_antenna(Reader& rd, const json& j, AntennaSpec& a) {
  if (!rd.object(j, "antenna")) return;
  rd.number(j, "wavelength", "antenna.", a.array.wavelength);
  rd.number(j, "v_sat", "antenna.", a.array.v_sat);
  rd.number(j, "a_on", "antenna.", a.array.a_on);
  rd.number(j, "a_off", "antenna.", a.array.a_off);
  rd.number(j, "n_patterns", "antenna.", a.n_patterns);
  if (j.contains("elements")) {
    const json& e = j.at("elements");
    if (!e.is_array()) {
      rd.error("antenna.elements", "expected an array");
    } else {
      a.array.positions.clear();
      for (std::size_t i = 0; i < e.size(); ++i) {
        Vec3 p;
        if (rd.vec3(e[i], "antenna.elements[" + std::to_string(i) + "]", p)) {
          a.array.positions.push_back(p);
        }
      }
    }
  }
  if (j.contains("default_targets")) {
    const json& t = j.at("default_targets");
    if (!t.is_array()) return rd.error("antenna.default_targets", "expected an array");
    for (std::size_t i = 0; i < t.size(); ++i) {
      Vec3 p;
      if (rd.vec3(t[i], "antenna.default_targets[" + std::to_string(i) + "]", p)) {
        a.default_targets.push_back(p);
      }
    }
  }
}

void read_node(Reader& rd, const json& j, const std::string& path, const FrameFormat& fmt,
               NodeSpec& n) {
  if (!rd.object(j, path)) return;
  rd.string(j, "name", path + ".", n.name, true);
  std::string addr;
  if (rd.string(j, "address", path + ".", addr, true)) {
    if (auto a = fmt.parse_address(addr)) {
      n.address = *a;
    } else {
      rd.error(path + ".address", "expected " + std::to_string(fmt.address_bits) +
                                      " binary digits, got \"" + addr + "\"");
    }
  }
  rd.vec3(j, "position", path + ".", n.pose.position, true);
  rd.vec3(j, "normal", path + ".", n.pose.normal);
  if (j.contains("recognized")) {
    const json& r = j.at("recognized");
    if (!r.is_array()) {
      rd.error(path + ".recognized", "expected an array of node names");
    } else {
      for (const auto& v : r) {
        if (v.is_string()) {
          n.recognized.push_back(v.get<std::string>());
        } else {
          rd.error(path + ".recognized", "expected node names");
        }
      }
    }
  }
  if (j.contains("pattern_targets")) {
    const json& t = j.at("pattern_targets");
    if (!t.is_array()) {
      rd.error(path + ".pattern_targets", "expected an array");
    } else {
      for (std::size_t i = 0; i < t.size(); ++i) {
        PatternTarget pt;
        if (t[i].is_string()) {
          pt.node = t[i].get<std::string>();
        } else if (!rd.vec3(t[i], path + ".pattern_targets[" + std::to_string(i) + "]",
                            pt.direction)) {
          continue;
        }
        n.pattern_targets.push_back(pt);
      }
    }
  }
  rd.boolean(j, "controller_link", path + ".", n.controller_link);
  rd.string(j, "relay_via", path + ".", n.relay_via);
}

void read_cluster(Reader& rd, const json& j, const std::string& path, ClusterSpec& c) {
  if (!rd.object(j, path)) return;
  rd.string(j, "name", path + ".", c.name, true);
  std::string kind;
  if (rd.string(j, "kind", path + ".", kind, true)) {
    if (kind == "fluor_sensor") {
      c.kind = ClusterKind::fluor_sensor;
    } else if (kind == "actuator") {
      c.kind = ClusterKind::actuator;
    } else {
      rd.error(path + ".kind", "unknown cluster kind \"" + kind + "\"");
    }
  }
  rd.vec3(j, "position", path + ".", c.position, true);
  if (j.contains("emit_power")) {
    double p = 0.0;
    rd.number(j, "emit_power", path + ".", p);
    c.emit_power = p;
  }
  rd.number(j, "dose_kill", path + ".", c.dose_kill);
  rd.string(j, "attached", path + ".", c.attached, true);
  rd.number(j, "activate_at", path + ".", c.activate_at);
}

void read_scenario(Reader& rd, const json& j, ScenarioSpec& s) {
  if (!rd.object(j, "scenario")) return;
  std::string name;
  if (rd.string(j, "name", "scenario.", name, true)) {
    if (auto k = scenario_from_string(name)) {
      s.kind = *k;
    } else {
      rd.error("scenario.name", "unknown scenario \"" + name + "\"");
    }
  }
  std::string proto;
  if (rd.string(j, "protocol", "scenario.", proto)) {
    if (auto p = protocol_from_string(proto)) {
      s.protocol = *p;
    } else {
      rd.error("scenario.protocol", "expected basic or handshake, got \"" + proto + "\"");
    }
  }
  rd.number(j, "max_cycles", "scenario.", s.max_cycles);
  rd.number(j, "activation_jitter", "scenario.", s.activation_jitter);
  rd.number(j, "dose_d0", "scenario.", s.dose_d0);
  rd.number(j, "dose_cap", "scenario.", s.dose_cap);
  rd.number(j, "rounds", "scenario.", s.rounds);
  rd.string(j, "observer", "scenario.", s.observer);
}

ojson vec_json(const Vec3& v) { return ojson::array({v.x, v.y, v.z}); }

}  // namespace

std::vector<std::string> validate_config(const WorldConfig& cfg) {
  std::vector<std::string> errs;
  auto check = [&](bool ok, const std::string& key, const std::string& what) {
    if (!ok) errs.push_back(key + ": " + what);
  };

  const auto& c = cfg.clock;
  check(c.bits_per_frame >= 3, "clock.bits_per_frame", "must be at least 3");
  const bool width_ok = c.bits_per_frame % 2 == 1 && c.bits_per_frame >= 7 &&
                        c.bits_per_frame <= 15;
  check(width_ok, "clock.bits_per_frame",
        "must equal 2W + 3 for an address width W in [2, 6]");
  check(c.pulse_rate > 0.0, "clock.pulse_rate", "must be positive");
  check(c.g_sync >= 1, "clock.g_sync", "must be at least 1");
  check(c.g_mode > c.g_sync, "clock.g_mode", "must exceed clock.g_sync");

  check(cfg.cell_radius > 0.0, "grid.cell_radius", "must be positive");
  check(!cfg.rows.empty(), "grid.rows", "must not be empty");
  std::set<int> seen_rows;
  for (const auto& r : cfg.rows) {
    check(r.q_min <= r.q_max, "grid.rows", "row " + std::to_string(r.r) + " has q_min > q_max");
    check(seen_rows.insert(r.r).second, "grid.rows",
          "row " + std::to_string(r.r) + " listed twice");
  }

  const auto& ch = cfg.channel;
  check(ch.mu >= 0.0, "channel.mu", "must be nonnegative");
  check(ch.theta_fluor > 0.0, "channel.theta_fluor", "must be positive");
  check(ch.theta_fluor < ch.theta_detect, "channel.theta_fluor",
        "must be below channel.theta_detect");
  check(ch.tx_power > 0.0, "channel.tx_power", "must be positive");
  check(ch.fluor_power >= 0.0 && ch.fluor_power < ch.tx_power, "channel.fluor_power",
        "must lie in [0, channel.tx_power)");

  const auto& a = cfg.antenna;
  check(!a.array.positions.empty(), "antenna.elements", "must not be empty");
  check(a.array.wavelength > 0.0, "antenna.wavelength", "must be positive");
  check(a.array.v_sat > 0.0, "antenna.v_sat", "must be positive");
  check(a.array.a_off >= 0.0 && a.array.a_off <= a.array.a_on && a.array.a_on <= 1.0,
        "antenna.a_on", "amplitudes must satisfy 0 <= a_off <= a_on <= 1");
  check(a.n_patterns >= 1, "antenna.n_patterns", "must be at least 1");

  const FrameFormat fmt = width_ok ? cfg.frame_format() : FrameFormat{};
  std::map<std::string, const NodeSpec*> by_name;
  std::map<Address, std::string> by_addr;
  for (std::size_t i = 0; i < cfg.nodes.size(); ++i) {
    const auto& n = cfg.nodes[i];
    const std::string key = "nodes[" + std::to_string(i) + "]";
    check(!n.name.empty(), key + ".name", "must not be empty");
    check(by_name.emplace(n.name, &n).second, key + ".name",
          "duplicate node name \"" + n.name + "\"");
    if (auto [it, fresh] = by_addr.emplace(n.address, n.name); !fresh) {
      errs.push_back(key + ".address: duplicate address " + fmt.address_str(n.address) +
                     " used by nodes \"" + it->second + "\" and \"" + n.name + "\"");
    }
    check(n.address < fmt.address_count() && !fmt.is_special(n.address), key + ".address",
          "broadcast and controller addresses are reserved");
    check(std::abs(norm(n.pose.normal) - 1.0) < 1e-9, key + ".normal", "must be a unit vector");
  }
  for (std::size_t i = 0; i < cfg.nodes.size(); ++i) {
    const auto& n = cfg.nodes[i];
    const std::string key = "nodes[" + std::to_string(i) + "]";
    for (const auto& r : n.recognized) {
      auto it = by_name.find(r);
      if (it == by_name.end()) {
        errs.push_back(key + ".recognized: unknown node \"" + r + "\"");
        continue;
      }
      check(it->second != &n, key + ".recognized", "node cannot recognize itself");
      if (!fmt.is_actuator(n.address) && !fmt.is_actuator(it->second->address)) {
        errs.push_back(key + ".recognized: sensor \"" + n.name + "\" cannot command sensor \"" +
                       r + "\"");
      }
    }
    const std::size_t targets =
        n.pattern_targets.empty() ? a.default_targets.size() : n.pattern_targets.size();
    check(a.n_patterns <= targets + 1, key + ".pattern_targets",
          "antenna.n_patterns needs " + std::to_string(a.n_patterns - 1) +
              " targets, found " + std::to_string(targets));
    for (const auto& t : n.pattern_targets) {
      if (t.node.empty()) {
        check(norm(t.direction) > 0.0, key + ".pattern_targets", "direction must be nonzero");
      } else {
        check(by_name.count(t.node) == 1, key + ".pattern_targets",
              "unknown node \"" + t.node + "\"");
        check(t.node != n.name, key + ".pattern_targets", "cannot target itself");
      }
    }
    if (!n.relay_via.empty()) {
      check(by_name.count(n.relay_via) == 1, key + ".relay_via",
            "unknown node \"" + n.relay_via + "\"");
    }
    for (std::size_t k = 0; k < i; ++k) {
      check(cfg.nodes[k].pose.position != n.pose.position, key + ".position",
            "coincides with node \"" + cfg.nodes[k].name + "\"");
    }
  }

  std::set<std::string> cluster_names;
  for (std::size_t i = 0; i < cfg.clusters.size(); ++i) {
    const auto& cl = cfg.clusters[i];
    const std::string key = "clusters[" + std::to_string(i) + "]";
    check(!cl.name.empty(), key + ".name", "must not be empty");
    check(cluster_names.insert(cl.name).second, key + ".name",
          "duplicate cluster name \"" + cl.name + "\"");
    check(by_name.count(cl.attached) == 1, key + ".attached",
          "unknown node \"" + cl.attached + "\"");
    check(cl.dose_kill > 0.0, key + ".dose_kill", "must be positive");
    if (cl.emit_power) check(*cl.emit_power >= 0.0, key + ".emit_power", "must be nonnegative");
  }

  const auto& s = cfg.scenario;
  check(s.max_cycles > 0, "scenario.max_cycles", "must be positive");
  check(s.dose_d0 > 0.0, "scenario.dose_d0", "must be positive");
  check(s.dose_cap >= s.dose_d0, "scenario.dose_cap", "must be at least scenario.dose_d0");
  if (!s.observer.empty()) {
    check(by_name.count(s.observer) == 1, "scenario.observer",
          "unknown node \"" + s.observer + "\"");
  }
  if (s.kind == ScenarioKind::clique_contention) {
    check(cfg.nodes.size() >= 2, "nodes", "clique_contention needs at least two nodes");
  }
  return errs;
}

WorldConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("config: not valid JSON (") + e.what() + ")"});
  }
  std::vector<std::string> errs;
  Reader rd(errs);
  WorldConfig cfg;
  if (!rd.object(doc, "config")) throw ConfigError(errs);

  static const std::set<std::string> kKnown = {"seed",  "clock",    "grid",     "channel",
                                               "antenna", "nodes", "clusters", "scenario"};
  for (const auto& [key, _] : doc.items()) {
    if (kKnown.count(key) == 0) rd.error(key, "unknown key");
  }
  rd.number(doc, "seed", "", cfg.seed);
  if (doc.contains("clock")) read_clock(rd, doc.at("clock"), cfg.clock);
  if (doc.contains("grid")) {
    read_grid(rd, doc.at("grid"), cfg);
  } else {
    rd.error("grid", "missing");
  }
  if (doc.contains("channel")) read_channel(rd, doc.at("channel"), cfg.channel);
  if (doc.contains("antenna")) read_antenna(rd, doc.at("antenna"), cfg.antenna);

  const FrameFormat fmt = cfg.clock.bits_per_frame % 2 == 1 && cfg.clock.bits_per_frame >= 7 &&
                                  cfg.clock.bits_per_frame <= 15
                              ? cfg.frame_format()
                              : FrameFormat{};
  if (!doc.contains("nodes") || !doc.at("nodes").is_array()) {
    rd.error("nodes", "expected an array of nodes");
  } else {
    const json& nodes = doc.at("nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      NodeSpec n;
      read_node(rd, nodes[i], "nodes[" + std::to_string(i) + "]", fmt, n);
      cfg.nodes.push_back(std::move(n));
    }
  }
  if (doc.contains("clusters")) {
    const json& cl = doc.at("clusters");
    if (!cl.is_array()) {
      rd.error("clusters", "expected an array");
    } else {
      for (std::size_t i = 0; i < cl.size(); ++i) {
        ClusterSpec c;
        read_cluster(rd, cl[i], "clusters[" + std::to_string(i) + "]", c);
        cfg.clusters.push_back(std::move(c));
      }
    }
  }
  if (doc.contains("scenario")) {
    read_scenario(rd, doc.at("scenario"), cfg.scenario);
  } else {
    rd.error("scenario", "missing");
  }

  for (auto& e : validate_config(cfg)) errs.push_back(std::move(e));
  if (!errs.empty()) throw ConfigError(std::move(errs));
  return cfg;
}

WorldConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path.string() + ": cannot open config file"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const WorldConfig& cfg) {
  const FrameFormat fmt = cfg.frame_format();
  ojson doc;
  doc["seed"] = cfg.seed;
  doc["clock"] = {{"bits_per_frame", cfg.clock.bits_per_frame},
                  {"guard_bits", cfg.clock.guard_bits},
                  {"pulse_rate", cfg.clock.pulse_rate},
                  {"g_sync", cfg.clock.g_sync},
                  {"g_mode", cfg.clock.g_mode}};
  ojson rows = ojson::array();
  for (const auto& r : cfg.rows) rows.push_back({r.r, r.q_min, r.q_max});
  doc["grid"] = {{"cell_radius", cfg.cell_radius}, {"rows", rows}};
  doc["channel"] = {{"mu", cfg.channel.mu},
                    {"theta_detect", cfg.channel.theta_detect},
                    {"theta_fluor", cfg.channel.theta_fluor},
                    {"tx_power", cfg.channel.tx_power},
                    {"fluor_power", cfg.channel.fluor_power}};
  ojson elements = ojson::array();
  for (const auto& p : cfg.antenna.array.positions) elements.push_back(vec_json(p));
  ojson targets = ojson::array();
  for (const auto& t : cfg.antenna.default_targets) targets.push_back(vec_json(t));
  doc["antenna"] = {{"wavelength", cfg.antenna.array.wavelength},
                    {"v_sat", cfg.antenna.array.v_sat},
                    {"a_on", cfg.antenna.array.a_on},
                    {"a_off", cfg.antenna.array.a_off},
                    {"n_patterns", cfg.antenna.n_patterns},
                    {"elements", elements},
                    {"default_targets", targets}};
  ojson nodes = ojson::array();
  for (const auto& n : cfg.nodes) {
    ojson j;
    j["name"] = n.name;
    j["address"] = fmt.address_str(n.address);
    j["position"] = vec_json(n.pose.position);
    j["normal"] = vec_json(n.pose.normal);
    j["recognized"] = n.recognized;
    ojson pt = ojson::array();
    for (const auto& t : n.pattern_targets) {
      if (t.node.empty()) {
        pt.push_back(vec_json(t.direction));
      } else {
        pt.push_back(t.node);
      }
    }
    j["pattern_targets"] = pt;
    j["controller_link"] = n.controller_link;
    if (!n.relay_via.empty()) j["relay_via"] = n.relay_via;
    nodes.push_back(std::move(j));
  }
  doc["nodes"] = nodes;
  ojson clusters = ojson::array();
  for (const auto& c : cfg.clusters) {
    ojson j;
    j["name"] = c.name;
    j["kind"] = to_string(c.kind);
    j["position"] = vec_json(c.position);
    if (c.emit_power) j["emit_power"] = *c.emit_power;
    j["dose_kill"] = c.dose_kill;
    j["attached"] = c.attached;
    j["activate_at"] = c.activate_at;
    clusters.push_back(std::move(j));
  }
  doc["clusters"] = clusters;
  const auto& s = cfg.scenario;
  doc["scenario"] = {{"name", to_string(s.kind)},
                     {"protocol", to_string(s.protocol)},
                     {"max_cycles", s.max_cycles},
                     {"activation_jitter", s.activation_jitter},
                     {"dose_d0", s.dose_d0},
                     {"dose_cap", s.dose_cap},
                     {"rounds", s.rounds}};
  if (!s.observer.empty()) doc["scenario"]["observer"] = s.observer;
  return doc.dump(2) + "\n";
}

}  // namespace invivo
