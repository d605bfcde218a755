#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "invivo/antenna.hpp"
#include "invivo/channel.hpp"
#include "invivo/frame.hpp"
#include "invivo/geometry.hpp"
#include "invivo/timebase.hpp"

namespace invivo {

enum class ProtocolVariant : std::uint8_t { basic, handshake };
enum class ScenarioKind : std::uint8_t {
  photothermal,
  drug_delivery,
  hidden_terminal,
  clique_contention
};
enum class ClusterKind : std::uint8_t { fluor_sensor, actuator };

std::string_view to_string(ProtocolVariant p);
std::string_view to_string(ScenarioKind s);
std::string_view to_string(ClusterKind k);
std::optional<ProtocolVariant> protocol_from_string(std::string_view s);
std::optional<ScenarioKind> scenario_from_string(std::string_view s);

// A pattern is steered either at another node (by name) or along a fixed direction.
struct PatternTarget {
  std::string node;
  Vec3 direction;
  friend bool operator==(const PatternTarget&, const PatternTarget&) = default;
};

struct NodeSpec {
  std::string name;
  Address address = 0;
  NodePose pose;
  std::vector<std::string> recognized;
  std::vector<PatternTarget> pattern_targets;  // empty: antenna.default_targets
  bool controller_link = false;
  std::string relay_via;  // empty: none
  friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

struct ClusterSpec {
  std::string name;
  ClusterKind kind = ClusterKind::fluor_sensor;
  Vec3 position;
  std::optional<double> emit_power;  // falls back to channel.fluor_power
  double dose_kill = 1.0;
  std::string attached;
  std::uint64_t activate_at = 0;  // working-mode cycle
  friend bool operator==(const ClusterSpec&, const ClusterSpec&) = default;
};

struct AntennaSpec {
  ElementArray array{{Vec3{}}};
  std::uint32_t n_patterns = 1;
  std::vector<Vec3> default_targets;
  friend bool operator==(const AntennaSpec&, const AntennaSpec&) = default;
};

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::drug_delivery;
  ProtocolVariant protocol = ProtocolVariant::handshake;
  std::uint64_t max_cycles = 100 * 48;
  std::uint64_t activation_jitter = 0;  // activation offset drawn from [0, jitter]
  double dose_d0 = 1.0;
  double dose_cap = 8.0;
  std::uint32_t rounds = 100;  // clique_contention only
  std::string observer;        // clique_contention only; empty: last node
  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

struct WorldConfig {
  std::uint64_t seed = 1;
  ClockConfig clock;
  double cell_radius = 1.0;
  std::vector<HexRow> rows;
  ChannelConfig channel;
  AntennaSpec antenna;
  std::vector<NodeSpec> nodes;
  std::vector<ClusterSpec> clusters;
  ScenarioSpec scenario;

  FrameFormat frame_format() const { return {(clock.bits_per_frame - 3) / 2}; }
  friend bool operator==(const WorldConfig&, const WorldConfig&) = default;
};

// Parses and validates; throws ConfigError listing every violation found.
WorldConfig parse_config(std::string_view json_text);
WorldConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const WorldConfig& cfg);

// Semantic checks on an already-typed config; returns the violations.
std::vector<std::string> validate_config(const WorldConfig& cfg);

}  // namespace invivo
