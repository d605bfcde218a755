#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "invivo/antenna.hpp"
#include "invivo/channel.hpp"
#include "invivo/config.hpp"
#include "invivo/geometry.hpp"
#include "invivo/memory.hpp"

namespace invivo {

// Immutable physical description of a deployment plus the mutable learned memory of
// each node. Node index i refers to config.nodes[i] everywhere.
class World {
 public:
  explicit World(WorldConfig cfg);

  const WorldConfig& config() const { return config_; }
  const FrameFormat& format() const { return format_; }
  const HexGrid& grid() const { return grid_; }
  const LinkTable& links() const { return links_; }
  const PatternTable& patterns(std::size_t node) const { return patterns_[node]; }
  const NodeSpec& node(std::size_t i) const { return config_.nodes[i]; }
  std::size_t node_count() const { return config_.nodes.size(); }

  std::optional<std::size_t> index_of(std::string_view name) const;
  std::optional<std::size_t> index_of(Address a) const;
  // Indices sorted by address.
  std::vector<std::size_t> address_order() const;

  NodeMemory& memory(std::size_t i) { return memory_[i]; }
  const NodeMemory& memory(std::size_t i) const { return memory_[i]; }
  std::vector<NamedMemory> named_memory() const;
  // Replaces learned memory from a snapshot; throws ConfigError when the snapshot
  // does not describe exactly this node set.
  void load_memory(const std::vector<NamedMemory>& snapshot);

 private:
  WorldConfig config_;
  FrameFormat format_;
  HexGrid grid_;
  std::vector<PatternTable> patterns_;
  LinkTable links_;
  std::vector<NodeMemory> memory_;
};

// Pattern table of one node, steered at its configured targets.
PatternTable node_pattern_table(const WorldConfig& cfg, std::size_t node);

}  // namespace invivo
