#include "invivo/world.hpp"

#include <algorithm>
#include <numeric>

#include "invivo/errors.hpp"

namespace invivo {

namespace {

std::vector<PatternTable> all_pattern_tables(const WorldConfig& cfg) {
  std::vector<PatternTable> out;
  out.reserve(cfg.nodes.size());
  for (std::size_t i = 0; i < cfg.nodes.size(); ++i) out.push_back(node_pattern_table(cfg, i));
  return out;
}

std::vector<NodePose> poses_of(const WorldConfig& cfg) {
  std::vector<NodePose> out;
  for (const auto& n : cfg.nodes) out.push_back(n.pose);
  return out;
}

}  // namespace

PatternTable node_pattern_table(const WorldConfig& cfg, std::size_t node) {
  const NodeSpec& self = cfg.nodes.at(node);
  std::vector<Vec3> targets;
  if (self.pattern_targets.empty()) {
    targets = cfg.antenna.default_targets;
  } else {
    for (const auto& t : self.pattern_targets) {
      if (t.node.empty()) {
        targets.push_back(t.direction);
        continue;
      }
      auto it = std::find_if(cfg.nodes.begin(), cfg.nodes.end(),
                             [&](const NodeSpec& n) { return n.name == t.node; });
      if (it == cfg.nodes.end()) throw ConfigError({"unknown pattern target \"" + t.node + "\""});
      targets.push_back(it->pose.position - self.pose.position);
    }
  }
  return synthesize_pattern_table(cfg.antenna.array, targets, cfg.antenna.n_patterns);
}

World::World(WorldConfig cfg)
    : config_(std::move(cfg)),
      format_(config_.frame_format()),
      grid_(config_.cell_radius, config_.rows),
      patterns_(all_pattern_tables(config_)),
      links_(poses_of(config_), patterns_, config_.channel) {
  for (const auto& n : config_.nodes) {
    NodeMemory m(n.address, format_);
    for (const auto& r : n.recognized) {
      if (auto j = index_of(r)) m.recognized |= std::uint64_t{1} << config_.nodes[*j].address;
    }
    memory_.push_back(std::move(m));
  }
}

std::optional<std::size_t> World::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < config_.nodes.size(); ++i) {
    if (config_.nodes[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> World::index_of(Address a) const {
  for (std::size_t i = 0; i < config_.nodes.size(); ++i) {
    if (config_.nodes[i].address == a) return i;
  }
  return std::nullopt;
}

std::vector<std::size_t> World::address_order() const {
  std::vector<std::size_t> idx(node_count());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return config_.nodes[a].address < config_.nodes[b].address;
  });
  return idx;
}

std::vector<NamedMemory> World::named_memory() const {
  std::vector<NamedMemory> out;
  for (std::size_t i = 0; i < node_count(); ++i) out.push_back({node(i).name, memory_[i]});
  return out;
}

void World::load_memory(const std::vector<NamedMemory>& snapshot) {
  std::vector<std::string> errs;
  if (snapshot.size() != node_count()) {
    errs.push_back("snapshot lists " + std::to_string(snapshot.size()) + " nodes, config has " +
                   std::to_string(node_count()));
  }
  std::vector<NodeMemory> next = memory_;
  for (const auto& [name, mem] : snapshot) {
    const auto i = index_of(name);
    if (!i) {
      errs.push_back("snapshot node \"" + name + "\" is not in the config");
      continue;
    }
    if (mem.self != node(*i).address) {
      errs.push_back("snapshot node \"" + name + "\" has address " + format_.address_str(mem.self) +
                     ", config says " + format_.address_str(node(*i).address));
      continue;
    }
    next[*i] = mem;
  }
  if (!errs.empty()) throw ConfigError(std::move(errs));
  memory_ = std::move(next);
}

}  // namespace invivo
