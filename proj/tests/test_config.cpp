#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "invivo/config.hpp"
#include "invivo/errors.hpp"
#include "invivo/memory.hpp"
#include "invivo/world.hpp"
#include "support.hpp"

namespace invivo {
namespace {

const char* kMinimal = R"({
  "grid": {"cell_radius": 1.0, "rows": [[0, 0, 1]]},
  "nodes": [
    {"name": "s", "address": "0000", "position": [0, 0, 0], "recognized": ["a"]},
    {"name": "a", "address": "1000", "position": [1.7, 0, 0]}
  ],
  "scenario": {"name": "drug_delivery"}
})";

std::vector<std::string> violations_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& a, const std::string& b = "") {
  for (const auto& s : v) {
    if (s.find(a) != std::string::npos && s.find(b) != std::string::npos) return true;
  }
  return false;
}

std::string replaced(std::string text, const std::string& from, const std::string& to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

TEST(Config, MinimalTwoNodeWorld) {
  const WorldConfig c = parse_config(kMinimal);
  ASSERT_EQ(c.nodes.size(), 2u);
  EXPECT_EQ(c.frame_format().address_bits, 4u);
  EXPECT_EQ(c.scenario.kind, ScenarioKind::drug_delivery);
  const World w(c);
  EXPECT_EQ(w.index_of("a"), 1u);
  EXPECT_EQ(w.index_of(Address{0b1000}), 1u);
  EXPECT_TRUE(w.memory(0).is_recognized(0b1000));
}

TEST(Config, DuplicateAddressNamesBothNodes) {
  const auto v = violations_of(replaced(kMinimal, "\"1000\"", "\"0000\""));
  EXPECT_TRUE(mentions(v, "duplicate address 0000", "\"s\"")) << v.size();
  EXPECT_TRUE(mentions(v, "duplicate address 0000", "\"a\""));
}

TEST(Config, CollectsEveryViolation) {
  std::string text = replaced(kMinimal, "\"drug_delivery\"", "\"surgery\"");
  text = replaced(text, "\"1000\"", "\"1111\"");
  text = replaced(text, "\"grid\"", "\"bogus\": 1, \"grid\"");
  const auto v = violations_of(text);
  EXPECT_TRUE(mentions(v, "surgery"));
  EXPECT_TRUE(mentions(v, "bogus", "unknown key"));
  EXPECT_TRUE(mentions(v, "nodes[1].address"));
}

TEST(Config, SensorCannotCommandSensor) {
  const auto v = violations_of(replaced(kMinimal, "\"1000\"", "\"0001\""));
  EXPECT_TRUE(mentions(v, "cannot command sensor"));
}

TEST(Config, UnknownRecognizedName) {
  const auto v = violations_of(replaced(kMinimal, "[\"a\"]", "[\"ghost\"]"));
  EXPECT_TRUE(mentions(v, "unknown node \"ghost\""));
}

TEST(Config, MalformedJson) {
  EXPECT_THROW(parse_config("{ nope"), ConfigError);
}

TEST(Config, SerializeRoundTrip) {
  for (const char* name : {"reference_layout.json", "hidden_terminal.json", "photothermal.json",
                           "drug_delivery.json", "clique.json"}) {
    const WorldConfig c = load_config(test::fixture(name));
    EXPECT_EQ(parse_config(serialize_config(c)), c) << name;
  }
}

TEST(Config, ReferenceLayoutHasNineNodes) {
  const WorldConfig c = load_config(test::fixture("reference_layout.json"));
  ASSERT_EQ(c.nodes.size(), 9u);
  const World w(c);
  const auto& s1 = w.memory(*w.index_of("s1"));
  EXPECT_TRUE(s1.is_recognized(0b1000));
  EXPECT_TRUE(s1.is_recognized(0b1001));
  EXPECT_FALSE(s1.is_recognized(0b0010));
}

TEST(Config, MissingFileIsConfigError) {
  EXPECT_THROW(load_config(test::fixture("does_not_exist.json")), ConfigError);
}

TEST(MemorySnapshot, RoundTrip) {
  const FrameFormat fmt{4};
  NodeMemory m(0b0000, fmt);
  m.recognized = 0b11ULL << 8;
  m.physical = (1ULL << 2) | (1ULL << 8) | (1ULL << 9);
  m.optimal_pattern[2] = 1;
  m.optimal_pattern[8] = 3;
  m.optimal_pattern[9] = 2;
  m.working_mode = WorkingMode::T1;
  m.position_id = 3;
  NodeMemory empty(0b1010, fmt);
  empty.working_mode = WorkingMode::T3;
  const std::vector<NamedMemory> snap{{"s1", m}, {"a3", empty}};
  std::stringstream ss;
  write_memory_snapshot(ss, snap, fmt);
  EXPECT_NE(ss.str().find("s1\t0000\t3\tT1\t1000,1001\t0010,1000,1001\t0010:1,1000:3,1001:2"),
            std::string::npos);
  EXPECT_EQ(read_memory_snapshot(ss, fmt), snap);
}

TEST(MemorySnapshot, MalformedLineThrows) {
  std::stringstream ss("name\taddress\tposition\tmode\trecognized\tphysical\toptimal_pattern\n"
                       "s1\t0000\t3\tT7\t-\t-\t-\n");
  EXPECT_THROW(read_memory_snapshot(ss, FrameFormat{4}), ConfigError);
}

TEST(World, LoadMemoryRejectsForeignSnapshot) {
  World w(parse_config(kMinimal));
  std::vector<NamedMemory> snap = w.named_memory();
  EXPECT_NO_THROW(w.load_memory(snap));
  snap[0].name = "other";
  EXPECT_THROW(w.load_memory(snap), ConfigError);
}

}  // namespace
}  // namespace invivo
