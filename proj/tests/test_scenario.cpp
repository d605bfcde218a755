#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "invivo/config.hpp"
#include "invivo/learning.hpp"
#include "invivo/run.hpp"
#include "invivo/scenario.hpp"
#include "support.hpp"

namespace invivo {
namespace {

Metrics run_fixture(const std::string& name, std::uint64_t seed,
                    std::optional<ProtocolVariant> protocol = std::nullopt,
                    std::ostream* trace_sink = nullptr) {
  WorldConfig c = load_config(test::fixture(name));
  if (protocol) c.scenario.protocol = *protocol;
  World w(c);
  Trace trace(TraceLevel::events, trace_sink);
  const auto rep = run_learning(w, trace);
  return run_scenario(w, c.scenario, seed, trace, rep.cycles);
}

TEST(Dose, DoublingStrategyKillsAfterTwoRounds) {
  EXPECT_DOUBLE_EQ(dose_step(0, 1.0, 8.0), 1.0);
  EXPECT_DOUBLE_EQ(dose_step(1, 1.0, 8.0), 2.0);
  EXPECT_DOUBLE_EQ(dose_step(5, 1.0, 8.0), 8.0);
  double total = 0;
  int rounds = 0;
  while (total < 3.0) total += dose_step(rounds++, 1.0, 8.0);
  EXPECT_EQ(rounds, 2);
  EXPECT_DOUBLE_EQ(total, 3.0);
}

TEST(T4, ThresholdOnEitherDetector) {
  const ChannelConfig cfg;
  EXPECT_FALSE(t4_sample({0, 0}, cfg));
  EXPECT_TRUE(t4_sample({0, cfg.theta_fluor}, cfg));
  EXPECT_FALSE(t4_sample({cfg.theta_fluor / 100, 0}, cfg));
}

TEST(Scenario, PhotothermalKillsEveryCluster) {
  const Metrics m = run_fixture("photothermal.json", 1);
  EXPECT_FALSE(m.timed_out);
  EXPECT_EQ(m.clusters_killed, 2u);
  EXPECT_DOUBLE_EQ(m.delivery_ratio(), 1.0);
  EXPECT_EQ(m.requests_dropped, 0u);
}

TEST(Scenario, KilledClusterStopsFluorescing) {
  std::ostringstream trace;
  run_fixture("photothermal.json", 1, std::nullopt, &trace);
  std::istringstream lines(trace.str());
  std::string line;
  std::uint64_t kill_cycle = 0;
  std::vector<std::uint64_t> detects;
  while (std::getline(lines, line)) {
    std::istringstream f(line);
    std::string cycle, node, kind;
    std::getline(f, cycle, '\t');
    std::getline(f, node, '\t');
    std::getline(f, kind, '\t');
    if (node == "tumor1" && kind == "kill") kill_cycle = std::stoull(cycle);
    if (node == "s1" && kind == "detect") detects.push_back(std::stoull(cycle));
  }
  ASSERT_GT(kill_cycle, 0u);
  ASSERT_FALSE(detects.empty());
  for (auto c : detects) EXPECT_LT(c, kill_cycle);
}

TEST(Scenario, SinglePairHandshakeWithinFourInstructionCycles) {
  const Metrics m = run_fixture("drug_delivery.json", 1);
  EXPECT_FALSE(m.timed_out);
  EXPECT_EQ(m.commands_delivered, 1u);
  const auto lat = m.max_latency("actuation");
  ASSERT_TRUE(lat);
  EXPECT_LE(*lat, 4u * 48u);
}

TEST(Scenario, HandshakeSequenceUsesConsecutiveSubcycles) {
  std::ostringstream trace;
  run_fixture("drug_delivery.json", 1, std::nullopt, &trace);
  std::istringstream lines(trace.str());
  std::string line;
  std::vector<std::pair<std::uint64_t, std::string>> tx;
  while (std::getline(lines, line)) {
    std::istringstream f(line);
    std::string cycle, node, kind, payload;
    std::getline(f, cycle, '\t');
    std::getline(f, node, '\t');
    std::getline(f, kind, '\t');
    std::getline(f, payload, '\t');
    if (kind == "tx") tx.emplace_back(std::stoull(cycle), payload.substr(0, payload.find(' ')));
  }
  ASSERT_EQ(tx.size(), 4u);
  EXPECT_EQ(tx[0].second, "NOTIFY");
  EXPECT_EQ(tx[1].second, "BLOCK");
  EXPECT_EQ(tx[2].second, "COMMAND");
  EXPECT_EQ(tx[3].second, "ACK");
  for (std::size_t i = 1; i < tx.size(); ++i) EXPECT_LT(tx[i].first - tx[i - 1].first, 48u);
}

TEST(Scenario, HiddenTerminalDifferential) {
  const Metrics basic = run_fixture("hidden_terminal.json", 1, ProtocolVariant::basic);
  const Metrics hs = run_fixture("hidden_terminal.json", 1, ProtocolVariant::handshake);
  EXPECT_LT(basic.delivery_ratio(), 1.0);
  EXPECT_DOUBLE_EQ(hs.delivery_ratio(), 1.0);
  EXPECT_GT(basic.collisions, 0u);
}

TEST(Scenario, CliqueRoundsMatchOracle) {
  const Metrics m = run_fixture("clique.json", 2);
  EXPECT_EQ(m.rounds, 2000u);
  EXPECT_EQ(m.oracle_mismatches, 0u);
  EXPECT_EQ(m.blocked_rounds, 0u);
  EXPECT_EQ(m.block_violations, 0u);
}

TEST(Run, WritesArtifactsAndVerifiesGolden) {
  const auto out = test::scratch_dir("run");
  RunOptions opts;
  opts.out_dir = out;
  opts.dump_patterns = true;
  opts.verify_dir = test::golden("reference_layout");
  const auto res = run_once(load_config(test::fixture("reference_layout.json")), opts);
  EXPECT_TRUE(res.verify_failures.empty());
  for (const char* f : {"trace.tsv", "metrics.txt", "memory.txt", "patterns.json"}) {
    EXPECT_TRUE(std::filesystem::exists(out / f)) << f;
  }
}

TEST(Run, VerifyReportsMismatches) {
  Metrics m;
  m.timed_out = true;
  const auto fails = verify_against(test::golden("reference_layout"), "name\n", m);
  EXPECT_GE(fails.size(), 2u);
}

TEST(Run, SnapshotSkipsLearning) {
  const auto out = test::scratch_dir("snap");
  const WorldConfig c = load_config(test::fixture("drug_delivery.json"));
  RunOptions first;
  first.out_dir = out / "a";
  const auto a = run_once(c, first);
  RunOptions second;
  second.out_dir = out / "b";
  second.memory_snapshot = out / "a" / "memory.txt";
  const auto b = run_once(c, second);
  EXPECT_EQ(b.learning.cycles, 0u);
  EXPECT_EQ(a.metrics.commands_delivered, b.metrics.commands_delivered);
}

}  // namespace
}  // namespace invivo
