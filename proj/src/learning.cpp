#include "invivo/learning.hpp"

#include <optional>

#include "invivo/errors.hpp"

namespace invivo {

namespace {

constexpr std::uint64_t kAllPhysical = ~std::uint64_t{0};

// Counts clock cycles spent by the learning procedures.
class Ledger {
 public:
  Ledger(const World& w, std::uint64_t start) : clock_(w.config().clock), now_(start) {}
  std::uint64_t now() const { return now_; }
  void slot() { now_ += clock_.subcycle_length(); }
  void gap() { now_ += clock_.g_sync; }
  std::uint64_t since(std::uint64_t start) const { return now_ - start; }

 private:
  ClockConfig clock_;
  std::uint64_t now_;
};

std::optional<Frame> learning_decode(const LoneReception& rx, Address self,
                                     const FrameFormat& fmt) {
  for (const auto& bits : rx.bits) {
    if (!bits.any()) continue;
    const DecodeResult d = decode_verify(bits, self, kAllPhysical, fmt);
    if (d.ok()) return d.frame;
  }
  return std::nullopt;
}

void flag(LearningReport& rep, Trace& trace, std::uint64_t cycle, const std::string& node,
          const std::string& what) {
  rep.flags.push_back(node + ": " + what);
  trace.record(TraceLevel::summary, cycle, node, "flag", what);
}

}  // namespace

void LearningReport::merge(const LearningReport& other) {
  cycles += other.cycles;
  flags.insert(flags.end(), other.flags.begin(), other.flags.end());
}

LoneReception receive_alone(const LinkTable& links, std::size_t tx, int pattern,
                            const BitString& bits, std::size_t rx) {
  LoneReception out;
  for (std::uint32_t i = 0; i < bits.length; ++i) {
    const Transmission t{tx, pattern, bits.bit(i)};
    const ChannelReading r = superpose(std::span(&t, 1), rx, links);
    out.bits[0].push(r.detector[0].bit);
    out.bits[1].push(r.detector[1].bit);
    out.peak_power = std::max(out.peak_power, r.max_power());
  }
  return out;
}

LearningReport run_position_learning(World& world, Trace& trace, std::uint64_t start_cycle) {
  LearningReport rep;
  Ledger clock(world, start_cycle);
  const auto& fmt = world.format();
  const auto& grid = world.grid();
  std::vector<std::optional<HexCell>> cell_of_node(world.node_count());
  for (std::size_t i = 0; i < world.node_count(); ++i) {
    world.memory(i).position_id.reset();
    try {
      cell_of_node[i] = grid.cell_of(world.node(i).pose.position);
    } catch (const OutOfBounds&) {
      cell_of_node[i].reset();
    }
  }
  const auto cells = grid.scan_order();
  for (std::uint32_t id = 0; id < cells.size(); ++id) {
    const Frame posn = position_frame(id, fmt);
    for (std::size_t i = 0; i < world.node_count(); ++i) {
      if (cell_of_node[i] != cells[id]) continue;
      world.memory(i).position_id = position_of(posn, fmt);
      trace.record(TraceLevel::events, clock.now(), world.node(i).name, "position",
                   std::to_string(id));
    }
    clock.slot();
  }
  for (std::size_t i = 0; i < world.node_count(); ++i) {
    if (!world.memory(i).position_id) {
      flag(rep, trace, clock.now(), world.node(i).name, "outside every scanned cell");
    }
  }
  rep.cycles = clock.since(start_cycle);
  return rep;
}

LearningReport run_topology_learning(World& world, Trace& trace, std::uint64_t start_cycle) {
  LearningReport rep;
  Ledger clock(world, start_cycle);
  const auto& fmt = world.format();
  const auto& links = world.links();
  for (std::size_t s : world.address_order()) {
    NodeMemory& mem = world.memory(s);
    mem.physical = 0;
    for (Address x = 0; x < fmt.address_count(); ++x) {
      if (x == mem.self || fmt.is_special(x)) continue;
      const auto target = world.index_of(x);
      const BitString probe = encode({x, Opcode::PROBE, mem.self}, fmt);
      for (int p = 0; p < static_cast<int>(links.pattern_count(s)); ++p) {
        clock.slot();
        if (!target) continue;
        const auto heard = learning_decode(receive_alone(links, s, p, probe, *target), x, fmt);
        if (!heard || heard->opcode != Opcode::PROBE) continue;
        const BitString ack = encode({mem.self, Opcode::ACK, x}, fmt);
        for (int q = 0; q < static_cast<int>(links.pattern_count(*target)); ++q) {
          clock.slot();
          const auto back = learning_decode(receive_alone(links, *target, q, ack, s), mem.self, fmt);
          if (back && back->opcode == Opcode::ACK && back->transmitter == x) {
            mem.physical |= std::uint64_t{1} << x;
          }
        }
      }
    }
    std::string list;
    for (Address a = 0; a < fmt.address_count(); ++a) {
      if (!mem.is_physical(a)) continue;
      if (!list.empty()) list += ',';
      list += fmt.address_str(a);
    }
    trace.record(TraceLevel::events, clock.now(), world.node(s).name, "physical",
                 list.empty() ? "-" : list);
    clock.gap();
  }
  rep.cycles = clock.since(start_cycle);
  return rep;
}

std::optional<int> strongest_pattern(std::span<const std::optional<double>> powers) {
  std::optional<int> best;
  for (std::size_t p = 0; p < powers.size(); ++p) {
    if (!powers[p]) continue;
    if (!best || *powers[p] > *powers[static_cast<std::size_t>(*best)]) best = static_cast<int>(p);
  }
  return best;
}

LearningReport run_direction_learning(World& world, Trace& trace, std::uint64_t start_cycle) {
  LearningReport rep;
  Ledger clock(world, start_cycle);
  const auto& fmt = world.format();
  const auto& links = world.links();
  for (std::size_t s : world.address_order()) {
    NodeMemory& mem = world.memory(s);
    std::fill(mem.optimal_pattern.begin(), mem.optimal_pattern.end(), 0);
    for (Address x = 0; x < fmt.address_count(); ++x) {
      if (!mem.is_physical(x)) continue;
      const auto target = world.index_of(x);
      if (!target) continue;
      const BitString trial = encode({x, Opcode::PAT_TRIAL, mem.self}, fmt);
      std::vector<std::optional<double>> heard_power(links.pattern_count(s));
      for (int p = 0; p < static_cast<int>(links.pattern_count(s)); ++p) {
        clock.slot();
        const LoneReception rx = receive_alone(links, s, p, trial, *target);
        const auto heard = learning_decode(rx, x, fmt);
        if (heard && heard->opcode == Opcode::PAT_TRIAL) heard_power[p] = rx.peak_power;
      }
      const std::optional<int> best = strongest_pattern(heard_power);
      const std::string pair = world.node(s).name + "->" + world.node(*target).name;
      if (!best) {
        flag(rep, trace, clock.now(), world.node(s).name, "no trial heard on " + pair);
        continue;
      }
      const BitString feedback = encode(pattern_feedback_frame(mem.self, *best), fmt);
      std::optional<int> learned;
      for (int q = 0; q < static_cast<int>(links.pattern_count(*target)); ++q) {
        clock.slot();
        if (learned) continue;
        const auto back =
            learning_decode(receive_alone(links, *target, q, feedback, s), mem.self, fmt);
        if (back && back->opcode == Opcode::PAT_TRIAL) learned = back->transmitter;
      }
      if (!learned) {
        flag(rep, trace, clock.now(), world.node(s).name, "no feedback heard on " + pair);
        continue;
      }
      mem.optimal_pattern[x] = *learned;
      trace.record(TraceLevel::events, clock.now(), world.node(s).name, "pattern",
                   world.node(*target).name + "=" + std::to_string(*learned));
    }
    clock.gap();
  }
  rep.cycles = clock.since(start_cycle);
  return rep;
}

LearningReport run_mode_learning(World& world, Trace& trace, std::uint64_t start_cycle) {
  LearningReport rep;
  Ledger clock(world, start_cycle);
  const auto cells = world.grid().scan_order();
  for (std::size_t i : world.address_order()) {
    NodeMemory& mem = world.memory(i);
    clock.slot();
    if (!mem.position_id || *mem.position_id >= cells.size()) {
      mem.working_mode = WorkingMode::T1;
      flag(rep, trace, clock.now(), world.node(i).name, "unpositioned, mode defaults to T1");
      continue;
    }
    mem.working_mode = working_mode_of(cells[*mem.position_id]);
    trace.record(TraceLevel::events, clock.now(), world.node(i).name, "mode",
                 std::string(to_string(mem.working_mode)));
  }
  rep.cycles = clock.since(start_cycle);
  return rep;
}

LearningReport run_learning(World& world, Trace& trace, std::uint64_t start_cycle) {
  const auto& clk = world.config().clock;
  LearningReport rep;
  rep.cycles = clk.g_mode;
  trace.record(TraceLevel::summary, start_cycle, "controller", "learning_start");
  for (auto* phase : {&run_position_learning, &run_topology_learning, &run_direction_learning,
                      &run_mode_learning}) {
    rep.merge(phase(world, trace, start_cycle + rep.cycles));
    rep.cycles += clk.g_sync;
  }
  rep.cycles += clk.g_mode;

  std::vector<std::string> errs;
  const auto& fmt = world.format();
  for (std::size_t i = 0; i < world.node_count(); ++i) {
    const NodeMemory& m = world.memory(i);
    for (Address a = 0; a < fmt.address_count(); ++a) {
      if (m.is_recognized(a) && !m.is_physical(a)) {
        const auto j = world.index_of(a);
        errs.push_back("nodes[" + std::to_string(i) + "].recognized: \"" + world.node(i).name +
                       "\" cannot reach recognized recipient \"" +
                       (j ? world.node(*j).name : fmt.address_str(a)) + "\"");
      }
    }
  }
  if (!errs.empty()) throw ConfigError(std::move(errs));
  trace.record(TraceLevel::summary, start_cycle + rep.cycles, "controller", "learning_done",
               std::to_string(rep.cycles) + " cycles");
  return rep;
}

}  // namespace invivo
