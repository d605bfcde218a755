#include "invivo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "invivo/errors.hpp"
#include "invivo/mac.hpp"
#include "invivo/node.hpp"

namespace invivo {

std::optional<std::uint64_t> Metrics::max_latency(const std::string& kind) const {
  std::optional<std::uint64_t> best;
  for (const auto& l : latencies) {
    if (l.kind == kind) best = std::max(best.value_or(0), l.cycles);
  }
  return best;
}

std::map<std::string, double> Metrics::values() const {
  auto d = [](std::uint64_t v) { return static_cast<double>(v); };
  std::map<std::string, double> v = {
      {"timed_out", timed_out ? 1.0 : 0.0},
      {"cycles", d(cycles)},
      {"collisions", d(collisions)},
      {"exits", d(exits)},
      {"retries", d(retries)},
      {"notifies_discarded", d(notifies_discarded)},
      {"commands_sent", d(commands_sent)},
      {"commands_delivered", d(commands_delivered)},
      {"delivery_ratio", delivery_ratio()},
      {"exchanges_issued", d(exchanges_issued)},
      {"exchanges_delivered", d(exchanges_delivered)},
      {"exchanges_lost", d(exchanges_lost)},
      {"actuations", d(actuations)},
      {"clusters_killed", d(clusters_killed)},
      {"requests_dropped", d(requests_dropped)},
      {"total_dose", total_dose},
      {"rounds", d(rounds)},
      {"blocked_rounds", d(blocked_rounds)},
      {"oracle_mismatches", d(oracle_mismatches)},
      {"block_violations", d(block_violations)},
  };
  for (const char* kind : {"actuation", "service", "exchange"}) {
    if (auto m = max_latency(kind)) v[std::string("max_latency_") + kind] = d(*m);
  }
  return v;
}

void write_metrics(std::ostream& os, const Metrics& m) {
  os << "scenario\t" << m.scenario << '\n'
     << "protocol\t" << m.protocol << '\n'
     << "seed\t" << m.seed << '\n'
     << "status\t" << (m.timed_out ? "timeout" : "completed") << '\n';
  for (const auto& [key, value] : m.values()) os << key << '\t' << format_double(value) << '\n';
  for (const auto& [pos, dose] : m.doses) {
    os << "dose\t" << pos << '\t' << format_double(dose) << '\n';
  }
  for (const auto& l : m.latencies) {
    os << "latency\t" << l.kind << '\t' << l.node << '\t' << l.cycles << '\n';
  }
}

void write_summary_table(std::ostream& os, const std::vector<Metrics>& runs) {
  os << "seed\tstatus\tcycles\tsent\tdelivered\tratio\tcollisions\texits\tretries\tmax_lat\n";
  for (const auto& m : runs) {
    const auto lat = m.max_latency("actuation")
                         ? m.max_latency("actuation")
                         : (m.max_latency("service") ? m.max_latency("service")
                                                     : m.max_latency("exchange"));
    os << m.seed << '\t' << (m.timed_out ? "timeout" : "ok") << '\t' << m.cycles << '\t'
       << m.commands_sent << '\t' << m.commands_delivered << '\t'
       << format_double(m.delivery_ratio()) << '\t' << m.collisions << '\t' << m.exits << '\t'
       << m.retries << '\t' << (lat ? std::to_string(*lat) : "-") << '\n';
  }
}

bool t4_sample(const std::array<double, 2>& ambient, const ChannelConfig& cfg) {
  return std::max(ambient[0], ambient[1]) >= cfg.theta_fluor;
}

double dose_step(std::uint32_t round, double d0, double cap) {
  return std::min(d0 * std::ldexp(1.0, static_cast<int>(std::min(round, 60U))), cap);
}

namespace {

struct ClusterState {
  const ClusterSpec* spec = nullptr;
  std::size_t attached = 0;
  std::uint64_t activation_cycle = 0;
  bool activated = false;
  bool active = false;
  double dose = 0.0;
  int stage = 0;
  std::optional<std::uint32_t> position;
  std::vector<std::array<double, 2>> power_at;  // per node, per detector
};

struct Sender {
  std::size_t node = 0;
  Outgoing out;
  BitString bits;
  CdwmTransmitter cdwm;
};

class Engine {
 public:
  Engine(const World& world, const ScenarioSpec& spec, std::uint64_t seed, Trace& trace,
         std::uint64_t start)
      : world_(world),
        spec_(spec),
        trace_(trace),
        start_(start),
        clk_(world.config().clock),
        ch_(world.config().channel),
        fmt_(world.format()) {
    metrics_.scenario = std::string(to_string(spec.kind));
    metrics_.protocol = std::string(to_string(spec.protocol));
    metrics_.seed = seed;

    for (std::size_t i = 0; i < world.node_count(); ++i) {
      const NodeSpec& n = world.node(i);
      NodeParams p;
      p.format = fmt_;
      p.clock = clk_;
      p.protocol = spec.protocol;
      p.controller_link = n.controller_link;
      if (!n.relay_via.empty()) {
        if (auto j = world.index_of(n.relay_via)) p.relay_via = world.node(*j).address;
      }
      if (!fmt_.is_actuator(n.address)) {
        p.on_detect = spec.kind == ScenarioKind::photothermal ? DetectAction::request_controller
                                                              : DetectAction::command_recognized;
      }
      nodes_.emplace_back(n.name, world.memory(i), p, Rng(seed, i + 1));
    }

    Rng scenario_rng(seed, 0);
    const std::uint64_t jitter =
        spec.activation_jitter > 0 ? next_random(scenario_rng, spec.activation_jitter + 1) : 0;
    for (const auto& c : world.config().clusters) {
      ClusterState s;
      s.spec = &c;
      s.attached = world.index_of(c.attached).value();
      s.activation_cycle = c.activate_at + jitter;
      try {
        s.position = world.grid().scan_index(world.grid().cell_of(c.position));
      } catch (const OutOfBounds&) {
        s.position.reset();
      }
      const double emit = c.emit_power.value_or(ch_.fluor_power);
      for (std::size_t i = 0; i < world.node_count(); ++i) {
        std::array<double, 2> pw{0.0, 0.0};
        if (c.kind == ClusterKind::fluor_sensor) {
          const auto rp = isotropic_power(c.position, emit, world.node(i).pose, ch_.mu);
          pw[static_cast<int>(rp.side)] = rp.power;
        }
        s.power_at.push_back(pw);
      }
      last_activation_ = std::max(last_activation_, s.activation_cycle);
      clusters_.push_back(std::move(s));
    }
    rx_bits_.resize(world.node_count());
  }

  Metrics run() {
    trace_.record(TraceLevel::summary, start_, "engine", "working_start",
                  metrics_.scenario + " " + metrics_.protocol);
    ClockTracker tracker(clk_);
    const std::uint64_t ic_len = clk_.instruction_cycle_length();
    std::uint64_t c = 0;
    for (;;) {
      tracker.step(true);
      c = tracker.frame_cycle();
      if (c >= spec_.max_cycles) {
        metrics_.timed_out = true;
        break;
      }
      const Tick tick{start_ + c, c / ic_len};
      const SubcyclePosition pos = tracker.position();
      for (auto& cl : clusters_) {
        if (!cl.activated && cl.activation_cycle == c) activate(cl, tick);
      }
      if (c % ic_len == 0 && c > 0) {
        dosing_round(tick);
        if (finished(c)) break;
      }
      if (pos.offset == 0) begin_subcycle(pos.subcycle, tick);
      if (pos.subcycle != Subcycle::T4 && pos.offset < clk_.bits_per_frame) {
        clock_bits(pos, tick);
      }
      if (pos.is_last_bit(clk_)) end_subcycle(pos.subcycle, tick);
      deliver_controller_frames(tick);
      collect(tick);
      apply_actuations(tick);
    }
    metrics_.cycles = c;
    for (const auto& n : nodes_) {
      const auto& s = n.stats();
      metrics_.exits += s.exits;
      metrics_.retries += s.retries;
      metrics_.notifies_discarded += s.notifies_discarded;
      metrics_.collisions += s.collisions_seen;
      metrics_.exchanges_issued += s.exchanges_issued;
      metrics_.exchanges_delivered += s.exchanges_delivered;
    }
    metrics_.exchanges_lost = metrics_.exchanges_issued - metrics_.exchanges_delivered;
    trace_.record(TraceLevel::summary, start_ + c, "engine",
                  metrics_.timed_out ? "timeout" : "done",
                  "ratio=" + format_double(metrics_.delivery_ratio()));
    return metrics_;
  }

 private:
  std::array<double, 2> ambient(std::size_t node) const {
    std::array<double, 2> a{0.0, 0.0};
    for (const auto& cl : clusters_) {
      if (!cl.active) continue;
      a[0] += cl.power_at[node][0];
      a[1] += cl.power_at[node][1];
    }
    return a;
  }

  void activate(ClusterState& cl, const Tick& t) {
    cl.activated = true;
    cl.active = cl.spec->kind == ClusterKind::fluor_sensor;
    trace_.record(TraceLevel::summary, t.cycle, cl.spec->name, "activate",
                  std::string(to_string(cl.spec->kind)));
  }

  bool finished(std::uint64_t c) const {
    if (c < last_activation_ + clk_.instruction_cycle_length()) return false;
    for (const auto& cl : clusters_) {
      if (!cl.activated) return false;
      if (spec_.kind == ScenarioKind::photothermal && cl.active) return false;
    }
    if (!actuations_.empty() || !outbox_.empty() || !pending_positions_.empty()) return false;
    return std::all_of(nodes_.begin(), nodes_.end(),
                       [](const FirstLayerNode& n) { return n.idle(); });
  }

  void begin_subcycle(Subcycle sub, const Tick& t) {
    senders_.clear();
    for (auto& b : rx_bits_) b = {BitString{}, BitString{}};
    controller_bits_ = {};
    if (sub == Subcycle::T4) {
      for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const bool fl = t4_sample(ambient(i), ch_);
        if (nodes_[i].t4_sample(t, fl)) {
          detect_cycle_[world_.node(i).address] = t.cycle;
          trace_.record(TraceLevel::summary, t.cycle, nodes_[i].name(), "detect");
        }
      }
      return;
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].subcycle() != sub) continue;
      if (auto out = nodes_[i].begin_own_subcycle(t)) {
        const BitString bits = encode(out->frame, fmt_);
        senders_.push_back({i, *out, bits, CdwmTransmitter(bits)});
        trace_.record(TraceLevel::events, t.cycle, nodes_[i].name(), "tx",
                      std::string(to_string(out->frame.opcode)) + ' ' +
                          format_bits(out->frame, fmt_) + " p=" + std::to_string(out->pattern));
      }
    }
  }

  void clock_bits(const SubcyclePosition& pos, const Tick& t) {
    emissions_.clear();
    bool controller_bit = false;
    for (const auto& s : senders_) {
      const bool b = s.cdwm.emit(pos.offset);
      emissions_.push_back({s.node, s.out.pattern, b});
      if (b && world_.node(s.node).controller_link) controller_bit = true;
    }
    ambient_.clear();
    for (std::size_t i = 0; i < nodes_.size(); ++i) ambient_.push_back(ambient(i));
    const ChannelTick tick = evaluate_tick(emissions_, world_.links(), ambient_);
    for (std::size_t k = 0; k < senders_.size(); ++k) {
      if (!emissions_[k].bit) {
        senders_[k].cdwm.sense(pos.offset, carrier_sense(tick[senders_[k].node], ch_));
      }
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      rx_bits_[i][0].push(tick[i].detector[0].bit);
      rx_bits_[i][1].push(tick[i].detector[1].bit);
      if (trace_.enabled(TraceLevel::power) && tick[i].max_power() > 0.0) {
        trace_.record(TraceLevel::power, t.cycle, nodes_[i].name(), "power",
                      "top=" + format_double(tick[i].detector[0].power) +
                          " bottom=" + format_double(tick[i].detector[1].power));
      }
    }
    controller_bits_.push(controller_bit);
  }

  void end_subcycle(Subcycle sub, const Tick& t) {
    if (sub == Subcycle::T4) return;
    std::vector<std::vector<ReceivedFrame>> decoded(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].subcycle() == sub) continue;
      const NodeMemory& mem = nodes_[i].memory();
      for (int s = 0; s < 2; ++s) {
        const BitString& bits = rx_bits_[i][s];
        if (!bits.any()) continue;
        const DecodeResult d = decode_verify(bits, mem.self, mem.physical, fmt_);
        decoded[i].push_back({d, static_cast<DetectorSide>(s)});
        if (d.status != DecodeStatus::not_for_me) {
          trace_.record(TraceLevel::events, t.cycle, nodes_[i].name(), "rx",
                        std::string(to_string(d.status)) + ' ' + format_bits(d.frame, fmt_) +
                            ' ' + std::string(to_string(static_cast<DetectorSide>(s))));
        }
      }
    }

    for (auto& s : senders_) {
      const CdwmOutcome outcome = s.cdwm.outcome();
      nodes_[s.node].end_own_subcycle(t, outcome);
      const Opcode op = s.out.frame.opcode;
      if (!outcome.completed || (op != Opcode::COMMAND && op != Opcode::RELAY)) continue;
      ++metrics_.commands_sent;
      const Address r = s.out.frame.recipient;
      bool intact = false;
      if (r == fmt_.controller()) {
        intact = controller_bits_ == s.bits;
      } else if (auto j = world_.index_of(r)) {
        for (const auto& rf : decoded[*j]) {
          if (rf.decode.ok() && rf.decode.frame == s.out.frame) intact = true;
        }
      }
      if (intact) ++metrics_.commands_delivered;
      trace_.record(TraceLevel::events, t.cycle, nodes_[s.node].name(),
                    intact ? "frame_intact" : "frame_lost", format_bits(s.out.frame, fmt_));
    }

    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].subcycle() == sub) continue;
      nodes_[i].end_receiving_subcycle(t, decoded[i]);
    }

    if (controller_bits_.any()) controller_receive(t);
  }

  void controller_receive(const Tick& t) {
    const Frame f = parse_frame(controller_bits_, fmt_);
    if (f.recipient != fmt_.controller() ||
        (f.opcode != Opcode::RELAY && f.opcode != Opcode::COMMAND)) {
      return;
    }
    const Address origin = f.transmitter;
    const auto idx = world_.index_of(origin);
    if (!idx || !world_.memory(*idx).position_id) {
      ++metrics_.requests_dropped;
      trace_.record(TraceLevel::summary, t.cycle, "controller", "request_dropped",
                    "origin " + fmt_.address_str(origin));
      return;
    }
    const std::uint32_t pos = *world_.memory(*idx).position_id;
    trace_.record(TraceLevel::summary, t.cycle, "controller", "request",
                  world_.node(*idx).name + " position " + std::to_string(pos));
    if (pending_positions_.emplace(pos, 0).second) {
      auto d = detect_cycle_.find(origin);
      service_origin_[pos] = {world_.node(*idx).name,
                              d == detect_cycle_.end() ? t.cycle : d->second};
    }
    outbox_.push_back({t.cycle + clk_.subcycle_length(), {origin, Opcode::ACK, fmt_.controller()}});
  }

  void deliver_controller_frames(const Tick& t) {
    for (auto it = outbox_.begin(); it != outbox_.end();) {
      if (it->first > t.cycle) {
        ++it;
        continue;
      }
      trace_.record(TraceLevel::events, t.cycle, "controller", "signal",
                    format_bits(it->second, fmt_));
      for (auto& n : nodes_) n.controller_frame(t, it->second);
      it = outbox_.erase(it);
    }
  }

  void dosing_round(const Tick& t) {
    const auto cells = world_.grid().scan_order();
    for (auto it = pending_positions_.begin(); it != pending_positions_.end();) {
      const std::uint32_t pos = it->first;
      std::uint32_t& round = it->second;
      std::vector<ClusterState*> live;
      for (auto& cl : clusters_) {
        if (cl.active && cl.position == pos && cl.spec->kind == ClusterKind::fluor_sensor) {
          live.push_back(&cl);
        }
      }
      if (live.empty()) {
        trace_.record(TraceLevel::summary, t.cycle, "controller",
                      round == 0 ? "empty_cell" : "cell_cleared", std::to_string(pos));
        it = pending_positions_.erase(it);
        continue;
      }
      const double step = dose_step(round, spec_.dose_d0, spec_.dose_cap);
      metrics_.total_dose += step;
      metrics_.doses[pos] += step;
      trace_.record(TraceLevel::summary, t.cycle, "controller", "dose",
                    std::to_string(pos) + " " + format_double(step));
      if (round == 0) {
        const auto& [name, since] = service_origin_[pos];
        metrics_.latencies.push_back({"service", name, t.cycle - since});
      }
      for (auto* cl : live) {
        cl->dose += step;
        if (cl->dose >= cl->spec->dose_kill) {
          cl->active = false;
          ++metrics_.clusters_killed;
          trace_.record(TraceLevel::summary, t.cycle, cl->spec->name, "kill",
                        format_double(cl->dose));
        }
      }
      ++round;
      ++it;
    }
  }

  void collect(const Tick& t) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      for (auto& n : nodes_[i].take_notes()) {
        trace_.record(TraceLevel::events, t.cycle, nodes_[i].name(), n.kind, n.payload);
      }
      for (auto& a : nodes_[i].take_actuations()) actuations_.push_back({i, a});
      for (auto& e : nodes_[i].take_completed()) {
        metrics_.latencies.push_back(
            {"exchange", nodes_[i].name(), e.completed_cycle - e.detected_cycle});
      }
    }
  }

  void apply_actuations(const Tick& t) {
    for (auto it = actuations_.begin(); it != actuations_.end();) {
      const auto& [node, act] = *it;
      if (act.due_cycle > t.cycle) {
        ++it;
        continue;
      }
      std::string targets;
      for (auto& cl : clusters_) {
        if (cl.spec->kind != ClusterKind::actuator || cl.attached != node) continue;
        cl.stage = std::max(cl.stage, act.stage);
        targets += (targets.empty() ? "" : ",") + cl.spec->name;
      }
      ++metrics_.actuations;
      trace_.record(TraceLevel::summary, t.cycle, world_.node(node).name, "actuate",
                    "stage " + std::to_string(act.stage) + " origin " +
                        fmt_.address_str(act.origin) + " " + (targets.empty() ? "-" : targets));
      if (act.stage == 1) {
        if (auto d = detect_cycle_.find(act.origin); d != detect_cycle_.end()) {
          metrics_.latencies.push_back({"actuation", world_.node(node).name, t.cycle - d->second});
        }
      }
      it = actuations_.erase(it);
    }
  }

  const World& world_;
  const ScenarioSpec& spec_;
  Trace& trace_;
  std::uint64_t start_;
  ClockConfig clk_;
  ChannelConfig ch_;
  FrameFormat fmt_;
  Metrics metrics_;

  std::vector<FirstLayerNode> nodes_;
  std::vector<ClusterState> clusters_;
  std::uint64_t last_activation_ = 0;

  std::vector<Sender> senders_;
  std::vector<Transmission> emissions_;
  std::vector<std::array<double, 2>> ambient_;
  std::vector<std::array<BitString, 2>> rx_bits_;
  BitString controller_bits_;

  std::vector<std::pair<std::uint64_t, Frame>> outbox_;
  std::map<std::uint32_t, std::uint32_t> pending_positions_;
  std::map<std::uint32_t, std::pair<std::string, std::uint64_t>> service_origin_;
  std::map<Address, std::uint64_t> detect_cycle_;
  std::vector<std::pair<std::size_t, Actuation>> actuations_;
};

Frame random_frame(Rng& rng, Address self, const FrameFormat& fmt) {
  if (next_random(rng, 4) == 0) return block_frame(self, fmt);
  return {static_cast<Address>(next_random(rng, fmt.address_count())),
          static_cast<Opcode>(next_random(rng, 8)), self};
}

Metrics run_clique(const World& world, const ScenarioSpec& spec, std::uint64_t seed,
                   Trace& trace, std::uint64_t start) {
  Metrics m;
  m.scenario = std::string(to_string(spec.kind));
  m.protocol = std::string(to_string(spec.protocol));
  m.seed = seed;
  const auto& fmt = world.format();
  const std::size_t observer =
      spec.observer.empty() ? world.node_count() - 1 : world.index_of(spec.observer).value();
  Rng rng(seed, 0);
  const std::uint64_t ic = world.config().clock.instruction_cycle_length();
  for (std::uint32_t round = 0; round < spec.rounds; ++round) {
    const std::uint64_t cycle = start + round * ic;
    if (round * ic >= spec.max_cycles) {
      m.timed_out = true;
      break;
    }
    std::vector<Contender> contenders;
    std::vector<BitString> frames;
    std::vector<bool> is_block;
    for (std::size_t i = 0; i < world.node_count(); ++i) {
      if (i == observer) continue;
      const Frame f = random_frame(rng, world.node(i).address, fmt);
      contenders.push_back({i, encode(f, fmt), 0});
      frames.push_back(contenders.back().bits);
      is_block.push_back(f.opcode == Opcode::BLOCK && f.recipient == fmt.broadcast());
    }
    const ContentionResult res = run_contention(contenders, world.links());
    const auto winners = arbitration_winner(frames);
    std::vector<std::size_t> completed;
    for (std::size_t k = 0; k < res.outcomes.size(); ++k) {
      if (res.outcomes[k].completed) {
        completed.push_back(k);
      } else {
        ++m.exits;
      }
    }
    if (completed != winners) ++m.oracle_mismatches;
    const BitString& best = frames[winners.front()];
    const auto& seen = res.received[observer];
    if (seen[0] != best && seen[1] != best) ++m.blocked_rounds;
    const bool winner_blocks = is_block[winners.front()];
    for (std::size_t k = 0; k < res.outcomes.size(); ++k) {
      if (is_block[k] && !res.outcomes[k].completed && !winner_blocks) ++m.block_violations;
    }
    ++m.rounds;
    m.commands_sent += completed.size();
    m.commands_delivered += (seen[0] == best || seen[1] == best) ? completed.size() : 0;
    trace.record(TraceLevel::events, cycle, world.node(observer).name, "round",
                 best.str() + " winners=" + std::to_string(winners.size()));
    m.cycles = (round + 1) * ic;
  }
  trace.record(TraceLevel::summary, start + m.cycles, "engine", m.timed_out ? "timeout" : "done",
               "rounds=" + std::to_string(m.rounds));
  return m;
}

}  // namespace

Metrics run_scenario(const World& world, const ScenarioSpec& spec, std::uint64_t seed,
                     Trace& trace, std::uint64_t start_cycle) {
  if (spec.kind == ScenarioKind::clique_contention) {
    return run_clique(world, spec, seed, trace, start_cycle);
  }
  Engine engine(world, spec, seed, trace, start_cycle);
  return engine.run();
}

}  // namespace invivo
