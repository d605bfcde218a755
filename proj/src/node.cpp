#include "invivo/node.hpp"

#include <utility>

namespace invivo {

FirstLayerNode::FirstLayerNode(std::string name, NodeMemory memory, NodeParams params, Rng rng)
    : name_(std::move(name)), memory_(std::move(memory)), params_(params), rng_(rng) {}

void FirstLayerNode::note(std::string kind, std::string payload) {
  notes_.push_back({std::move(kind), std::move(payload)});
}

int FirstLayerNode::pattern_toward(Address a) const {
  if (a == params_.format.controller() || a == params_.format.broadcast()) return 0;
  return memory_.is_physical(a) ? memory_.pattern_for(a) : 0;
}

void FirstLayerNode::start_exchange(Frame payload, std::uint64_t detected_cycle) {
  Exchange ex;
  ex.payload = payload;
  ex.handshake = params_.protocol == ProtocolVariant::handshake &&
                 payload.recipient != params_.format.controller();
  ex.phase = ex.handshake ? Phase::need_notify : Phase::need_payload;
  ex.detected_cycle = detected_cycle;
  exchanges_.push_back(ex);
  ++stats_.exchanges_issued;
  note("exchange", std::string(to_string(payload.opcode)) + " to " + addr(payload.recipient));
}

std::optional<Outgoing> FirstLayerNode::begin_own_subcycle(const Tick& t) {
  if (blocked_by_ && t.icycle >= blocked_until_) {
    note("block_timeout", addr(*blocked_by_));
    blocked_by_.reset();
  }
  if (reserved_for_ && t.icycle >= reserved_until_) {
    note("reservation_timeout", addr(*reserved_for_));
    reserved_for_.reset();
  }
  if (!responses_.empty()) {
    in_flight_ = InFlight::response;
    return Outgoing{responses_.front().frame, responses_.front().pattern};
  }
  if (exchanges_.empty() || blocked_by_) return std::nullopt;
  Exchange& ex = exchanges_.front();
  if (t.icycle < ex.resume_icycle) return std::nullopt;
  const Address peer = ex.payload.recipient;
  if (ex.phase == Phase::need_notify) {
    in_flight_ = InFlight::exchange;
    return Outgoing{{peer, Opcode::NOTIFY, memory_.self}, pattern_toward(peer)};
  }
  if (ex.phase == Phase::need_payload) {
    in_flight_ = InFlight::exchange;
    return Outgoing{ex.payload, pattern_toward(peer)};
  }
  return std::nullopt;
}

void FirstLayerNode::end_own_subcycle(const Tick& t, const CdwmOutcome& outcome) {
  if (!in_flight_) return;
  const InFlight what = *in_flight_;
  in_flight_.reset();
  if (!outcome.completed) {
    ++stats_.exits;
    note("exit", "bit " + std::to_string(outcome.exit_index));
    return;
  }
  if (what == InFlight::response) {
    Response r = responses_.front();
    responses_.pop_front();
    if (r.release_after && reserved_for_ == r.release_after) {
      reserved_for_.reset();
      note("release", addr(*r.release_after));
    }
    if (r.actuate_after) {
      actuations_.push_back({r.frame.recipient, 1, t.cycle});
      actuations_.push_back(
          {r.frame.recipient, 2, t.cycle + params_.clock.instruction_cycle_length()});
    }
    if (r.forward_origin) {
      if (params_.controller_link) {
        start_exchange({params_.format.controller(), Opcode::RELAY, *r.forward_origin}, t.cycle);
      } else {
        note("no_route", "relay for " + addr(*r.forward_origin));
      }
    }
    return;
  }
  Exchange& ex = exchanges_.front();
  ex.wait_left = params_.response_wait;
  ex.phase = ex.phase == Phase::need_notify ? Phase::await_block : Phase::await_ack;
}

void FirstLayerNode::fail(const Tick& t, Exchange& ex) {
  const std::uint32_t delay = backoff_.on_failure(rng_);
  ex.resume_icycle = t.icycle + delay;
  ex.phase = ex.handshake ? Phase::need_notify : Phase::need_payload;
  ++stats_.retries;
  note("backoff", std::to_string(delay) + " window " + std::to_string(backoff_.window()));
}

void FirstLayerNode::succeed(const Tick& t) {
  const Exchange ex = exchanges_.front();
  exchanges_.pop_front();
  backoff_.on_success();
  ++stats_.exchanges_delivered;
  completed_.push_back({ex.payload, ex.detected_cycle, t.cycle});
  note("delivered", std::string(to_string(ex.payload.opcode)) + " to " +
                        addr(ex.payload.recipient));
}

void FirstLayerNode::end_receiving_subcycle(const Tick& t,
                                            std::span<const ReceivedFrame> frames) {
  const Address self = memory_.self;
  bool collision = false;
  int notifies = 0;
  for (const auto& rf : frames) {
    if (rf.decode.status == DecodeStatus::collision_suspect) collision = true;
    if (rf.decode.ok() && rf.decode.frame.opcode == Opcode::NOTIFY &&
        rf.decode.frame.recipient == self) {
      ++notifies;
    }
  }
  if (collision) ++stats_.collisions_seen;

  for (const auto& rf : frames) {
    const Frame& f = rf.decode.frame;
    if (blocked_by_ && f.opcode == Opcode::ACK && f.transmitter == *blocked_by_ &&
        rf.decode.status != DecodeStatus::collision_suspect) {
      note("unblocked", addr(f.transmitter));
      blocked_by_.reset();
    }
    if (!rf.decode.ok()) {
      if (rf.decode.status == DecodeStatus::collision_suspect) {
        note("reject", format_bits(f, params_.format));
      }
      continue;
    }
    switch (f.opcode) {
      case Opcode::NOTIFY:
        if (f.recipient != self) break;
        if (reserved_for_) {
          ++stats_.notifies_discarded;
          note("notify_discard", addr(f.transmitter) + " reserved");
        } else if (collision || notifies > 1) {
          ++stats_.notifies_discarded;
          note("notify_discard", addr(f.transmitter) + " collision");
        } else {
          reserved_for_ = f.transmitter;
          reserved_until_ = t.icycle + params_.reservation_timeout;
          responses_.push_back({block_frame(self, params_.format), 0, false, {}, {}});
          note("reserve", addr(f.transmitter));
        }
        break;
      case Opcode::COMMAND:
        if (f.recipient != self) break;
        note("command", addr(f.transmitter));
        responses_.push_back({{f.transmitter, Opcode::ACK, self},
                              pattern_toward(f.transmitter),
                              true,
                              {},
                              f.transmitter});
        break;
      case Opcode::RELAY:
        if (f.recipient != self) break;
        note("relay", addr(f.transmitter));
        responses_.push_back({{f.transmitter, Opcode::ACK, self},
                              pattern_toward(f.transmitter),
                              false,
                              f.transmitter,
                              f.transmitter});
        break;
      case Opcode::ACK:
        if (f.recipient == self && !exchanges_.empty()) {
          const Exchange& ex = exchanges_.front();
          if (ex.phase == Phase::await_ack && ex.payload.recipient == f.transmitter) succeed(t);
        }
        break;
      case Opcode::BLOCK:
        if (f.transmitter == self) break;
        if (!exchanges_.empty() && exchanges_.front().phase == Phase::await_block &&
            exchanges_.front().payload.recipient == f.transmitter) {
          exchanges_.front().phase = Phase::need_payload;
          note("block_go", addr(f.transmitter));
        } else {
          blocked_by_ = f.transmitter;
          blocked_until_ = t.icycle + params_.block_timeout;
          note("blocked", addr(f.transmitter));
        }
        break;
      default:
        break;
    }
  }

  if (!exchanges_.empty()) {
    Exchange& ex = exchanges_.front();
    if (ex.phase == Phase::await_block || ex.phase == Phase::await_ack) {
      if (ex.wait_left > 0) --ex.wait_left;
      if (ex.wait_left == 0) {
        note("timeout", ex.phase == Phase::await_block ? "BLOCK" : "ACK");
        fail(t, ex);
      }
    }
  }
}

void FirstLayerNode::controller_frame(const Tick& t, const Frame& f) {
  if (f.opcode != Opcode::ACK || f.transmitter != params_.format.controller()) return;
  if (exchanges_.empty()) return;
  const Exchange& ex = exchanges_.front();
  if (ex.phase == Phase::await_ack && ex.payload.recipient == params_.format.controller() &&
      ex.payload.transmitter == f.recipient) {
    succeed(t);
  }
}

bool FirstLayerNode::t4_sample(const Tick& t, bool fluorescence) {
  if (!fluorescence) {
    latched_ = false;
    return false;
  }
  if (latched_) return false;
  latched_ = true;
  const auto& fmt = params_.format;
  switch (params_.on_detect) {
    case DetectAction::none:
      break;
    case DetectAction::command_recognized:
      for (Address a = 0; a < fmt.address_count(); ++a) {
        if (memory_.is_recognized(a)) start_exchange({a, Opcode::COMMAND, memory_.self}, t.cycle);
      }
      break;
    case DetectAction::request_controller:
      if (params_.controller_link) {
        start_exchange({fmt.controller(), Opcode::RELAY, memory_.self}, t.cycle);
      } else if (params_.relay_via) {
        start_exchange({*params_.relay_via, Opcode::RELAY, memory_.self}, t.cycle);
      } else {
        note("no_route", "controller");
      }
      break;
  }
  return true;
}

}  // namespace invivo
