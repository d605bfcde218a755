#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "invivo/config.hpp"
#include "invivo/frame.hpp"
#include "invivo/mac.hpp"
#include "invivo/memory.hpp"
#include "invivo/timebase.hpp"

namespace invivo {

// What a node does when its T4 sample rises.
enum class DetectAction : std::uint8_t { none, command_recognized, request_controller };

struct NodeParams {
  FrameFormat format;
  ClockConfig clock;
  ProtocolVariant protocol = ProtocolVariant::handshake;
  DetectAction on_detect = DetectAction::none;
  bool controller_link = false;
  std::optional<Address> relay_via;
  std::uint32_t block_timeout = 4;        // instruction cycles
  std::uint32_t reservation_timeout = 4;  // instruction cycles
  std::uint32_t response_wait = 2;        // receiving subcycles
};

struct Tick {
  std::uint64_t cycle = 0;   // global clock cycle
  std::uint64_t icycle = 0;  // working-mode instruction cycle
};

struct Outgoing {
  Frame frame;
  int pattern = 0;
};

struct ReceivedFrame {
  DecodeResult decode;
  DetectorSide side = DetectorSide::top;
};

struct NodeNote {
  std::string kind;
  std::string payload;
};

// Second-layer command to the actuator's own clusters.
struct Actuation {
  Address origin = 0;  // node whose COMMAND caused it
  int stage = 1;
  std::uint64_t due_cycle = 0;
};

struct CompletedExchange {
  Frame payload;
  std::uint64_t detected_cycle = 0;
  std::uint64_t completed_cycle = 0;
};

struct NodeStats {
  std::uint64_t exits = 0;
  std::uint64_t retries = 0;
  std::uint64_t notifies_discarded = 0;
  std::uint64_t collisions_seen = 0;
  std::uint64_t exchanges_issued = 0;
  std::uint64_t exchanges_delivered = 0;
};

// First-layer sensor/actuator. Both roles share one machine: any node answers a
// NOTIFY with BLOCK and a COMMAND or RELAY with ACK, and any node may originate
// exchanges when its T4 sample rises.
class FirstLayerNode {
 public:
  FirstLayerNode(std::string name, NodeMemory memory, NodeParams params, Rng rng);

  const std::string& name() const { return name_; }
  const NodeMemory& memory() const { return memory_; }
  Subcycle subcycle() const { return transmit_subcycle(memory_.working_mode); }
  const NodeStats& stats() const { return stats_; }
  std::optional<Address> blocked_by() const { return blocked_by_; }
  std::optional<Address> reserved_for() const { return reserved_for_; }
  bool idle() const { return exchanges_.empty() && responses_.empty() && !in_flight_; }

  // Frame to contend with at the start of the node's own subcycle, if any.
  std::optional<Outgoing> begin_own_subcycle(const Tick& t);
  void end_own_subcycle(const Tick& t, const CdwmOutcome& outcome);
  // Frames decoded on the node's detectors during a first-layer subcycle it did not
  // transmit in.
  void end_receiving_subcycle(const Tick& t, std::span<const ReceivedFrame> frames);
  // Frame carried by the controller's signal laser.
  void controller_frame(const Tick& t, const Frame& f);
  // Returns true when the sample starts a new detection.
  bool t4_sample(const Tick& t, bool fluorescence);

  std::vector<Actuation> take_actuations() { return std::exchange(actuations_, {}); }
  std::vector<NodeNote> take_notes() { return std::exchange(notes_, {}); }
  std::vector<CompletedExchange> take_completed() { return std::exchange(completed_, {}); }

 private:
  enum class Phase : std::uint8_t { need_notify, await_block, need_payload, await_ack };

  struct Exchange {
    Frame payload;
    bool handshake = false;
    std::uint64_t detected_cycle = 0;
    Phase phase = Phase::need_payload;
    std::uint32_t wait_left = 0;
    std::uint64_t resume_icycle = 0;
  };

  struct Response {
    Frame frame;
    int pattern = 0;
    bool actuate_after = false;
    std::optional<Address> forward_origin;
    std::optional<Address> release_after;
  };

  enum class InFlight : std::uint8_t { response, exchange };

  void note(std::string kind, std::string payload = {});
  void start_exchange(Frame payload, std::uint64_t detected_cycle);
  void fail(const Tick& t, Exchange& ex);
  void succeed(const Tick& t);
  int pattern_toward(Address a) const;
  std::string addr(Address a) const { return params_.format.address_str(a); }

  std::string name_;
  NodeMemory memory_;
  NodeParams params_;
  Rng rng_;
  Backoff backoff_;
  NodeStats stats_;

  std::deque<Exchange> exchanges_;
  std::deque<Response> responses_;
  std::optional<InFlight> in_flight_;
  std::optional<Address> blocked_by_;
  std::uint64_t blocked_until_ = 0;
  std::optional<Address> reserved_for_;
  std::uint64_t reserved_until_ = 0;
  bool latched_ = false;

  std::vector<Actuation> actuations_;
  std::vector<NodeNote> notes_;
  std::vector<CompletedExchange> completed_;
};

}  // namespace invivo
