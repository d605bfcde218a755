#include "invivo/mac.hpp"

#include <algorithm>

#include "invivo/errors.hpp"

namespace invivo {

void CdwmTransmitter::sense(std::uint32_t index, bool carrier) {
  if (exited_ || bits_.bit(index)) return;
  if (carrier) {
    exited_ = true;
    exit_index_ = index;
  }
}

std::vector<std::size_t> arbitration_winner(std::span<const BitString> frames) {
  if (frames.empty()) throw InvalidArgument("arbitration needs at least one frame");
  const auto len = frames.front().length;
  for (const auto& f : frames) {
    if (f.length != len) throw InvalidArgument("arbitration frames differ in length");
  }
  const auto best = *std::max_element(frames.begin(), frames.end());
  std::vector<std::size_t> winners;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i] == best) winners.push_back(i);
  }
  return winners;
}

ContentionResult run_contention(std::span<const Contender> contenders, const LinkTable& links) {
  ContentionResult res;
  res.received.resize(links.node_count());
  if (contenders.empty()) return res;
  const std::uint32_t len = contenders.front().bits.length;
  std::vector<CdwmTransmitter> tx;
  std::vector<bool> sending(links.node_count(), false);
  for (const auto& c : contenders) {
    if (c.bits.length != len) throw InvalidArgument("contending frames differ in length");
    if (c.node >= links.node_count()) throw OutOfBounds("contender node out of range");
    tx.emplace_back(c.bits);
    sending[c.node] = true;
  }
  std::vector<Transmission> emissions;
  for (std::uint32_t i = 0; i < len; ++i) {
    emissions.clear();
    for (std::size_t k = 0; k < tx.size(); ++k) {
      emissions.push_back({contenders[k].node, contenders[k].pattern, tx[k].emit(i)});
    }
    for (std::size_t n = 0; n < links.node_count(); ++n) {
      const ChannelReading r = superpose(emissions, n, links);
      if (!sending[n]) {
        res.received[n][0].push(r.detector[0].bit);
        res.received[n][1].push(r.detector[1].bit);
      }
      for (std::size_t k = 0; k < tx.size(); ++k) {
        if (contenders[k].node == n && !emissions[k].bit) {
          tx[k].sense(i, carrier_sense(r, links.config()));
        }
      }
    }
  }
  for (const auto& t : tx) res.outcomes.push_back(t.outcome());
  return res;
}

std::uint32_t Backoff::on_failure(Rng& rng) {
  const auto delay = static_cast<std::uint32_t>(1 + next_random(rng, window_));
  window_ = std::min(window_ * 2, kMaxWindow);
  ++failures_;
  return delay;
}

}  // namespace invivo
