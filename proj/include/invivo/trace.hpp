#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace invivo {

enum class TraceLevel : std::uint8_t { summary = 0, events = 1, power = 2 };

std::string_view to_string(TraceLevel l);
std::optional<TraceLevel> trace_level_from_string(std::string_view s);

// Line-delimited audit log: cycle <TAB> node <TAB> kind <TAB> payload.
class Trace {
 public:
  Trace() = default;
  Trace(TraceLevel level, std::ostream* sink) : level_(level), sink_(sink) {}

  bool enabled(TraceLevel l) const { return sink_ != nullptr && l <= level_; }
  void record(TraceLevel l, std::uint64_t cycle, std::string_view node, std::string_view kind,
              std::string_view payload = {});
  std::uint64_t lines() const { return lines_; }

 private:
  TraceLevel level_ = TraceLevel::summary;
  std::ostream* sink_ = nullptr;
  std::uint64_t lines_ = 0;
};

// Fixed-format rendering of a double so traces stay byte-stable.
std::string format_double(double v);

}  // namespace invivo
