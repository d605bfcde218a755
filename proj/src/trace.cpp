#include "invivo/trace.hpp"

#include <cstdio>
#include <ostream>

namespace invivo {

std::string_view to_string(TraceLevel l) {
  switch (l) {
    case TraceLevel::summary: return "summary";
    case TraceLevel::events: return "events";
    case TraceLevel::power: return "power";
  }
  return "?";
}

std::optional<TraceLevel> trace_level_from_string(std::string_view s) {
  for (auto l : {TraceLevel::summary, TraceLevel::events, TraceLevel::power}) {
    if (to_string(l) == s) return l;
  }
  return std::nullopt;
}

void Trace::record(TraceLevel l, std::uint64_t cycle, std::string_view node,
                   std::string_view kind, std::string_view payload) {
  if (!enabled(l)) return;
  *sink_ << cycle << '\t' << node << '\t' << kind << '\t' << payload << '\n';
  ++lines_;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace invivo
