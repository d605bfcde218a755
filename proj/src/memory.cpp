#include "invivo/memory.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "invivo/errors.hpp"

namespace invivo {

namespace {

constexpr const char* kHeader =
    "name\taddress\tposition\tmode\trecognized\tphysical\toptimal_pattern";

std::string address_list(std::uint64_t mask, const FrameFormat& fmt) {
  std::string out;
  for (Address a = 0; a < fmt.address_count(); ++a) {
    if (!((mask >> a) & 1U)) continue;
    if (!out.empty()) out += ',';
    out += fmt.address_str(a);
  }
  return out.empty() ? "-" : out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  return out;
}

}  // namespace

void write_memory_snapshot(std::ostream& os, const std::vector<NamedMemory>& nodes,
                           const FrameFormat& fmt) {
  os << kHeader << '\n';
  for (const auto& [name, m] : nodes) {
    os << name << '\t' << fmt.address_str(m.self) << '\t'
       << (m.position_id ? std::to_string(*m.position_id) : "-") << '\t'
       << to_string(m.working_mode) << '\t' << address_list(m.recognized, fmt) << '\t'
       << address_list(m.physical, fmt) << '\t';
    std::string patterns;
    for (Address a = 0; a < fmt.address_count(); ++a) {
      if (!m.is_physical(a)) continue;
      if (!patterns.empty()) patterns += ',';
      patterns += fmt.address_str(a) + ':' + std::to_string(m.pattern_for(a));
    }
    os << (patterns.empty() ? "-" : patterns) << '\n';
  }
}

std::vector<NamedMemory> read_memory_snapshot(std::istream& is, const FrameFormat& fmt) {
  std::vector<NamedMemory> out;
  std::vector<std::string> errs;
  std::string line;
  std::size_t lineno = 0;
  auto parse_mask = [&](const std::string& field, std::uint64_t& mask, const std::string& where) {
    if (field == "-") return;
    for (const auto& tok : split(field, ',')) {
      if (auto a = fmt.parse_address(tok)) {
        mask |= std::uint64_t{1} << *a;
      } else {
        errs.push_back(where + ": bad address \"" + tok + "\"");
      }
    }
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == kHeader) continue;
    const std::string where = "snapshot line " + std::to_string(lineno);
    const auto f = split(line, '\t');
    if (f.size() != 7) {
      errs.push_back(where + ": expected 7 columns, got " + std::to_string(f.size()));
      continue;
    }
    NamedMemory nm;
    nm.name = f[0];
    const auto self = fmt.parse_address(f[1]);
    if (!self) {
      errs.push_back(where + ": bad address \"" + f[1] + "\"");
      continue;
    }
    nm.memory = NodeMemory(*self, fmt);
    if (f[2] != "-") {
      try {
        nm.memory.position_id = static_cast<std::uint32_t>(std::stoul(f[2]));
      } catch (const std::exception&) {
        errs.push_back(where + ": bad position \"" + f[2] + "\"");
      }
    }
    if (f[3] == "T1") {
      nm.memory.working_mode = WorkingMode::T1;
    } else if (f[3] == "T2") {
      nm.memory.working_mode = WorkingMode::T2;
    } else if (f[3] == "T3") {
      nm.memory.working_mode = WorkingMode::T3;
    } else {
      errs.push_back(where + ": bad mode \"" + f[3] + "\"");
    }
    parse_mask(f[4], nm.memory.recognized, where);
    parse_mask(f[5], nm.memory.physical, where);
    if (f[6] != "-") {
      for (const auto& tok : split(f[6], ',')) {
        const auto colon = tok.find(':');
        const auto a = colon == std::string::npos ? std::nullopt
                                                  : fmt.parse_address(tok.substr(0, colon));
        if (!a) {
          errs.push_back(where + ": bad pattern entry \"" + tok + "\"");
          continue;
        }
        try {
          nm.memory.optimal_pattern[*a] = std::stoi(tok.substr(colon + 1));
        } catch (const std::exception&) {
          errs.push_back(where + ": bad pattern entry \"" + tok + "\"");
        }
      }
    }
    out.push_back(std::move(nm));
  }
  if (!errs.empty()) throw ConfigError(std::move(errs));
  return out;
}

}  // namespace invivo
