#include "invivo/run.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "invivo/errors.hpp"
#include "invivo/world.hpp"

namespace invivo {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError(p.string() + ": cannot write");
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError(p.string() + ": cannot read");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

WorldConfig apply_overrides(WorldConfig cfg, const RunOptions& opts) {
  if (opts.scenario) cfg.scenario.kind = *opts.scenario;
  if (opts.protocol) cfg.scenario.protocol = *opts.protocol;
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.max_cycles) cfg.scenario.max_cycles = *opts.max_cycles;
  return cfg;
}

RunResult run_once(const WorldConfig& base, const RunOptions& opts) {
  const WorldConfig cfg = apply_overrides(base, opts);
  if (auto errs = validate_config(cfg); !errs.empty()) throw ConfigError(std::move(errs));

  std::error_code ec;
  fs::create_directories(opts.out_dir, ec);
  if (ec) throw IoError(opts.out_dir.string() + ": cannot create output directory");

  std::ofstream trace_file = open_out(opts.out_dir / "trace.tsv");
  Trace trace(opts.trace_level, &trace_file);
  World world(cfg);
  RunResult result;
  if (opts.memory_snapshot) {
    std::istringstream snap(slurp(*opts.memory_snapshot));
    world.load_memory(read_memory_snapshot(snap, world.format()));
  } else {
    result.learning = run_learning(world, trace);
  }

  std::ostringstream memory_text;
  write_memory_snapshot(memory_text, world.named_memory(), world.format());
  open_out(opts.out_dir / "memory.txt") << memory_text.str();

  if (opts.dump_patterns) {
    std::ofstream pj = open_out(opts.out_dir / "patterns.json");
    pj << "[\n";
    for (std::size_t i = 0; i < world.node_count(); ++i) {
      pj << "{\"node\": \"" << world.node(i).name << "\", \"table\":\n";
      write_pattern_table(pj, world.patterns(i));
      pj << (i + 1 < world.node_count() ? "},\n" : "}\n");
    }
    pj << "]\n";
  }

  result.metrics = run_scenario(world, cfg.scenario, cfg.seed, trace, result.learning.cycles);
  std::ofstream mf = open_out(opts.out_dir / "metrics.txt");
  write_metrics(mf, result.metrics);
  if (!result.learning.flags.empty()) {
    for (const auto& f : result.learning.flags) mf << "learning_flag\t" << f << '\n';
  }

  if (opts.verify_dir) {
    result.verify_failures = verify_against(*opts.verify_dir, memory_text.str(), result.metrics);
  }
  return result;
}

std::vector<std::string> verify_against(const fs::path& golden_dir, const std::string& memory_text,
                                        const Metrics& metrics) {
  std::vector<std::string> fails;
  const fs::path mem_path = golden_dir / "memory.txt";
  if (fs::exists(mem_path)) {
    const std::string golden = slurp(mem_path);
    if (golden != memory_text) {
      std::istringstream a(golden), b(memory_text);
      std::string la, lb;
      for (std::size_t line = 1;; ++line) {
        const bool ga = static_cast<bool>(std::getline(a, la));
        const bool gb = static_cast<bool>(std::getline(b, lb));
        if (!ga && !gb) break;
        if (!ga || !gb || la != lb) {
          fails.push_back("memory.txt line " + std::to_string(line) + ": expected \"" +
                          (ga ? la : "<eof>") + "\", got \"" + (gb ? lb : "<eof>") + "\"");
        }
      }
    }
  } else {
    fails.push_back(mem_path.string() + ": missing");
  }
  const fs::path bounds_path = golden_dir / "bounds.json";
  if (fs::exists(bounds_path)) {
    nlohmann::json bounds;
    try {
      bounds = nlohmann::json::parse(slurp(bounds_path));
    } catch (const nlohmann::json::parse_error& e) {
      fails.push_back(bounds_path.string() + ": " + e.what());
      return fails;
    }
    const auto values = metrics.values();
    for (const auto& [key, rule] : bounds.items()) {
      auto it = values.find(key);
      if (it == values.end()) {
        fails.push_back("bounds.json: metric \"" + key + "\" was not reported");
        continue;
      }
      if (rule.contains("min") && it->second < rule["min"].get<double>()) {
        fails.push_back(key + " = " + format_double(it->second) + " below minimum " +
                        format_double(rule["min"].get<double>()));
      }
      if (rule.contains("max") && it->second > rule["max"].get<double>()) {
        fails.push_back(key + " = " + format_double(it->second) + " above maximum " +
                        format_double(rule["max"].get<double>()));
      }
    }
  }
  return fails;
}

}  // namespace invivo
