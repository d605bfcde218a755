// Command-line driver: learning, snapshot, working-mode scenario, artifacts.

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "invivo/config.hpp"
#include "invivo/errors.hpp"
#include "invivo/run.hpp"

namespace {

using namespace invivo;
namespace fs = std::filesystem;

struct SeedRange {
  std::uint64_t first = 0;
  std::uint64_t last = 0;
};

std::optional<SeedRange> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) return std::nullopt;
  try {
    std::size_t used = 0;
    SeedRange r;
    r.first = std::stoull(text.substr(0, dots), &used);
    if (used != dots) return std::nullopt;
    const std::string tail = text.substr(dots + 2);
    r.last = std::stoull(tail, &used);
    if (used != tail.size() || r.last < r.first) return std::nullopt;
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

int report_run(const RunResult& r, std::ostream& os) {
  for (const auto& f : r.learning.flags) os << "learning flag: " << f << '\n';
  if (r.verify_failures.empty()) return 0;
  for (const auto& f : r.verify_failures) os << "verify: " << f << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layered in-vivo sensor/actuator network simulator"};
  std::string config_path;
  std::string scenario;
  std::string protocol;
  std::uint64_t seed = 0;
  std::string seeds;
  std::uint64_t max_cycles = 0;
  std::string out_dir = "out";
  std::string verify_dir;
  std::string memory_path;
  bool dump_patterns = false;
  std::string trace_level = "summary";

  app.add_option("--config", config_path, "Scenario config (JSON)")->required();
  app.add_option("--scenario", scenario,
                 "photothermal | drug_delivery | hidden_terminal | clique_contention");
  app.add_option("--protocol", protocol, "basic | handshake");
  auto* seed_opt = app.add_option("--seed", seed, "Random seed");
  auto* seeds_opt = app.add_option("--seeds", seeds, "Seed range N..M, run in parallel");
  seed_opt->excludes(seeds_opt);
  auto* max_opt = app.add_option("--max-cycles", max_cycles, "Hard stop in clock cycles");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--verify", verify_dir, "Golden directory with memory.txt and bounds.json");
  app.add_option("--memory", memory_path, "Preloaded memory snapshot (skips learning)");
  app.add_flag("--dump-patterns", dump_patterns, "Write patterns.json");
  app.add_option("--trace-level", trace_level, "summary | events | power");
  CLI11_PARSE(app, argc, argv);

  RunOptions opts;
  std::vector<std::string> problems;
  if (!scenario.empty()) {
    opts.scenario = scenario_from_string(scenario);
    if (!opts.scenario) problems.push_back("--scenario: unknown scenario \"" + scenario + "\"");
  }
  if (!protocol.empty()) {
    opts.protocol = protocol_from_string(protocol);
    if (!opts.protocol) problems.push_back("--protocol: expected basic or handshake");
  }
  if (auto lvl = trace_level_from_string(trace_level)) {
    opts.trace_level = *lvl;
  } else {
    problems.push_back("--trace-level: expected summary, events or power");
  }
  if (*max_opt) opts.max_cycles = max_cycles;
  if (*seed_opt) opts.seed = seed;
  std::optional<SeedRange> range;
  if (*seeds_opt) {
    range = parse_seed_range(seeds);
    if (!range) problems.push_back("--seeds: expected N..M with N <= M");
  }
  opts.dump_patterns = dump_patterns;
  if (!verify_dir.empty()) opts.verify_dir = verify_dir;
  if (!memory_path.empty()) opts.memory_snapshot = memory_path;
  if (!problems.empty()) {
    for (const auto& p : problems) std::cerr << "error: " << p << '\n';
    return 2;
  }

  try {
    const WorldConfig cfg = load_config(config_path);
    if (!range) {
      opts.out_dir = out_dir;
      const RunResult r = run_once(cfg, opts);
      write_summary_table(std::cout, {r.metrics});
      return report_run(r, std::cerr);
    }

    const std::size_t n = range->last - range->first + 1;
    std::vector<std::optional<RunResult>> results(n);
    std::vector<std::string> errors(n);
    std::atomic<std::size_t> next{0};
    const std::size_t workers =
        std::min<std::size_t>(n, std::max(1U, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < n; k = next++) {
          RunOptions mine = opts;
          mine.seed = range->first + k;
          mine.out_dir = fs::path(out_dir) / ("seed_" + std::to_string(*mine.seed));
          try {
            results[k] = run_once(cfg, mine);
          } catch (const std::exception& e) {
            errors[k] = e.what();
          }
        }
      });
    }
    for (auto& t : pool) t.join();

    int status = 0;
    std::vector<Metrics> merged;
    for (std::size_t k = 0; k < n; ++k) {
      if (!errors[k].empty()) {
        std::cerr << "seed " << range->first + k << ": " << errors[k] << '\n';
        status = std::max(status, 2);
        continue;
      }
      merged.push_back(results[k]->metrics);
      if (report_run(*results[k], std::cerr) != 0) {
        std::cerr << "  (seed " << range->first + k << ")\n";
        status = std::max(status, 1);
      }
    }
    std::ofstream summary(fs::path(out_dir) / "summary.tsv");
    write_summary_table(summary, merged);
    write_summary_table(std::cout, merged);
    return status;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
