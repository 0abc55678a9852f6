// bdl-sim: scenario runner and ingest benchmark.
//
//   bdl-sim simulate --scenario case_study.txt --seed 7 --report out.json
//   bdl-sim bench-ingest --rpm 200 --minutes 2

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "bdl/core/error.hpp"
#include "bdl/sim/bench.hpp"
#include "bdl/sim/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Building Data Lite simulation harness"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "run a scenario on the virtual clock");
  std::string scenario_path, report_path;
  std::optional<std::uint64_t> seed;
  simulate->add_option("--scenario", scenario_path, "scenario file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--seed", seed, "overrides the scenario's seed");
  simulate->add_option("--report", report_path, "JSON report path ('-' for stdout)");

  auto* bench = app.add_subcommand("bench-ingest", "measure sustained ingest requests per minute");
  bdl::sim::BenchConfig bench_cfg;
  std::string url, bench_report;
  bool unpaced = false;
  bench->add_option("--rpm", bench_cfg.rpm, "target ingest requests per minute")->capture_default_str();
  bench->add_option("--minutes", bench_cfg.minutes, "run length")->capture_default_str();
  bench->add_option("--url", url, "server to drive (default: in-process server)");
  bench->add_option("--nodes", bench_cfg.nodes, "simulated nodes")->capture_default_str();
  bench->add_option("--records", bench_cfg.records_per_request, "records per upload")->capture_default_str();
  bench->add_flag("--unpaced", unpaced, "send back to back to find the ceiling");
  bench->add_option("--report", bench_report, "JSON report path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      auto cfg = bdl::sim::load_scenario(scenario_path);
      if (seed) cfg.seed = *seed;
      auto report = bdl::sim::run_scenario(cfg);
      auto json = bdl::sim::to_json(report).dump(2);
      if (report_path == "-") {
        std::cout << json << '\n';
      } else if (!report_path.empty()) {
        std::ofstream(report_path) << json << '\n';
      }
      std::cerr << bdl::sim::summary_text(report);
      return report.outcome.consistent ? 0 : 2;
    }

    if (!url.empty()) bench_cfg.server_url = url;
    bench_cfg.paced = !unpaced;
    auto report = bdl::sim::run_bench_ingest(bench_cfg, [](const std::string& line) { std::cerr << line << '\n'; });
    auto json = bdl::sim::to_json(report);
    if (!bench_report.empty()) std::ofstream(bench_report) << json.dump(2) << '\n';
    std::cout << json.dump(2) << '\n';
    bool ok = report.sustains(bench_cfg.rpm, bench_cfg.minutes);
    std::cerr << (ok ? "sustained " : "did not sustain ") << bench_cfg.rpm << " requests/minute\n";
    return ok ? 0 : 1;
  } catch (const bdl::Error& e) {
    std::cerr << "bdl-sim: " << e.what() << '\n';
    return 1;
  }
}
