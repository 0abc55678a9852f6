// bdl-node: sensing-node daemon. Hardware drivers are out of reach here, so
// every configured sensor is backed by its simulated counterpart.

#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <stop_token>

#include "bdl/core/error.hpp"
#include "bdl/node/daemon.hpp"
#include "bdl/node/node_config.hpp"
#include "bdl/sim/drivers.hpp"
#include "bdl/sync/http_transport.hpp"

namespace {
std::stop_source g_stop;
void on_signal(int) { g_stop.request_stop(); }
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Building Data Lite sensing node"};
  std::string config_path, profile;
  std::uint64_t seed = 1;
  app.add_option("-c,--config", config_path, "node configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--profile", profile, "use a simulated sensor profile instead of the config's sensor lines");
  app.add_option("--seed", seed, "seed for the simulated drivers")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = bdl::node::load_node_config(config_path);
    if (!profile.empty()) cfg.sensors = bdl::sim::profile_sensors(profile);
    if (cfg.sensors.empty()) throw bdl::ConfigError("no sensors configured");

    bdl::SystemClock clock;
    auto start = clock.now();
    auto store = cfg.store_path ? std::make_unique<bdl::node::LocalStore>(cfg.node_id, *cfg.store_path)
                                : std::make_unique<bdl::node::LocalStore>(cfg.node_id);
    bdl::sync::HttpTransport transport(cfg.server_url, cfg.sync.transport_timeout);
    bdl::sync::SyncClient client(cfg.node_id, cfg.sync, *store, transport);
    bdl::node::NodeDaemon daemon(cfg.node_id, cfg.sampling, bdl::sim::simulated_drivers(cfg.sensors, seed, start), *store,
                                 client, [&](const bdl::SensorSpec& spec) {
                                   return bdl::sim::simulated_driver(spec, seed, clock.now());
                                 });

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << cfg.node_id << ": sampling every " << cfg.sampling.record_interval.count() << " s, syncing every "
              << cfg.sync.sync_interval.count() << " s to " << cfg.server_url << std::endl;
    daemon.run(clock, g_stop.get_token());

    const auto& s = daemon.stats();
    std::cout << cfg.node_id << ": " << s.records_stored << " records, " << s.sensor_faults << " sensor faults, "
              << s.sync_successes << "/" << s.sync_attempts << " syncs completed" << std::endl;
  } catch (const bdl::Error& e) {
    std::cerr << "bdl-node: " << e.what() << '\n';
    return 1;
  }
}
