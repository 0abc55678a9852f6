#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bdl/node/daemon.hpp"
#include "bdl/sync/batcher.hpp"

namespace bdl::node {

inline constexpr const char* kServerUrlEnv = "BDL_SERVER_URL";

/// Contents of a node configuration file:
///
///   node_id = rpi_1
///   server_url = http://localhost:8080
///   record_interval_s = 60
///   sync_interval_s = 3600
///   max_file_bytes = 2097152        (optional)
///   store = /var/lib/bdl/rpi_1.journal   (optional; volatile when absent)
///   sensor = temperature:type3:continuous:4[:degC]
///
/// One `sensor` line per sensor, in registry order.
struct NodeConfig {
  std::string node_id;
  std::string server_url;
  SamplingConfig sampling;
  sync::SyncPolicy sync;
  std::vector<SensorSpec> sensors;
  std::optional<std::string> store_path;
};

/// `server_url_override`, when set, replaces the file's server_url.
NodeConfig parse_node_config(std::string_view text, std::optional<std::string> server_url_override = std::nullopt);

/// Reads the file and applies the BDL_SERVER_URL environment override.
NodeConfig load_node_config(const std::string& path);

SensorSpec parse_sensor_line(std::string_view text);

}  // namespace bdl::node
