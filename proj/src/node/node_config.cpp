#include "bdl/node/node_config.hpp"

#include <cstdlib>

#include "bdl/core/error.hpp"
#include "bdl/core/kv_config.hpp"

namespace bdl::node {

SensorSpec parse_sensor_line(std::string_view text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto colon = text.find(':', start);
    parts.emplace_back(text.substr(start, colon == std::string_view::npos ? std::string_view::npos : colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 4 && parts.size() != 5) {
    throw ConfigError("sensor '" + std::string(text) + "': expected name:type:kind:channel[:unit]");
  }
  SensorSpec spec;
  try {
    spec.name = parts[0];
    spec.sensor_id = parts[0];
    spec.interface_type = parse_interface_type(parts[1]);
    spec.value_kind = parse_value_kind(parts[2]);
    spec.channel = static_cast<int>(parse_integer("sensor channel", parts[3]));
    if (parts.size() == 5) spec.unit = parts[4];
    check_sensor_spec(spec);
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

NodeConfig parse_node_config(std::string_view text, std::optional<std::string> server_url_override) {
  NodeConfig cfg;
  for (const auto& [key, value] : parse_key_values(text)) {
    if (key == "node_id") {
      cfg.node_id = value;
    } else if (key == "server_url") {
      cfg.server_url = value;
    } else if (key == "record_interval_s") {
      cfg.sampling.record_interval = std::chrono::seconds{parse_integer(key, value)};
    } else if (key == "sync_interval_s") {
      cfg.sync.sync_interval = std::chrono::seconds{parse_integer(key, value)};
    } else if (key == "max_file_bytes") {
      cfg.sync.max_file_bytes = static_cast<std::size_t>(parse_integer(key, value));
    } else if (key == "transport_timeout_ms") {
      cfg.sync.transport_timeout = std::chrono::milliseconds{parse_integer(key, value)};
    } else if (key == "store") {
      cfg.store_path = value;
    } else if (key == "sensor") {
      auto spec = parse_sensor_line(value);
      for (const auto& s : cfg.sensors) {
        if (s.name == spec.name) throw ConfigError("duplicate sensor '" + spec.name + "'");
      }
      cfg.sensors.push_back(std::move(spec));
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  if (server_url_override) cfg.server_url = *server_url_override;
  try {
    check_node_id(cfg.node_id);
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  if (cfg.server_url.empty()) throw ConfigError("server_url is required");
  if (cfg.sampling.record_interval < kMinRecordInterval) {
    throw ConfigError("record_interval_s must be at least " + std::to_string(kMinRecordInterval.count()));
  }
  if (cfg.sync.sync_interval <= std::chrono::seconds{0}) throw ConfigError("sync_interval_s must be positive");
  if (cfg.sensors.empty()) throw ConfigError("at least one sensor is required");
  return cfg;
}

NodeConfig load_node_config(const std::string& path) {
  std::optional<std::string> override;
  if (const char* env = std::getenv(kServerUrlEnv); env != nullptr && *env != '\0') override = env;
  return parse_node_config(read_text_file(path), override);
}

}  // namespace bdl::node
