#include "bdl/server/server_config.hpp"

#include "bdl/core/error.hpp"
#include "bdl/core/kv_config.hpp"

namespace bdl::server {

ServerConfig parse_server_config(std::string_view text) {
  ServerConfig cfg;
  for (const auto& [key, value] : parse_key_values(text)) {
    if (key == "listen_address") {
      cfg.listen_address = value;
    } else if (key == "port") {
      auto port = parse_integer(key, value);
      if (port < 0 || port > 65535) throw ConfigError("port out of range");
      cfg.port = static_cast<int>(port);
    } else if (key == "storage_dir") {
      cfg.storage_dir = value;
    } else if (key == "max_upload_bytes") {
      auto bytes = parse_integer(key, value);
      if (bytes <= 0) throw ConfigError("max_upload_bytes must be positive");
      cfg.max_upload_bytes = static_cast<std::size_t>(bytes);
    } else if (key == "static_dir") {
      cfg.static_dir = value;
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  return cfg;
}

ServerConfig load_server_config(const std::string& path) { return parse_server_config(read_text_file(path)); }

}  // namespace bdl::server
