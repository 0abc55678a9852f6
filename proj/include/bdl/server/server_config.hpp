#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace bdl::server {

/// Server configuration file (`key = value`):
///
///   listen_address = 0.0.0.0
///   port = 8080
///   storage_dir = /var/lib/bdl
///   max_upload_bytes = 8388608
///   static_dir = /srv/bdl/ui        (optional dashboard bundle)
struct ServerConfig {
  std::string listen_address = "127.0.0.1";
  int port = 8080;
  std::optional<std::string> storage_dir;
  std::size_t max_upload_bytes = 8u << 20;
  std::optional<std::string> static_dir;
};

ServerConfig parse_server_config(std::string_view text);
ServerConfig load_server_config(const std::string& path);

}  // namespace bdl::server
