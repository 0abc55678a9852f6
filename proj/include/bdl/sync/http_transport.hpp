#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "bdl/sync/transport.hpp"

namespace httplib {
class Client;
}

namespace bdl::sync {

/// SyncTransport over the central server's HTTP API. Connection, read and
/// write timeouts all use `timeout`. Non-2xx answers become TransportError
/// carrying the server's error text.
class HttpTransport : public SyncTransport {
 public:
  HttpTransport(const std::string& server_url, std::chrono::milliseconds timeout);
  ~HttpTransport() override;

  std::optional<RecordId> checkpoint(const std::string& node_id) override;
  IngestReport upload(const std::string& batch_csv) override;
  RemoteConfig fetch_config(const std::string& node_id) override;
  void add_sensor(const std::string& node_id, const SensorSpec& spec) override;

 private:
  std::unique_ptr<httplib::Client> client_;
};

}  // namespace bdl::sync
