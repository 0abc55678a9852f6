#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bdl/server/central_store.hpp"
#include "bdl/server/server_config.hpp"

namespace httplib {
class Server;
}

namespace bdl::server {

/// Custom-code sensors the registry offers ready-made (name, kind, unit);
/// the dashboard lists these when adding a Type 3 sensor.
std::vector<SensorSpec> supported_sensors();

/// HTTP front of a CentralStore.
///
///   POST   /api/checkpoint                 body: node_id -> RecordId text, empty when none
///   POST   /api/ingest                     raw CSV or multipart field "file" -> JSON report
///   GET    /api/nodes                      registry listing
///   POST   /api/nodes                      {"label", "record_interval_s"?} -> descriptor
///   GET    /api/nodes/:id
///   DELETE /api/nodes/:id                  soft removal
///   POST   /api/nodes/:id/sensors          SensorSpec JSON
///   DELETE /api/nodes/:id/sensors/:name
///   GET    /api/nodes/:id/config           sensors + `updated` (cleared by the call)
///   GET    /api/sensors/supported
///   GET    /api/data?node&sensors&from&to&interval   JSON BucketStats array
///   GET    /api/export/data?node&sensors&from&to     CSV attachment
///   GET    /api/export/errors?node&from&to           CSV attachment
///
/// Timestamps in query strings use the ISO-8601 basic form; `interval` is in
/// seconds; `sensors` is comma-separated. Errors answer with
/// {"error": "...", "line": n?} and 400 (validation/codec), 404 (unknown
/// node or sensor), 413 (upload too large) or 500 (storage).
class ApiServer {
 public:
  ApiServer(CentralStore& store, ServerConfig config);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds the configured address and port (an ephemeral port when the
  /// configured port is 0). Returns the bound port; throws ConfigError.
  int bind();
  /// Serves until stop(). Call bind() first.
  void serve();
  void stop();
  /// Blocks until the server accepts connections.
  void wait_until_ready() const;

 private:
  void install_routes();

  CentralStore& store_;
  ServerConfig config_;
  std::unique_ptr<httplib::Server> http_;
};

}  // namespace bdl::server
