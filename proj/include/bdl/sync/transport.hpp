#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bdl/core/model.hpp"

namespace bdl::sync {

/// Sensor list as held by the server's registry.
struct RemoteConfig {
  std::vector<SensorSpec> sensors;
  /// The node's `updated` flag as it was before this fetch cleared it.
  bool updated = false;
};

/// Node-to-server calls used by the sync protocol. Every method throws
/// TransportError when the server cannot be reached or answers with a
/// failure; the caller treats that as a transport_fault.
class SyncTransport {
 public:
  virtual ~SyncTransport() = default;

  /// Latest RecordId the server holds for the node, absent when none.
  virtual std::optional<RecordId> checkpoint(const std::string& node_id) = 0;
  /// Uploads one encoded batch file.
  virtual IngestReport upload(const std::string& batch_csv) = 0;
  /// Fetches the node's configuration and clears its `updated` flag.
  virtual RemoteConfig fetch_config(const std::string& node_id) = 0;
  /// Registers a sensor the node has locally but the server does not know.
  virtual void add_sensor(const std::string& node_id, const SensorSpec& spec) = 0;
};

}  // namespace bdl::sync
