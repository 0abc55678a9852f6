#pragma once

#include "bdl/server/central_store.hpp"
#include "bdl/sync/transport.hpp"

namespace bdl::server {

/// In-process transport: the node talks to a CentralStore in the same
/// process. Uploads still travel as encoded CSV bytes. Server-side
/// rejections (unknown node, undecodable file) surface as TransportError,
/// like an HTTP error status would.
class DirectTransport : public sync::SyncTransport {
 public:
  explicit DirectTransport(CentralStore& store) : store_(store) {}

  std::optional<RecordId> checkpoint(const std::string& node_id) override;
  IngestReport upload(const std::string& batch_csv) override;
  sync::RemoteConfig fetch_config(const std::string& node_id) override;
  void add_sensor(const std::string& node_id, const SensorSpec& spec) override;

 private:
  CentralStore& store_;
};

}  // namespace bdl::server
