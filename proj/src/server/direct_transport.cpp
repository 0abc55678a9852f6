#include "bdl/server/direct_transport.hpp"

#include "bdl/core/error.hpp"

namespace bdl::server {

namespace {

template <class F>
auto as_transport_error(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const TransportError&) {
    throw;
  } catch (const Error& e) {
    throw TransportError(std::string("server rejected request: ") + e.what());
  }
}

}  // namespace

std::optional<RecordId> DirectTransport::checkpoint(const std::string& node_id) {
  return as_transport_error([&] { return store_.checkpoint(node_id); });
}

IngestReport DirectTransport::upload(const std::string& batch_csv) {
  return as_transport_error([&] { return store_.ingest(batch_csv); });
}

sync::RemoteConfig DirectTransport::fetch_config(const std::string& node_id) {
  return as_transport_error([&] {
    auto fetched = store_.fetch_config(node_id);
    return sync::RemoteConfig{std::move(fetched.node.sensors), fetched.was_updated};
  });
}

void DirectTransport::add_sensor(const std::string& node_id, const SensorSpec& spec) {
  as_transport_error([&] { store_.add_sensor(node_id, spec); });
}

}  // namespace bdl::server
