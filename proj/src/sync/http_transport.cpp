#include "bdl/sync/http_transport.hpp"

#include <httplib.h>

#include "bdl/core/error.hpp"
#include "bdl/core/json.hpp"

namespace bdl::sync {

using nlohmann::json;

namespace {

std::string expect_ok(const httplib::Result& result, const std::string& what) {
  if (!result) throw TransportError(what + ": " + httplib::to_string(result.error()));
  if (result->status < 200 || result->status >= 300) {
    std::string detail = result->body;
    try {
      detail = json::parse(result->body).at("error").get<std::string>();
    } catch (const std::exception&) {
    }
    throw TransportError(what + ": HTTP " + std::to_string(result->status) + " " + detail);
  }
  return result->body;
}

template <class F>
auto parse_or_throw(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw TransportError(what + ": malformed response: " + e.what());
  }
}

}  // namespace

HttpTransport::HttpTransport(const std::string& server_url, std::chrono::milliseconds timeout)
    : client_(std::make_unique<httplib::Client>(server_url)) {
  if (!client_->is_valid()) throw ConfigError("invalid server url '" + server_url + "'");
  client_->set_connection_timeout(timeout);
  client_->set_read_timeout(timeout);
  client_->set_write_timeout(timeout);
  client_->set_keep_alive(true);
}

HttpTransport::~HttpTransport() = default;

std::optional<RecordId> HttpTransport::checkpoint(const std::string& node_id) {
  auto body = expect_ok(client_->Post("/api/checkpoint", node_id, "text/plain"), "checkpoint");
  if (body.empty()) return std::nullopt;
  return parse_or_throw("checkpoint", [&] { return parse_record_id(body); });
}

IngestReport HttpTransport::upload(const std::string& batch_csv) {
  auto body = expect_ok(client_->Post("/api/ingest", batch_csv, "text/csv"), "ingest");
  return parse_or_throw("ingest", [&] { return json::parse(body).get<IngestReport>(); });
}

RemoteConfig HttpTransport::fetch_config(const std::string& node_id) {
  auto body = expect_ok(client_->Get("/api/nodes/" + node_id + "/config"), "config");
  return parse_or_throw("config", [&] {
    auto j = json::parse(body);
    return RemoteConfig{j.at("sensors").get<std::vector<SensorSpec>>(), j.at("updated").get<bool>()};
  });
}

void HttpTransport::add_sensor(const std::string& node_id, const SensorSpec& spec) {
  expect_ok(client_->Post("/api/nodes/" + node_id + "/sensors", json(spec).dump(), "application/json"),
            "add sensor");
}

}  // namespace bdl::sync
