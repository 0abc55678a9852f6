#include <doctest.h>
#include <httplib.h>

#include <thread>

#include "bdl/core/batch_codec.hpp"
#include "bdl/core/json.hpp"
#include "bdl/server/http_api.hpp"
#include "bdl/sync/http_transport.hpp"
#include "bdl/sync/sync_client.hpp"
#include "fakes.hpp"

using namespace bdl;
using namespace std::chrono;
using nlohmann::json;
using testing::make_spec;

namespace {

const Timestamp kT0 = sys_days{year{2021} / 8 / 1};

/// An ApiServer on an ephemeral loopback port, served from a background thread.
struct LiveServer {
  explicit LiveServer(std::size_t max_upload = 8u << 20) : store(clock) {
    server::ServerConfig cfg;
    cfg.port = 0;
    cfg.max_upload_bytes = max_upload;
    api = std::make_unique<server::ApiServer>(store, cfg);
    port = api->bind();
    thread = std::thread([this] { api->serve(); });
    api->wait_until_ready();
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
  }
  ~LiveServer() {
    api->stop();
    thread.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }

  ManualClock clock{kT0};
  server::CentralStore store;
  std::unique_ptr<server::ApiServer> api;
  int port = 0;
  std::thread thread;
  std::unique_ptr<httplib::Client> client;
};

std::string hourly_csv(const std::string& node, int first, int count) {
  BatchFile b{node, {"temperature"}, {}, {}};
  for (int i = first; i < first + count; ++i) {
    b.records.push_back({make_record_id(node, kT0 + minutes{i}), {{"temperature", 20.0 + i * 0.01}}});
  }
  return encode_batch(b);
}

}  // namespace

TEST_CASE("registry endpoints") {
  LiveServer s;
  auto res = s.client->Post("/api/nodes", R"({"label":"house1/kitchen"})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 201);
  CHECK(json::parse(res->body).at("node_id") == "rpi_1");

  auto spec = make_spec("temperature", ValueKind::continuous);
  res = s.client->Post("/api/nodes/rpi_1/sensors", json(spec).dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 201);
  CHECK(json::parse(res->body).at("updated") == true);

  res = s.client->Post("/api/nodes/rpi_1/sensors", json(spec).dump(), "application/json");
  CHECK(res->status == 400);
  res = s.client->Post("/api/nodes/rpi_9/sensors", json(spec).dump(), "application/json");
  CHECK(res->status == 404);
  res = s.client->Post("/api/nodes/rpi_1/sensors", "{not json", "application/json");
  CHECK(res->status == 400);

  res = s.client->Get("/api/nodes/rpi_1/config");
  REQUIRE(res);
  auto cfg = json::parse(res->body);
  CHECK(cfg.at("updated") == true);
  CHECK(cfg.at("sensors").size() == 1);
  CHECK(cfg.at("record_interval_s") == 60);
  CHECK(json::parse(s.client->Get("/api/nodes/rpi_1/config")->body).at("updated") == false);

  res = s.client->Delete("/api/nodes/rpi_1/sensors/temperature");
  CHECK(res->status == 200);
  CHECK(json::parse(res->body).at("sensors")[0].at("active") == false);
  CHECK(s.client->Delete("/api/nodes/rpi_1/sensors/temperature")->status == 404);

  CHECK(json::parse(s.client->Get("/api/nodes")->body).size() == 1);
  CHECK(s.client->Get("/api/nodes/rpi_1")->status == 200);
  CHECK(s.client->Get("/api/nodes/rpi_2")->status == 404);
  CHECK(json::parse(s.client->Delete("/api/nodes/rpi_1")->body).at("active") == false);

  auto supported = json::parse(s.client->Get("/api/sensors/supported")->body);
  CHECK(supported.size() >= 3);
  for (const auto& j : supported) CHECK(j.at("interface_type") == "type3");
}

TEST_CASE("checkpoint and ingest endpoints") {
  LiveServer s;
  auto id = s.store.register_node("n").node_id;
  s.store.add_sensor(id, make_spec("temperature", ValueKind::continuous));

  auto res = s.client->Post("/api/checkpoint", id, "text/plain");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body.empty());

  res = s.client->Post("/api/ingest", hourly_csv(id, 0, 60), "text/csv");
  REQUIRE(res);
  CHECK(res->status == 200);
  auto rep = json::parse(res->body).get<IngestReport>();
  CHECK(rep.inserted == 60);

  CHECK(s.client->Post("/api/checkpoint", id + "\n", "text/plain")->body == id + "|20210801T005900Z");

  SUBCASE("multipart upload") {
    httplib::MultipartFormDataItems items{{"file", hourly_csv(id, 60, 60), "hour2.csv", "text/csv"}};
    res = s.client->Post("/api/ingest", items);
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(json::parse(res->body).at("inserted") == 60);
    CHECK(s.store.partition_size(id) == 120);
  }
  SUBCASE("undecodable upload reports the line") {
    auto body = hourly_csv(id, 60, 3) + "x,y\n";
    res = s.client->Post("/api/ingest", body, "text/csv");
    CHECK(res->status == 400);
    CHECK(json::parse(res->body).at("line") == 5);
    CHECK(s.store.partition_size(id) == 60);
  }
  SUBCASE("unknown node") {
    CHECK(s.client->Post("/api/ingest", hourly_csv("rpi_50", 0, 1), "text/csv")->status == 404);
  }
}

TEST_CASE("oversized uploads are refused") {
  LiveServer s(4096);
  auto id = s.store.register_node("n").node_id;
  s.store.add_sensor(id, make_spec("temperature", ValueKind::continuous));
  auto res = s.client->Post("/api/ingest", hourly_csv(id, 0, 600), "text/csv");
  REQUIRE(res);
  CHECK(res->status == 413);
  CHECK(s.store.partition_size(id) == 0);
}

TEST_CASE("data and export endpoints") {
  LiveServer s;
  auto id = s.store.register_node("n").node_id;
  s.store.add_sensor(id, make_spec("temperature", ValueKind::continuous));
  auto csv = hourly_csv(id, 0, 120);
  auto b = decode_batch(csv);
  b.errors.push_back(sensor_fault(id, kT0 + minutes{3}, "temperature", "timeout"));
  s.store.ingest(encode_batch(b));

  auto res = s.client->Get("/api/data?node=" + id + "&sensors=temperature&from=20210801T000000Z&to=20210801T020000Z&interval=3600");
  REQUIRE(res);
  REQUIRE(res->status == 200);
  auto buckets = json::parse(res->body);
  REQUIRE(buckets.size() == 2);
  CHECK(buckets[0].at("bucket_start") == "20210801T000000Z");
  CHECK(buckets[1].at("sensors").at("temperature").at("count") == 60);

  res = s.client->Get("/api/data?node=" + id + "&from=20210801T000000Z&to=20210801T020000Z&interval=30");
  CHECK(res->status == 400);
  CHECK(json::parse(res->body).at("error").get<std::string>().find("record interval") != std::string::npos);
  CHECK(s.client->Get("/api/data?node=" + id + "&from=20210801T000000Z&to=20210801T020000Z")->status == 400);
  CHECK(s.client->Get("/api/data?node=" + id + "&from=yesterday&to=20210801T020000Z&interval=60")->status == 400);
  CHECK(s.client->Get("/api/data?node=rpi_8&from=20210801T000000Z&to=20210801T020000Z&interval=60")->status == 404);

  res = s.client->Get("/api/export/data?node=" + id + "&from=20210801T000000Z&to=20210802T000000Z");
  REQUIRE(res);
  CHECK(res->get_header_value("Content-Type") == "text/csv");
  CHECK(res->get_header_value("Content-Disposition").find("attachment") != std::string::npos);
  CHECK(decode_batch(res->body).records == b.records);

  res = s.client->Get("/api/export/errors?node=" + id + "&from=20210801T000000Z&to=20210802T000000Z");
  CHECK(decode_error_log(res->body) == b.errors);
}

TEST_CASE("sync client over HTTP") {
  LiveServer s;
  auto id = s.store.register_node("n").node_id;
  s.store.add_sensor(id, make_spec("temperature", ValueKind::continuous));

  node::LocalStore local(id);
  for (int i = 0; i < 60; ++i) {
    local.insert({make_record_id(id, kT0 + minutes{i}), {{"temperature", 21.0}}});
  }
  local.log_error(transport_fault(id, kT0 + minutes{5}, "previous outage"));

  sync::HttpTransport transport(s.url(), seconds{2});
  sync::SyncClient client(id, {}, local, transport);
  auto outcome = client.sync_cycle(kT0 + hours{1});
  CHECK(outcome.ok());
  CHECK(outcome.records_sent == 60);
  CHECK(outcome.new_config.has_value());
  CHECK(s.store.partition_size(id) == 60);
  CHECK(s.store.errors(id).size() == 1);
  CHECK(local.last_synced()->timestamp == kT0 + minutes{59});

  SUBCASE("transport errors carry the server message") {
    CHECK_THROWS_WITH_AS(transport.fetch_config("rpi_77"), doctest::Contains("rpi_77"), TransportError);
  }
  SUBCASE("unreachable server") {
    sync::HttpTransport dead("http://127.0.0.1:1", milliseconds{200});
    CHECK_THROWS_AS(dead.checkpoint(id), TransportError);
  }
}
