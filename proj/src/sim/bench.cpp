#include "bdl/sim/bench.hpp"

#include <httplib.h>

#include <cmath>
#include <memory>
#include <thread>

#include "bdl/core/batch_codec.hpp"
#include "bdl/core/error.hpp"
#include "bdl/core/json.hpp"
#include "bdl/node/sampler.hpp"
#include "bdl/server/http_api.hpp"
#include "bdl/sim/drivers.hpp"
#include "bdl/sync/http_transport.hpp"

namespace bdl::sim {

using namespace std::chrono;

namespace {

/// In-process server for runs without a target URL.
struct LocalServer {
  LocalServer() : store(clock) {
    server::ServerConfig cfg;
    cfg.port = 0;
    api = std::make_unique<server::ApiServer>(store, cfg);
    port = api->bind();
    thread = std::thread([this] { api->serve(); });
    api->wait_until_ready();
  }
  ~LocalServer() {
    api->stop();
    thread.join();
  }

  SystemClock clock;
  server::CentralStore store;
  std::unique_ptr<server::ApiServer> api;
  int port = 0;
  std::thread thread;
};

struct BenchNode {
  std::string id;
  std::vector<std::unique_ptr<node::SensorDriver>> drivers;
  Timestamp next;
};

std::string register_node(httplib::Client& client, const std::string& label) {
  auto res = client.Post("/api/nodes", nlohmann::json{{"label", label}}.dump(), "application/json");
  if (!res || res->status != 201) throw TransportError("cannot register bench node '" + label + "'");
  return nlohmann::json::parse(res->body).at("node_id").get<std::string>();
}

}  // namespace

bool BenchReport::sustains(double rpm, double minutes) const {
  return static_cast<double>(accepted) >= std::ceil(rpm * minutes) && rejected == 0 && transport_errors == 0 &&
         achieved_rpm >= rpm;
}

BenchReport run_bench_ingest(const BenchConfig& cfg, const std::function<void(const std::string&)>& progress) {
  if (!(cfg.rpm > 0) || !(cfg.minutes > 0) || cfg.nodes == 0 || cfg.records_per_request == 0) {
    throw ConfigError("bench needs positive rpm, minutes, nodes and records per request");
  }
  std::unique_ptr<LocalServer> local;
  std::string url;
  if (cfg.server_url) {
    url = *cfg.server_url;
  } else {
    local = std::make_unique<LocalServer>();
    url = "http://127.0.0.1:" + std::to_string(local->port);
  }

  httplib::Client admin(url);
  admin.set_connection_timeout(cfg.timeout);
  admin.set_read_timeout(cfg.timeout);
  admin.set_write_timeout(cfg.timeout);
  admin.set_keep_alive(true);
  sync::HttpTransport transport(url, cfg.timeout);

  // Data starts at the top of the current UTC hour minus the bench span, so
  // runs against a persistent server rarely collide with earlier data.
  const auto specs = profile_sensors(cfg.profile);
  const auto total = static_cast<std::size_t>(std::ceil(cfg.rpm * cfg.minutes));
  const auto hours_needed = static_cast<long>((total + cfg.nodes - 1) / cfg.nodes);
  const auto first_hour = floor<hours>(floor<seconds>(system_clock::now())) - hours{hours_needed};

  std::vector<BenchNode> nodes;
  for (std::size_t i = 0; i < cfg.nodes; ++i) {
    BenchNode n;
    n.id = register_node(admin, "bench/node" + std::to_string(i + 1));
    for (const auto& s : specs) transport.add_sensor(n.id, s);
    n.drivers = simulated_drivers(specs, cfg.seed + i, first_hour);
    n.next = first_hour;
    nodes.push_back(std::move(n));
  }
  if (progress) progress("registered " + std::to_string(nodes.size()) + " nodes at " + url);

  auto next_file = [&](BenchNode& n) {
    BatchFile b;
    b.node_id = n.id;
    for (const auto& s : specs) b.columns.push_back(s.name);
    for (std::size_t k = 0; k < cfg.records_per_request; ++k) {
      n.next += minutes{1};
      b.records.push_back(node::sample_cycle(n.id, n.drivers, n.next).record);
    }
    return encode_batch(b);
  };

  BenchReport report;
  double latency_sum = 0;
  const auto spacing = duration<double>(60.0 / cfg.rpm);
  const auto start = steady_clock::now();
  for (std::size_t i = 0; i < total; ++i) {
    auto body = next_file(nodes[i % nodes.size()]);
    if (cfg.paced) std::this_thread::sleep_until(start + duration_cast<steady_clock::duration>(spacing * static_cast<double>(i)));
    auto sent = steady_clock::now();
    ++report.requests;
    auto res = admin.Post("/api/ingest", body, "text/csv");
    if (!res) {
      ++report.transport_errors;
    } else if (res->status != 200) {
      ++report.rejected;
    } else {
      auto r = nlohmann::json::parse(res->body).get<IngestReport>();
      if (r.rejected.empty() && r.inserted == cfg.records_per_request) {
        ++report.accepted;
      } else {
        ++report.rejected;
      }
      report.records_inserted += r.inserted;
    }
    auto latency = duration<double, std::milli>(steady_clock::now() - sent).count();
    latency_sum += latency;
    report.max_latency_ms = std::max(report.max_latency_ms, latency);
    if (progress && (i + 1) % 50 == 0) progress(std::to_string(i + 1) + "/" + std::to_string(total) + " uploads");
  }
  report.elapsed_s = duration<double>(steady_clock::now() - start).count();
  report.achieved_rpm = static_cast<double>(report.accepted) / (report.elapsed_s / 60.0);
  report.mean_latency_ms = latency_sum / static_cast<double>(report.requests);
  return report;
}

nlohmann::json to_json(const BenchReport& r) {
  return {{"requests", r.requests},
          {"accepted", r.accepted},
          {"rejected", r.rejected},
          {"transport_errors", r.transport_errors},
          {"records_inserted", r.records_inserted},
          {"elapsed_s", r.elapsed_s},
          {"achieved_rpm", r.achieved_rpm},
          {"mean_latency_ms", r.mean_latency_ms},
          {"max_latency_ms", r.max_latency_ms}};
}

}  // namespace bdl::sim
