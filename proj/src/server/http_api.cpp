#include "bdl/server/http_api.hpp"

#include <httplib.h>

#include <sstream>

#include "bdl/core/error.hpp"
#include "bdl/core/json.hpp"

namespace bdl::server {

using nlohmann::json;

namespace {

void reply_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message,
                 std::optional<std::size_t> line = std::nullopt) {
  json body{{"error", message}};
  if (line) body["line"] = *line;
  reply_json(res, body, status);
}

/// Runs a handler and maps domain exceptions onto HTTP statuses.
template <class F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const CodecError& e) {
      reply_error(res, 400, e.reason(), e.line());
    } catch (const NotFoundError& e) {
      reply_error(res, 404, e.what());
    } catch (const ValidationError& e) {
      reply_error(res, 400, e.what());
    } catch (const StorageError& e) {
      reply_error(res, 500, e.what());
    } catch (const json::exception& e) {
      reply_error(res, 400, std::string("bad JSON: ") + e.what());
    }
  };
}

std::string required_param(const httplib::Request& req, const std::string& name) {
  if (!req.has_param(name)) throw ValidationError("missing query parameter '" + name + "'");
  return req.get_param_value(name);
}

std::vector<std::string> sensor_list(const httplib::Request& req) {
  std::vector<std::string> out;
  if (!req.has_param("sensors")) return out;
  auto text = req.get_param_value("sensors");
  if (text.empty() || text == "all") return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Timestamp time_param(const httplib::Request& req, const std::string& name) {
  return parse_timestamp(required_param(req, name));
}

std::string trim_body(const std::string& body) {
  auto b = body.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = body.find_last_not_of(" \t\r\n");
  return body.substr(b, e - b + 1);
}

json bucket_json(const BucketStats& b) {
  json sensors = json::object();
  for (const auto& [name, stats] : b.sensors) {
    if (!stats) {
      sensors[name] = nullptr;
      continue;
    }
    sensors[name] = {{"aggregate", stats->aggregate},
                     {"min", stats->min},
                     {"max", stats->max},
                     {"mean", stats->mean},
                     {"count", stats->count}};
  }
  return {{"bucket_start", format_timestamp(b.bucket_start)}, {"sensors", std::move(sensors)}};
}

void attach_csv(httplib::Response& res, std::string body, const std::string& filename) {
  res.set_header("Content-Disposition", "attachment; filename=\"" + filename + "\"");
  res.set_content(std::move(body), "text/csv");
}

SensorSpec custom(std::string name, ValueKind kind, std::string unit) {
  SensorSpec s;
  s.name = s.sensor_id = std::move(name);
  s.interface_type = InterfaceType::custom_code;
  s.value_kind = kind;
  s.unit = std::move(unit);
  return s;
}

}  // namespace

std::vector<SensorSpec> supported_sensors() {
  return {
      custom("temperature", ValueKind::continuous, "degC"),   // DHT11
      custom("humidity", ValueKind::continuous, "%"),         // DHT11
      custom("pressure", ValueKind::continuous, "hPa"),       // Enviro bundle
      custom("proximity", ValueKind::continuous, "raw"),      // Enviro bundle
      custom("lux", ValueKind::continuous, "lx"),             // Enviro bundle
      custom("gas_oxidising", ValueKind::continuous, "kOhm"), // Enviro Plus
      custom("gas_reducing", ValueKind::continuous, "kOhm"),  // Enviro Plus
      custom("gas_nh3", ValueKind::continuous, "kOhm"),       // Enviro Plus
  };
}

ApiServer::ApiServer(CentralStore& store, ServerConfig config)
    : store_(store), config_(std::move(config)), http_(std::make_unique<httplib::Server>()) {
  http_->set_payload_max_length(config_.max_upload_bytes);
  if (config_.static_dir && !http_->set_mount_point("/", *config_.static_dir)) {
    throw ConfigError("static_dir '" + *config_.static_dir + "' is not a directory");
  }
  install_routes();
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind() {
  int port = config_.port;
  if (port == 0) {
    port = http_->bind_to_any_port(config_.listen_address);
  } else if (!http_->bind_to_port(config_.listen_address, port)) {
    port = -1;
  }
  if (port < 0) throw ConfigError("cannot bind " + config_.listen_address + ":" + std::to_string(config_.port));
  return port;
}

void ApiServer::serve() { http_->listen_after_bind(); }

void ApiServer::stop() {
  if (http_) http_->stop();
}

void ApiServer::wait_until_ready() const { http_->wait_until_ready(); }

void ApiServer::install_routes() {
  auto& s = *http_;

  s.Post("/api/checkpoint", guarded([this](const httplib::Request& req, httplib::Response& res) {
           auto id = store_.checkpoint(trim_body(req.body));
           res.set_content(id ? id->str() : std::string{}, "text/plain");
         }));

  s.Post("/api/ingest", guarded([this](const httplib::Request& req, httplib::Response& res) {
           std::string body = req.body;
           if (req.is_multipart_form_data()) {
             if (!req.has_file("file")) throw ValidationError("multipart upload without a 'file' field");
             body = req.get_file_value("file").content;
           }
           reply_json(res, store_.ingest(body));
         }));

  s.Get("/api/nodes", guarded([this](const httplib::Request&, httplib::Response& res) {
          reply_json(res, store_.nodes());
        }));

  s.Post("/api/nodes", guarded([this](const httplib::Request& req, httplib::Response& res) {
           auto body = req.body.empty() ? json::object() : json::parse(req.body);
           auto interval = std::chrono::seconds{body.value("record_interval_s", 60)};
           reply_json(res, store_.register_node(body.value("label", std::string{}), interval), 201);
         }));

  s.Get("/api/nodes/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
          auto n = store_.node(req.path_params.at("id"));
          if (!n) throw NotFoundError("unknown node '" + req.path_params.at("id") + "'");
          reply_json(res, *n);
        }));

  s.Delete("/api/nodes/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
             reply_json(res, store_.deactivate_node(req.path_params.at("id")));
           }));

  s.Post("/api/nodes/:id/sensors", guarded([this](const httplib::Request& req, httplib::Response& res) {
           auto spec = json::parse(req.body).get<SensorSpec>();
           reply_json(res, store_.add_sensor(req.path_params.at("id"), spec), 201);
         }));

  s.Delete("/api/nodes/:id/sensors/:name", guarded([this](const httplib::Request& req, httplib::Response& res) {
             reply_json(res, store_.remove_sensor(req.path_params.at("id"), req.path_params.at("name")));
           }));

  s.Get("/api/nodes/:id/config", guarded([this](const httplib::Request& req, httplib::Response& res) {
          auto fetched = store_.fetch_config(req.path_params.at("id"));
          reply_json(res, {{"node_id", fetched.node.node_id},
                           {"sensors", fetched.node.sensors},
                           {"updated", fetched.was_updated},
                           {"record_interval_s", fetched.node.record_interval.count()}});
        }));

  s.Get("/api/sensors/supported", guarded([](const httplib::Request&, httplib::Response& res) {
          reply_json(res, supported_sensors());
        }));

  s.Get("/api/data", guarded([this](const httplib::Request& req, httplib::Response& res) {
          ResampleQuery q;
          q.node_id = required_param(req, "node");
          q.sensors = sensor_list(req);
          q.from = time_param(req, "from");
          q.to = time_param(req, "to");
          auto interval = required_param(req, "interval");
          try {
            q.interval = std::chrono::seconds{std::stoll(interval)};
          } catch (const std::exception&) {
            throw ValidationError("interval must be a number of seconds");
          }
          json out = json::array();
          for (const auto& b : store_.query_resampled(q)) out.push_back(bucket_json(b));
          reply_json(res, out);
        }));

  s.Get("/api/export/data", guarded([this](const httplib::Request& req, httplib::Response& res) {
          auto node = required_param(req, "node");
          auto from = time_param(req, "from");
          auto to = time_param(req, "to");
          attach_csv(res, store_.export_csv(node, sensor_list(req), from, to), node + "_data.csv");
        }));

  s.Get("/api/export/errors", guarded([this](const httplib::Request& req, httplib::Response& res) {
          auto node = required_param(req, "node");
          auto from = time_param(req, "from");
          auto to = time_param(req, "to");
          attach_csv(res, store_.export_errors(node, from, to), node + "_errors.csv");
        }));
}

}  // namespace bdl::server
