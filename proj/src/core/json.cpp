#include "bdl/core/json.hpp"

namespace bdl {

using nlohmann::json;

void to_json(json& j, const SensorSpec& s) {
  j = json{{"sensor_id", s.sensor_id},
           {"name", s.name},
           {"interface_type", to_string(s.interface_type)},
           {"value_kind", to_string(s.value_kind)},
           {"channel", s.channel},
           {"unit", s.unit},
           {"active", s.active}};
}

void from_json(const json& j, SensorSpec& s) {
  s.sensor_id = j.value("sensor_id", std::string{});
  s.name = j.at("name").get<std::string>();
  const auto& type = j.at("interface_type");
  s.interface_type = type.is_number() ? parse_interface_type(std::to_string(type.get<int>()))
                                      : parse_interface_type(type.get<std::string>());
  s.value_kind = parse_value_kind(j.at("value_kind").get<std::string>());
  s.channel = j.value("channel", 0);
  s.unit = j.value("unit", std::string{});
  s.active = j.value("active", true);
}

void to_json(json& j, const NodeDescriptor& n) {
  j = json{{"node_id", n.node_id},
           {"label", n.label},
           {"sensors", n.sensors},
           {"updated", n.updated},
           {"active", n.active},
           {"record_interval_s", n.record_interval.count()},
           {"created_at", format_timestamp(n.created_at)}};
}

void from_json(const json& j, NodeDescriptor& n) {
  n.node_id = j.at("node_id").get<std::string>();
  n.label = j.value("label", std::string{});
  n.sensors = j.value("sensors", std::vector<SensorSpec>{});
  n.updated = j.value("updated", false);
  n.active = j.value("active", true);
  n.record_interval = std::chrono::seconds{j.value("record_interval_s", 60)};
  n.created_at = j.contains("created_at") ? parse_timestamp(j.at("created_at").get<std::string>()) : Timestamp{};
}

void to_json(json& j, const Record& r) {
  json readings = json::object();
  for (const auto& [name, value] : r.readings) {
    readings[name] = value ? json(*value) : json(nullptr);
  }
  j = json{{"id", r.id.str()}, {"readings", std::move(readings)}};
}

void from_json(const json& j, Record& r) {
  r.id = parse_record_id(j.at("id").get<std::string>());
  r.readings.clear();
  for (const auto& [name, value] : j.at("readings").items()) {
    r.readings.emplace(name, value.is_null() ? std::optional<double>{} : value.get<double>());
  }
}

void to_json(json& j, const ErrorLogEntry& e) {
  j = json{{"node_id", e.node_id},
           {"timestamp", format_timestamp(e.timestamp)},
           {"category", to_string(e.category)},
           {"sensor", e.sensor_name ? json(*e.sensor_name) : json(nullptr)},
           {"message", e.message}};
}

void from_json(const json& j, ErrorLogEntry& e) {
  e.node_id = j.at("node_id").get<std::string>();
  e.timestamp = parse_timestamp(j.at("timestamp").get<std::string>());
  e.category = parse_error_category(j.at("category").get<std::string>());
  const auto& sensor = j.at("sensor");
  e.sensor_name = sensor.is_null() ? std::nullopt : std::optional<std::string>(sensor.get<std::string>());
  e.message = j.value("message", std::string{});
}

void to_json(json& j, const IngestReport& r) {
  json rejected = json::array();
  for (const auto& x : r.rejected) rejected.push_back({{"line", x.line}, {"reason", x.reason}});
  j = json{{"inserted", r.inserted},
           {"duplicates", r.duplicates},
           {"rejected", std::move(rejected)},
           {"errors_logged", r.errors_logged}};
}

void from_json(const json& j, IngestReport& r) {
  r.inserted = j.at("inserted").get<std::size_t>();
  r.duplicates = j.at("duplicates").get<std::size_t>();
  r.rejected.clear();
  for (const auto& x : j.at("rejected")) {
    r.rejected.push_back({x.at("line").get<std::size_t>(), x.at("reason").get<std::string>()});
  }
  r.errors_logged = j.value("errors_logged", std::size_t{0});
}

}  // namespace bdl
