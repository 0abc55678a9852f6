#include "bdl/core/model.hpp"

#include <algorithm>

#include "bdl/core/error.hpp"

namespace bdl {

std::string_view to_string(InterfaceType t) {
  switch (t) {
    case InterfaceType::direct_input: return "type1";
    case InterfaceType::event_feedback: return "type2";
    case InterfaceType::custom_code: return "type3";
  }
  return "?";
}

std::string_view to_string(ValueKind k) {
  switch (k) {
    case ValueKind::continuous: return "continuous";
    case ValueKind::event_count: return "event_count";
    case ValueKind::binary: return "binary";
  }
  return "?";
}

InterfaceType parse_interface_type(std::string_view text) {
  if (text == "type1" || text == "1") return InterfaceType::direct_input;
  if (text == "type2" || text == "2") return InterfaceType::event_feedback;
  if (text == "type3" || text == "3") return InterfaceType::custom_code;
  throw ValidationError("unknown interface type '" + std::string(text) + "'");
}

ValueKind parse_value_kind(std::string_view text) {
  if (text == "continuous") return ValueKind::continuous;
  if (text == "event_count") return ValueKind::event_count;
  if (text == "binary") return ValueKind::binary;
  throw ValidationError("unknown value kind '" + std::string(text) + "'");
}

std::string_view to_string(ErrorCategory c) {
  return c == ErrorCategory::sensor_fault ? "sensor_fault" : "transport_fault";
}

ErrorCategory parse_error_category(std::string_view text) {
  if (text == "sensor_fault") return ErrorCategory::sensor_fault;
  if (text == "transport_fault") return ErrorCategory::transport_fault;
  throw ValidationError("unknown error category '" + std::string(text) + "'");
}

void check_sensor_spec(const SensorSpec& spec) {
  if (spec.name.empty()) throw ValidationError("sensor name is empty");
  if (spec.name == "id" || spec.name == "node_id" || spec.name == "timestamp") {
    throw ValidationError("sensor name '" + spec.name + "' is reserved");
  }
  for (char c : spec.name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '_' || c == '-' || c == '.';
    if (!ok) throw ValidationError("sensor name '" + spec.name + "' contains an invalid character");
  }
  if (spec.on_adc()) {
    if (spec.channel < 0 || spec.channel >= kAdcChannels) {
      throw ValidationError("sensor '" + spec.name + "': ADC channel " + std::to_string(spec.channel) +
                            " outside 0.." + std::to_string(kAdcChannels - 1));
    }
  } else if (spec.channel < 0 || spec.channel > kMaxGpioPin) {
    throw ValidationError("sensor '" + spec.name + "': GPIO pin " + std::to_string(spec.channel) +
                          " outside 0.." + std::to_string(kMaxGpioPin));
  }
  for (const std::string* field : {&spec.unit, &spec.sensor_id}) {
    if (field->find_first_of(",\n\r") != std::string::npos) {
      throw ValidationError("sensor '" + spec.name + "': field contains a reserved character");
    }
  }
}

const SensorSpec* NodeDescriptor::find_sensor(std::string_view name) const {
  auto it = std::find_if(sensors.begin(), sensors.end(), [&](const SensorSpec& s) { return s.name == name; });
  return it == sensors.end() ? nullptr : &*it;
}

std::vector<std::string> NodeDescriptor::active_sensor_names() const {
  std::vector<std::string> out;
  for (const auto& s : sensors) {
    if (s.active) out.push_back(s.name);
  }
  return out;
}

std::vector<std::string> NodeDescriptor::sensor_names() const {
  std::vector<std::string> out;
  out.reserve(sensors.size());
  for (const auto& s : sensors) out.push_back(s.name);
  return out;
}

std::string sanitize_field(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

ErrorLogEntry sensor_fault(std::string node_id, Timestamp ts, std::string sensor, std::string_view message) {
  return ErrorLogEntry{std::move(node_id), ts, ErrorCategory::sensor_fault, std::move(sensor),
                       sanitize_field(message)};
}

ErrorLogEntry transport_fault(std::string node_id, Timestamp ts, std::string_view message) {
  return ErrorLogEntry{std::move(node_id), ts, ErrorCategory::transport_fault, std::nullopt,
                       sanitize_field(message)};
}

}  // namespace bdl
