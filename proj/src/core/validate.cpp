#include "bdl/core/validate.hpp"

#include <cmath>

namespace bdl {

std::optional<std::string> check_reading(const SensorSpec& spec, double value) {
  if (!std::isfinite(value)) return "sensor '" + spec.name + "': non-finite value";
  switch (spec.value_kind) {
    case ValueKind::continuous:
      break;
    case ValueKind::binary:
      if (value != 0.0 && value != 1.0) {
        return "sensor '" + spec.name + "': binary reading must be 0 or 1";
      }
      break;
    case ValueKind::event_count:
      if (value < 0.0 || std::floor(value) != value) {
        return "sensor '" + spec.name + "': event count must be a non-negative integer";
      }
      break;
  }
  return std::nullopt;
}

std::optional<std::string> validate_record(const Record& record, const NodeDescriptor& node) {
  if (record.id.node_id != node.node_id) {
    return "record belongs to node '" + record.id.node_id + "', not '" + node.node_id + "'";
  }
  for (const auto& [name, value] : record.readings) {
    const SensorSpec* spec = node.find_sensor(name);
    if (spec == nullptr || !spec->active) return "unknown sensor '" + name + "'";
    if (value) {
      if (auto why = check_reading(*spec, *value)) return why;
    }
  }
  for (const auto& spec : node.sensors) {
    if (spec.active && !record.readings.contains(spec.name)) {
      return "missing reading for sensor '" + spec.name + "'";
    }
  }
  return std::nullopt;
}

}  // namespace bdl
