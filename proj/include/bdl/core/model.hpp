#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bdl/core/record_id.hpp"

namespace bdl {

/// Hardware integration pattern of a sensor.
enum class InterfaceType {
  direct_input = 1,    // value read on demand from a pin or ADC channel
  event_feedback = 2,  // pin signals edges; the node counts them
  custom_code = 3,     // vendor-specific acquisition code
};

/// What a reading means, and therefore how it may be aggregated.
enum class ValueKind { continuous, event_count, binary };

std::string_view to_string(InterfaceType t);
std::string_view to_string(ValueKind k);
InterfaceType parse_interface_type(std::string_view text);
ValueKind parse_value_kind(std::string_view text);

inline constexpr int kAdcChannels = 8;
inline constexpr int kMaxGpioPin = 27;

struct SensorSpec {
  std::string sensor_id;
  std::string name;
  InterfaceType interface_type = InterfaceType::direct_input;
  ValueKind value_kind = ValueKind::continuous;
  int channel = 0;
  std::string unit;
  bool active = true;

  /// Direct-input continuous sensors are analogue and sit behind the 8-channel ADC.
  bool on_adc() const {
    return interface_type == InterfaceType::direct_input && value_kind == ValueKind::continuous;
  }

  friend bool operator==(const SensorSpec&, const SensorSpec&) = default;
};

/// Throws ValidationError for names that collide with the CSV framing or
/// the fixed columns, and for channels outside the hardware range.
void check_sensor_spec(const SensorSpec& spec);

struct NodeDescriptor {
  std::string node_id;
  std::string label;
  std::vector<SensorSpec> sensors;
  bool updated = false;
  bool active = true;
  std::chrono::seconds record_interval{60};
  Timestamp created_at{};

  const SensorSpec* find_sensor(std::string_view name) const;
  std::vector<std::string> active_sensor_names() const;
  std::vector<std::string> sensor_names() const;

  friend bool operator==(const NodeDescriptor&, const NodeDescriptor&) = default;
};

/// Sensor name -> reading. An empty optional is a sensor that faulted at
/// sampling time.
using Readings = std::map<std::string, std::optional<double>>;

struct Record {
  RecordId id;
  Readings readings;

  friend bool operator==(const Record&, const Record&) = default;
};

enum class ErrorCategory { sensor_fault, transport_fault };

std::string_view to_string(ErrorCategory c);
ErrorCategory parse_error_category(std::string_view text);

struct ErrorLogEntry {
  std::string node_id;
  Timestamp timestamp{};
  ErrorCategory category = ErrorCategory::sensor_fault;
  std::optional<std::string> sensor_name;
  std::string message;

  friend bool operator==(const ErrorLogEntry&, const ErrorLogEntry&) = default;
};

ErrorLogEntry sensor_fault(std::string node_id, Timestamp ts, std::string sensor, std::string_view message);
ErrorLogEntry transport_fault(std::string node_id, Timestamp ts, std::string_view message);

/// Replaces characters that cannot appear in an unquoted CSV cell.
std::string sanitize_field(std::string_view text);

/// One upload unit. `columns` are the sensor names in registry order; every
/// record carries exactly those keys.
struct BatchFile {
  std::string node_id;
  std::vector<std::string> columns;
  std::vector<Record> records;
  std::vector<ErrorLogEntry> errors;

  friend bool operator==(const BatchFile&, const BatchFile&) = default;
};

/// Server response to one uploaded batch.
struct IngestReport {
  struct Rejection {
    std::size_t line = 0;
    std::string reason;
    friend bool operator==(const Rejection&, const Rejection&) = default;
  };
  std::size_t inserted = 0;
  std::size_t duplicates = 0;
  std::vector<Rejection> rejected;
  std::size_t errors_logged = 0;

  friend bool operator==(const IngestReport&, const IngestReport&) = default;
};

}  // namespace bdl
