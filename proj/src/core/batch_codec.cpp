#include "bdl/core/batch_codec.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "bdl/core/error.hpp"

namespace bdl {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

/// Line cursor over the input; numbers lines from 1.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    auto nl = text_.find('\n', pos_);
    if (nl == std::string_view::npos) nl = text_.size();
    line = text_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    ++number_;
    return true;
  }

  std::size_t number() const { return number_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t number_ = 0;
};

bool has_reserved(std::string_view s) { return s.find_first_of(",\n\r") != std::string_view::npos; }

double parse_number(std::string_view cell, std::size_t line) {
  double value = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
    throw CodecError(line, "bad numeric cell '" + std::string(cell) + "'");
  }
  return value;
}

ErrorLogEntry parse_error_row(std::string_view line, std::size_t number) {
  auto fields = split_fields(line);
  if (fields.size() != 5) {
    throw CodecError(number, "error row has " + std::to_string(fields.size()) + " fields, expected 5");
  }
  ErrorLogEntry entry;
  try {
    entry.node_id = std::string(fields[0]);
    check_node_id(entry.node_id);
    entry.timestamp = parse_timestamp(fields[1]);
    entry.category = parse_error_category(fields[2]);
  } catch (const ValidationError& e) {
    throw CodecError(number, e.what());
  }
  if (!fields[3].empty()) entry.sensor_name = std::string(fields[3]);
  entry.message = std::string(fields[4]);
  if (entry.category == ErrorCategory::sensor_fault && !entry.sensor_name) {
    throw CodecError(number, "sensor_fault entry without sensor name");
  }
  if (entry.category == ErrorCategory::transport_fault && entry.sensor_name) {
    throw CodecError(number, "transport_fault entry with sensor name");
  }
  return entry;
}

void check_error_entry(const ErrorLogEntry& e) {
  check_node_id(e.node_id);
  if (has_reserved(e.message) || (e.sensor_name && has_reserved(*e.sensor_name))) {
    throw ValidationError("error log entry contains a reserved character");
  }
  if ((e.category == ErrorCategory::sensor_fault) != e.sensor_name.has_value()) {
    throw ValidationError("error log entry: sensor name must be present exactly for sensor faults");
  }
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string encode_header(std::span<const std::string> columns) {
  std::string out = "id,node_id,timestamp";
  for (const auto& c : columns) {
    out += ',';
    out += c;
  }
  out += '\n';
  return out;
}

std::string encode_row(const Record& record, std::span<const std::string> columns) {
  std::string ts = format_timestamp(record.id.timestamp);
  std::string out;
  out.reserve(64 + columns.size() * 8);
  out += record.id.node_id;
  out += '|';
  out += ts;
  out += ',';
  out += record.id.node_id;
  out += ',';
  out += ts;
  for (const auto& c : columns) {
    out += ',';
    auto it = record.readings.find(c);
    if (it != record.readings.end() && it->second) out += format_number(*it->second);
  }
  out += '\n';
  return out;
}

std::string encode_error_row(const ErrorLogEntry& e) {
  std::string out = e.node_id;
  out += ',';
  out += format_timestamp(e.timestamp);
  out += ',';
  out += to_string(e.category);
  out += ',';
  if (e.sensor_name) out += *e.sensor_name;
  out += ',';
  out += e.message;
  out += '\n';
  return out;
}

std::string encode_batch(const BatchFile& batch) {
  std::set<std::string_view> seen;
  for (const auto& c : batch.columns) {
    SensorSpec probe;
    probe.name = c;
    probe.interface_type = InterfaceType::custom_code;
    check_sensor_spec(probe);
    if (!seen.insert(c).second) throw ValidationError("duplicate column '" + c + "'");
  }
  std::string out = encode_header(batch.columns);
  const Record* prev = nullptr;
  for (const auto& r : batch.records) {
    if (r.id.node_id != batch.node_id) {
      throw ValidationError("record " + r.id.str() + " does not belong to node '" + batch.node_id + "'");
    }
    if (prev != nullptr && !(prev->id.timestamp < r.id.timestamp)) {
      throw ValidationError("records not strictly ascending at " + r.id.str());
    }
    if (r.readings.size() != batch.columns.size()) {
      throw ValidationError("record " + r.id.str() + " key set differs from batch columns");
    }
    for (const auto& [name, value] : r.readings) {
      if (!seen.contains(name)) {
        throw ValidationError("record " + r.id.str() + " has reading '" + name + "' outside batch columns");
      }
      if (value && !std::isfinite(*value)) {
        throw ValidationError("record " + r.id.str() + " has a non-finite reading");
      }
    }
    out += encode_row(r, batch.columns);
    prev = &r;
  }
  if (!batch.errors.empty()) {
    out += kErrorSectionMarker;
    out += '\n';
    out += kErrorHeader;
    out += '\n';
    for (const auto& e : batch.errors) {
      check_error_entry(e);
      if (!batch.node_id.empty() && e.node_id != batch.node_id) {
        throw ValidationError("error entry belongs to node '" + e.node_id + "'");
      }
      out += encode_error_row(e);
    }
  }
  return out;
}

BatchFile decode_batch(std::string_view text) {
  LineReader reader(text);
  std::string_view line;
  if (!reader.next(line)) throw CodecError(1, "missing header");

  auto header = split_fields(line);
  if (header.size() < 3 || header[0] != "id" || header[1] != "node_id" || header[2] != "timestamp") {
    throw CodecError(1, "header must start with 'id,node_id,timestamp'");
  }
  BatchFile batch;
  std::set<std::string_view> seen;
  for (std::size_t i = 3; i < header.size(); ++i) {
    if (header[i].empty()) throw CodecError(1, "empty column name");
    if (!seen.insert(header[i]).second) throw CodecError(1, "duplicate column '" + std::string(header[i]) + "'");
    batch.columns.emplace_back(header[i]);
  }

  bool in_errors = false;
  while (reader.next(line)) {
    const auto n = reader.number();
    if (line == kErrorSectionMarker) {
      if (!reader.next(line) || line != kErrorHeader) {
        throw CodecError(reader.number(), "error section must start with its header");
      }
      in_errors = true;
      continue;
    }
    if (in_errors) {
      auto entry = parse_error_row(line, n);
      if (batch.node_id.empty()) batch.node_id = entry.node_id;
      if (entry.node_id != batch.node_id) throw CodecError(n, "error entry for foreign node '" + entry.node_id + "'");
      batch.errors.push_back(std::move(entry));
      continue;
    }
    if (line.empty()) throw CodecError(n, "empty line");
    auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw CodecError(n, "row has " + std::to_string(fields.size()) + " fields, header has " +
                              std::to_string(header.size()));
    }
    Record r;
    try {
      r.id = parse_record_id(fields[0]);
      if (fields[1] != r.id.node_id) throw ValidationError("node_id column disagrees with id");
      if (parse_timestamp(fields[2]) != r.id.timestamp) throw ValidationError("timestamp column disagrees with id");
    } catch (const ValidationError& e) {
      throw CodecError(n, e.what());
    }
    if (batch.node_id.empty()) batch.node_id = r.id.node_id;
    if (r.id.node_id != batch.node_id) throw CodecError(n, "row for foreign node '" + r.id.node_id + "'");
    if (!batch.records.empty()) {
      const auto& prev = batch.records.back().id.timestamp;
      if (prev == r.id.timestamp) throw CodecError(n, "duplicate id " + r.id.str());
      if (prev > r.id.timestamp) throw CodecError(n, "timestamps not ascending at " + r.id.str());
    }
    for (std::size_t i = 3; i < fields.size(); ++i) {
      std::optional<double> value;
      if (!fields[i].empty()) value = parse_number(fields[i], n);
      r.readings.emplace(batch.columns[i - 3], value);
    }
    batch.records.push_back(std::move(r));
  }
  return batch;
}

std::string encode_error_log(std::span<const ErrorLogEntry> entries) {
  std::string out(kErrorHeader);
  out += '\n';
  for (const auto& e : entries) {
    check_error_entry(e);
    out += encode_error_row(e);
  }
  return out;
}

std::vector<ErrorLogEntry> decode_error_log(std::string_view text) {
  LineReader reader(text);
  std::string_view line;
  if (!reader.next(line) || line != kErrorHeader) throw CodecError(1, "missing error-log header");
  std::vector<ErrorLogEntry> out;
  while (reader.next(line)) out.push_back(parse_error_row(line, reader.number()));
  return out;
}

}  // namespace bdl
