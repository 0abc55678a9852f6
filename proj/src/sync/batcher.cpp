#include "bdl/sync/batcher.hpp"

#include <algorithm>

#include "bdl/core/batch_codec.hpp"
#include "bdl/core/error.hpp"

namespace bdl::sync {

namespace {

std::vector<std::string> columns_for(const Record& r, std::span<const std::string> order) {
  std::vector<std::string> cols;
  for (const auto& name : order) {
    if (r.readings.contains(name)) cols.push_back(name);
  }
  for (const auto& [name, value] : r.readings) {
    if (std::find(order.begin(), order.end(), name) == order.end()) cols.push_back(name);
  }
  return cols;
}

bool same_keys(const Record& r, const std::vector<std::string>& cols) {
  if (r.readings.size() != cols.size()) return false;
  return std::all_of(cols.begin(), cols.end(), [&](const std::string& c) { return r.readings.contains(c); });
}

}  // namespace

std::vector<BatchFile> build_batches(const std::string& node_id, std::span<const Record> pending,
                                     std::span<const ErrorLogEntry> errors, const SyncPolicy& policy,
                                     std::span<const std::string> column_order) {
  std::vector<BatchFile> out;
  if (pending.empty()) return out;

  const std::size_t cap = policy.max_file_bytes;
  const std::size_t error_section_overhead = kErrorSectionMarker.size() + 1 + kErrorHeader.size() + 1;

  BatchFile current;
  std::size_t current_bytes = 0;
  auto start_batch = [&](const Record& first) {
    current = BatchFile{};
    current.node_id = node_id;
    current.columns = columns_for(first, column_order);
    current_bytes = encode_header(current.columns).size();
  };
  auto flush = [&] {
    if (!current.records.empty()) out.push_back(std::move(current));
    current = BatchFile{};
  };

  for (const auto& r : pending) {
    if (r.id.node_id != node_id) throw ValidationError("pending record " + r.id.str() + " from another node");
    if (current.records.empty() || !same_keys(r, current.columns)) {
      flush();
      start_batch(r);
    }
    auto row = encode_row(r, current.columns).size();
    if (current_bytes + row > cap && !current.records.empty()) {
      flush();
      start_batch(r);
    }
    if (current_bytes + row > cap) {
      throw ConfigError("record " + r.id.str() + " encodes to " + std::to_string(current_bytes + row) +
                        " bytes, above the " + std::to_string(cap) + "-byte file cap");
    }
    current.records.push_back(r);
    current_bytes += row;
  }
  flush();

  // Errors fill the first batch's spare room, in order.
  auto& first = out.front();
  std::size_t first_bytes = encode_batch(first).size();
  bool section_open = false;
  for (const auto& e : errors) {
    auto need = encode_error_row(e).size() + (section_open ? 0 : error_section_overhead);
    if (first_bytes + need > cap) break;
    first.errors.push_back(e);
    first_bytes += need;
    section_open = true;
  }
  return out;
}

}  // namespace bdl::sync
