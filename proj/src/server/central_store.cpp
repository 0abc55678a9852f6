#include "bdl/server/central_store.hpp"

#include <algorithm>
#include <fstream>

#include "bdl/core/batch_codec.hpp"
#include "bdl/core/error.hpp"
#include "bdl/core/json.hpp"
#include "bdl/core/validate.hpp"

namespace bdl::server {

using nlohmann::json;

namespace {

std::string error_key(const ErrorLogEntry& e) { return encode_error_row(e); }

void write_all(std::FILE* f, const std::string& data, const std::string& what) {
  if (std::fwrite(data.data(), 1, data.size(), f) != data.size() || std::fflush(f) != 0) {
    throw StorageError("write failed: " + what);
  }
}

}  // namespace

CentralStore::CentralStore(const Clock& clock) : clock_(clock) {}

CentralStore::CentralStore(const Clock& clock, std::filesystem::path directory)
    : clock_(clock), dir_(std::move(directory)) {
  std::filesystem::create_directories(*dir_);
  load();
}

CentralStore::~CentralStore() {
  for (auto& [id, p] : partitions_) {
    if (p->journal != nullptr) std::fclose(p->journal);
  }
}

// ---------------------------------------------------------------- persistence

void CentralStore::persist_registry_locked() const {
  if (!dir_) return;
  json nodes = json::array();
  for (const auto& id : registration_order_) nodes.push_back(registry_.at(id));
  json doc{{"next_index", next_index_}, {"nodes", std::move(nodes)}};
  auto tmp = *dir_ / "registry.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << doc.dump(2) << '\n';
    out.flush();
    if (!out) throw StorageError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, *dir_ / "registry.json");
}

void CentralStore::open_partition_locked(const std::string& node_id) {
  auto& slot = partitions_[node_id];
  if (slot) return;
  slot = std::make_unique<Partition>();
  if (!dir_) return;

  auto path = *dir_ / (node_id + ".journal");
  if (std::ifstream in{path, std::ios::binary}) {
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<Record> block_records;
    std::vector<ErrorLogEntry> block_errors;
    std::size_t pos = 0;
    std::size_t committed_end = 0;
    while (pos < content.size()) {
      auto nl = content.find('\n', pos);
      if (nl == std::string::npos) break;
      try {
        auto j = json::parse(std::string_view(content).substr(pos, nl - pos));
        if (j.contains("r")) {
          block_records.push_back(j.at("r").get<Record>());
        } else if (j.contains("e")) {
          block_errors.push_back(j.at("e").get<ErrorLogEntry>());
        } else if (j.contains("commit")) {
          for (auto& r : block_records) slot->records.try_emplace(r.id.timestamp, std::move(r));
          for (auto& e : block_errors) {
            if (slot->error_keys.insert(error_key(e)).second) slot->errors.push_back(std::move(e));
          }
          block_records.clear();
          block_errors.clear();
          committed_end = nl + 1;
        }
      } catch (const json::exception&) {
        break;  // torn tail of an uncommitted block
      } catch (const ValidationError&) {
        break;
      }
      pos = nl + 1;
    }
    if (committed_end != content.size()) std::filesystem::resize_file(path, committed_end);
  }
  slot->journal = std::fopen(path.c_str(), "ab");
  if (slot->journal == nullptr) throw StorageError("cannot open " + path.string());
}

void CentralStore::load() {
  auto path = *dir_ / "registry.json";
  std::ifstream in(path, std::ios::binary);
  if (!in) return;
  json doc;
  try {
    in >> doc;
    next_index_ = doc.at("next_index").get<std::size_t>();
    for (const auto& j : doc.at("nodes")) {
      auto n = j.get<NodeDescriptor>();
      registration_order_.push_back(n.node_id);
      registry_.emplace(n.node_id, std::move(n));
    }
  } catch (const std::exception& e) {
    throw StorageError("corrupt registry " + path.string() + ": " + e.what());
  }
  for (const auto& id : registration_order_) open_partition_locked(id);
}

// ------------------------------------------------------------------- registry

NodeDescriptor& CentralStore::node_ref(const std::string& node_id) {
  auto it = registry_.find(node_id);
  if (it == registry_.end()) throw NotFoundError("unknown node '" + node_id + "'");
  return it->second;
}

NodeDescriptor CentralStore::register_node(std::string label, std::chrono::seconds record_interval) {
  if (label.find_first_of("\n\r") != std::string::npos) throw ValidationError("label contains a newline");
  if (record_interval <= std::chrono::seconds{0}) throw ValidationError("record interval must be positive");
  std::unique_lock lock(registry_mu_);
  while (registry_.contains("rpi_" + std::to_string(next_index_))) ++next_index_;
  NodeDescriptor n;
  n.node_id = "rpi_" + std::to_string(next_index_++);
  n.label = std::move(label);
  n.record_interval = record_interval;
  n.created_at = clock_.now();
  registry_.emplace(n.node_id, n);
  registration_order_.push_back(n.node_id);
  open_partition_locked(n.node_id);
  persist_registry_locked();
  return n;
}

NodeDescriptor CentralStore::ensure_node_locked(const std::string& node_id) {
  if (auto it = registry_.find(node_id); it != registry_.end()) return it->second;
  NodeDescriptor n;
  n.node_id = node_id;
  n.created_at = clock_.now();
  registry_.emplace(node_id, n);
  registration_order_.push_back(node_id);
  open_partition_locked(node_id);
  persist_registry_locked();
  return n;
}

NodeDescriptor CentralStore::ensure_node(const std::string& node_id) {
  check_node_id(node_id);
  {
    std::shared_lock lock(registry_mu_);
    if (auto it = registry_.find(node_id); it != registry_.end()) return it->second;
  }
  std::unique_lock lock(registry_mu_);
  return ensure_node_locked(node_id);
}

NodeDescriptor CentralStore::add_sensor(const std::string& node_id, SensorSpec spec) {
  check_sensor_spec(spec);
  spec.active = true;
  if (spec.sensor_id.empty()) spec.sensor_id = spec.name;
  std::unique_lock lock(registry_mu_);
  auto& n = node_ref(node_id);
  auto it = std::find_if(n.sensors.begin(), n.sensors.end(), [&](const SensorSpec& s) { return s.name == spec.name; });
  if (it != n.sensors.end()) {
    if (it->active) throw ValidationError("sensor '" + spec.name + "' already exists on " + node_id);
    *it = spec;
  } else {
    n.sensors.push_back(spec);
  }
  n.updated = true;
  persist_registry_locked();
  return n;
}

NodeDescriptor CentralStore::remove_sensor(const std::string& node_id, const std::string& sensor_name) {
  std::unique_lock lock(registry_mu_);
  auto& n = node_ref(node_id);
  auto it = std::find_if(n.sensors.begin(), n.sensors.end(),
                         [&](const SensorSpec& s) { return s.name == sensor_name && s.active; });
  if (it == n.sensors.end()) throw NotFoundError("no active sensor '" + sensor_name + "' on " + node_id);
  it->active = false;
  n.updated = true;
  persist_registry_locked();
  return n;
}

NodeDescriptor CentralStore::deactivate_node(const std::string& node_id) {
  std::unique_lock lock(registry_mu_);
  auto& n = node_ref(node_id);
  n.active = false;
  persist_registry_locked();
  return n;
}

ConfigFetch CentralStore::fetch_config(const std::string& node_id) {
  std::unique_lock lock(registry_mu_);
  auto& n = node_ref(node_id);
  ConfigFetch out{n, n.updated};
  if (n.updated) {
    n.updated = false;
    out.node.updated = false;
    persist_registry_locked();
  }
  return out;
}

std::vector<NodeDescriptor> CentralStore::nodes() const {
  std::shared_lock lock(registry_mu_);
  std::vector<NodeDescriptor> out;
  out.reserve(registration_order_.size());
  for (const auto& id : registration_order_) out.push_back(registry_.at(id));
  return out;
}

std::optional<NodeDescriptor> CentralStore::node(const std::string& node_id) const {
  std::shared_lock lock(registry_mu_);
  auto it = registry_.find(node_id);
  if (it == registry_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------- data

CentralStore::Partition& CentralStore::partition(const std::string& node_id) const {
  std::shared_lock lock(registry_mu_);
  auto it = partitions_.find(node_id);
  if (it == partitions_.end()) throw NotFoundError("unknown node '" + node_id + "'");
  return *it->second;
}

std::optional<RecordId> CentralStore::checkpoint(const std::string& node_id) {
  ensure_node(node_id);
  auto& p = partition(node_id);
  std::shared_lock lock(p.mu);
  if (p.records.empty()) return std::nullopt;
  return p.records.rbegin()->second.id;
}

IngestReport CentralStore::ingest(std::string_view batch_csv) {
  auto batch = decode_batch(batch_csv);
  IngestReport report;
  if (batch.node_id.empty()) return report;
  auto node = this->node(batch.node_id);
  if (!node) throw NotFoundError("unknown node '" + batch.node_id + "'");

  std::vector<const Record*> accepted;
  for (std::size_t i = 0; i < batch.records.size(); ++i) {
    const auto& r = batch.records[i];
    std::optional<std::string> why;
    for (const auto& [name, value] : r.readings) {
      const SensorSpec* spec = node->find_sensor(name);
      if (spec == nullptr) {
        why = "unknown sensor '" + name + "' for " + node->node_id;
      } else if (value) {
        why = check_reading(*spec, *value);
      }
      if (why) break;
    }
    if (why) {
      report.rejected.push_back({i + 2, *why});  // line 1 is the header
    } else {
      accepted.push_back(&r);
    }
  }

  auto& p = partition(batch.node_id);
  std::unique_lock lock(p.mu);
  std::vector<const Record*> fresh;
  for (const Record* r : accepted) {
    if (p.records.contains(r->id.timestamp)) {
      ++report.duplicates;
    } else {
      fresh.push_back(r);
    }
  }
  std::vector<const ErrorLogEntry*> fresh_errors;
  std::set<std::string> seen;
  for (const auto& e : batch.errors) {
    auto key = error_key(e);
    if (!p.error_keys.contains(key) && seen.insert(key).second) fresh_errors.push_back(&e);
  }

  if (p.journal != nullptr && (!fresh.empty() || !fresh_errors.empty())) {
    std::string block;
    for (const Record* r : fresh) block += json{{"r", *r}}.dump() + '\n';
    for (const ErrorLogEntry* e : fresh_errors) block += json{{"e", *e}}.dump() + '\n';
    block += json{{"commit", fresh.size() + fresh_errors.size()}}.dump() + '\n';
    write_all(p.journal, block, batch.node_id + " journal");
  }
  for (const Record* r : fresh) p.records.emplace(r->id.timestamp, *r);
  for (const ErrorLogEntry* e : fresh_errors) {
    p.error_keys.insert(error_key(*e));
    p.errors.push_back(*e);
  }
  report.inserted = fresh.size();
  report.errors_logged = fresh_errors.size();
  return report;
}

std::vector<Record> CentralStore::records(const std::string& node_id, std::optional<Timestamp> from,
                                          std::optional<Timestamp> to) const {
  auto& p = partition(node_id);
  std::shared_lock lock(p.mu);
  auto it = from ? p.records.lower_bound(*from) : p.records.begin();
  std::vector<Record> out;
  for (; it != p.records.end(); ++it) {
    if (to && it->first >= *to) break;
    out.push_back(it->second);
  }
  return out;
}

std::vector<ErrorLogEntry> CentralStore::errors(const std::string& node_id, std::optional<Timestamp> from,
                                                std::optional<Timestamp> to) const {
  auto& p = partition(node_id);
  std::vector<ErrorLogEntry> out;
  {
    std::shared_lock lock(p.mu);
    for (const auto& e : p.errors) {
      if ((!from || e.timestamp >= *from) && (!to || e.timestamp < *to)) out.push_back(e);
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ErrorLogEntry& a, const ErrorLogEntry& b) { return a.timestamp < b.timestamp; });
  return out;
}

std::size_t CentralStore::partition_size(const std::string& node_id) const {
  auto& p = partition(node_id);
  std::shared_lock lock(p.mu);
  return p.records.size();
}

std::vector<SensorSpec> CentralStore::select_sensors(const NodeDescriptor& node,
                                                     const std::vector<std::string>& names) const {
  if (names.empty()) return node.sensors;
  std::vector<SensorSpec> out;
  for (const auto& name : names) {
    const SensorSpec* s = node.find_sensor(name);
    if (s == nullptr) throw ValidationError("unknown sensor '" + name + "' for " + node.node_id);
    if (std::any_of(out.begin(), out.end(), [&](const SensorSpec& o) { return o.name == name; })) {
      throw ValidationError("sensor '" + name + "' selected twice");
    }
    out.push_back(*s);
  }
  return out;
}

std::vector<BucketStats> CentralStore::query_resampled(const ResampleQuery& q) const {
  auto node = this->node(q.node_id);
  if (!node) throw NotFoundError("unknown node '" + q.node_id + "'");
  if (q.interval < node->record_interval) {
    throw ValidationError("viewing interval " + std::to_string(q.interval.count()) +
                          " s is finer than the node's record interval of " +
                          std::to_string(node->record_interval.count()) +
                          " s; it must be equal to or greater than the record interval");
  }
  auto sensors = select_sensors(*node, q.sensors);
  if (!(q.from < q.to)) throw ValidationError("query range must satisfy from < to");
  auto rows = records(q.node_id, q.from, q.to);
  return resample(rows, sensors, q.from, q.to, q.interval);
}

std::string CentralStore::export_csv(const std::string& node_id, const std::vector<std::string>& sensors,
                                     Timestamp from, Timestamp to) const {
  auto node = this->node(node_id);
  if (!node) throw NotFoundError("unknown node '" + node_id + "'");
  BatchFile b;
  b.node_id = node_id;
  for (const auto& s : select_sensors(*node, sensors)) b.columns.push_back(s.name);
  for (auto& r : records(node_id, from, to)) {
    Record row{std::move(r.id), {}};
    for (const auto& c : b.columns) {
      auto it = r.readings.find(c);
      row.readings.emplace(c, it == r.readings.end() ? std::nullopt : it->second);
    }
    b.records.push_back(std::move(row));
  }
  return encode_batch(b);
}

std::string CentralStore::export_errors(const std::string& node_id, Timestamp from, Timestamp to) const {
  if (!node(node_id)) throw NotFoundError("unknown node '" + node_id + "'");
  return encode_error_log(errors(node_id, from, to));
}

}  // namespace bdl::server
