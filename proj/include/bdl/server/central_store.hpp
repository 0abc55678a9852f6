#pragma once

#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "bdl/core/model.hpp"
#include "bdl/core/time.hpp"
#include "bdl/server/resample.hpp"

namespace bdl::server {

/// Result of a configuration fetch: the descriptor and whether it was
/// flagged `updated` before the fetch cleared the flag.
struct ConfigFetch {
  NodeDescriptor node;
  bool was_updated = false;
};

/// The central database: node registry, one record partition per node, and
/// the error log.
///
/// RecordId is the primary key everywhere, so ingesting the same rows again
/// only counts duplicates. Registry mutations take a global exclusive lock;
/// each partition has its own reader/writer lock, so uploads from different
/// nodes proceed in parallel and queries see whole ingests only.
///
/// With a storage directory, the registry lives in `registry.json`
/// (replaced atomically) and each partition in `<node_id>.journal`, where an
/// ingest is one block of record lines closed by a commit line. Blocks
/// without a commit line are dropped on open.
class CentralStore {
 public:
  /// Volatile store; `clock` stamps registrations.
  explicit CentralStore(const Clock& clock);
  CentralStore(const Clock& clock, std::filesystem::path directory);
  ~CentralStore();

  CentralStore(const CentralStore&) = delete;
  CentralStore& operator=(const CentralStore&) = delete;

  // Registry.

  /// Creates node `rpi_<n>` with the next free number and an empty sensor list.
  NodeDescriptor register_node(std::string label, std::chrono::seconds record_interval = std::chrono::seconds{60});
  /// Registers `node_id` with no sensors unless it already exists.
  NodeDescriptor ensure_node(const std::string& node_id);
  /// Adds a sensor, or reactivates a removed one of the same name with the
  /// new spec, and sets the node's `updated` flag.
  NodeDescriptor add_sensor(const std::string& node_id, SensorSpec spec);
  /// Marks the sensor inactive (history is kept) and sets `updated`.
  NodeDescriptor remove_sensor(const std::string& node_id, const std::string& sensor_name);
  /// Soft removal: the node is flagged inactive, its partition is kept.
  NodeDescriptor deactivate_node(const std::string& node_id);
  ConfigFetch fetch_config(const std::string& node_id);
  std::vector<NodeDescriptor> nodes() const;
  std::optional<NodeDescriptor> node(const std::string& node_id) const;

  // Sync protocol.

  /// Newest RecordId in the node's partition. Unknown nodes are registered
  /// on the spot and get an absent answer.
  std::optional<RecordId> checkpoint(const std::string& node_id);

  /// Stores one uploaded batch file. Undecodable files throw CodecError and
  /// change nothing; a file for an unknown node throws NotFoundError. Rows
  /// that fail validation are reported, the rest are committed together.
  IngestReport ingest(std::string_view batch_csv);

  // Queries.

  /// Partition content in [from, to), ascending; whole partition when the
  /// range is absent.
  std::vector<Record> records(const std::string& node_id, std::optional<Timestamp> from = std::nullopt,
                              std::optional<Timestamp> to = std::nullopt) const;
  std::vector<ErrorLogEntry> errors(const std::string& node_id, std::optional<Timestamp> from = std::nullopt,
                                    std::optional<Timestamp> to = std::nullopt) const;
  std::size_t partition_size(const std::string& node_id) const;

  /// Rejects buckets finer than the node's record interval.
  std::vector<BucketStats> query_resampled(const ResampleQuery& query) const;

  /// Batch-format CSV of the selected sensors (all when empty) in [from, to).
  std::string export_csv(const std::string& node_id, const std::vector<std::string>& sensors, Timestamp from,
                         Timestamp to) const;
  /// `node_id,timestamp,category,sensor,message` CSV in [from, to).
  std::string export_errors(const std::string& node_id, Timestamp from, Timestamp to) const;

 private:
  struct Partition {
    mutable std::shared_mutex mu;
    std::map<Timestamp, Record> records;
    std::vector<ErrorLogEntry> errors;
    std::set<std::string> error_keys;
    std::FILE* journal = nullptr;
  };

  Partition& partition(const std::string& node_id) const;
  std::vector<SensorSpec> select_sensors(const NodeDescriptor& node, const std::vector<std::string>& names) const;
  NodeDescriptor& node_ref(const std::string& node_id);
  NodeDescriptor ensure_node_locked(const std::string& node_id);
  void open_partition_locked(const std::string& node_id);
  void persist_registry_locked() const;
  void load();

  const Clock& clock_;
  std::optional<std::filesystem::path> dir_;

  mutable std::shared_mutex registry_mu_;
  std::map<std::string, NodeDescriptor> registry_;
  std::vector<std::string> registration_order_;
  std::size_t next_index_ = 1;
  std::map<std::string, std::unique_ptr<Partition>> partitions_;
};

}  // namespace bdl::server
