#pragma once

#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bdl/node/local_store.hpp"
#include "bdl/sync/batcher.hpp"
#include "bdl/sync/transport.hpp"

namespace bdl::sync {

enum class SyncStatus {
  completed,  // every batch acknowledged (possibly zero batches)
  skipped,    // too soon after the previous attempt, or one already in flight
  failed,     // stopped at `failure_stage`; acknowledged batches stay acknowledged
};

enum class SyncStage { none, checkpoint, config, upload };

struct SyncOutcome {
  SyncStatus status = SyncStatus::skipped;
  SyncStage failure_stage = SyncStage::none;
  std::string failure;
  /// Index of the batch whose upload failed.
  std::optional<std::size_t> failed_batch;

  std::optional<RecordId> checkpoint;
  std::size_t batches_planned = 0;
  std::size_t batches_sent = 0;
  std::size_t records_sent = 0;
  std::size_t duplicates = 0;
  std::size_t rejected = 0;
  /// Records per acknowledged batch, in upload order.
  std::vector<std::size_t> batch_records;
  /// Set when the server reported a changed sensor configuration.
  std::optional<std::vector<SensorSpec>> new_config;

  bool ok() const { return status == SyncStatus::completed; }
};

/// Node side of the checkpoint handshake.
///
/// Each cycle asks the server for its checkpoint, reconciles the sensor
/// registry, cuts the delta after the checkpoint into capped batches and
/// uploads them in order. Any failure ends the cycle; there is no retry
/// until `sync_interval` has elapsed on the caller's clock. Because the
/// next cycle starts from the server's checkpoint again, a cycle that died
/// mid-sequence resumes exactly where the server's data ends.
class SyncClient {
 public:
  SyncClient(std::string node_id, SyncPolicy policy, node::LocalStore& store, SyncTransport& transport);

  /// Runs one cycle at `now`. Records stamped after `now` are left for the
  /// next cycle. `local_sensors` are pushed to the registry when the server
  /// does not know them yet. Throws ConfigError when a record cannot fit the
  /// file cap; transport problems are reported in the outcome, not thrown.
  SyncOutcome sync_cycle(Timestamp now, std::span<const SensorSpec> local_sensors = {});

  const SyncPolicy& policy() const { return policy_; }
  std::optional<Timestamp> last_attempt() const;

 private:
  std::string node_id_;
  SyncPolicy policy_;
  node::LocalStore& store_;
  SyncTransport& transport_;

  std::mutex in_flight_;
  mutable std::mutex attempt_mu_;
  std::optional<Timestamp> last_attempt_;
};

}  // namespace bdl::sync
