#pragma once

#include <chrono>
#include <functional>
#include <future>
#include <memory>
#include <stop_token>
#include <string>
#include <vector>

#include "bdl/core/time.hpp"
#include "bdl/node/driver.hpp"
#include "bdl/node/local_store.hpp"
#include "bdl/sync/sync_client.hpp"

namespace bdl::node {

inline constexpr std::chrono::seconds kMinRecordInterval{2};

/// Where `run` executes sync cycles. `worker` is the live mode; `inline`
/// runs them on the loop thread, which keeps virtual-clock runs deterministic.
enum class SyncMode { worker, inline_ };

struct SamplingConfig {
  std::chrono::seconds record_interval{60};
};

/// Builds a driver for a sensor that the registry added at runtime. May
/// return nullptr when the node has no implementation for it.
using DriverFactory = std::function<std::unique_ptr<SensorDriver>(const SensorSpec&)>;

struct DaemonStats {
  std::size_t ticks = 0;
  std::size_t records_stored = 0;
  std::size_t sensor_faults = 0;
  std::size_t storage_failures = 0;
  std::size_t sync_attempts = 0;
  std::size_t sync_successes = 0;
  std::size_t sync_advances = 0;  // completed cycles that moved last_synced
};

/// The sensing-node service: one sample per record interval, one sync
/// attempt per sync interval, through driver faults and network outages.
///
/// `run` is the service loop. It samples on the caller's thread and hands
/// each sync to a worker so a slow transfer never delays a tick; at most one
/// sync is in flight. `sample` and `sync` are the individual steps, which a
/// discrete-event simulation calls directly.
class NodeDaemon {
 public:
  NodeDaemon(std::string node_id, SamplingConfig sampling, std::vector<std::unique_ptr<SensorDriver>> drivers,
             LocalStore& store, sync::SyncClient& sync, DriverFactory factory = {});

  NodeDaemon(const NodeDaemon&) = delete;
  NodeDaemon& operator=(const NodeDaemon&) = delete;
  ~NodeDaemon();

  /// One tick: sample every active driver, log faults, store the record.
  /// A record that cannot be stored is kept in memory and retried next tick.
  void sample(Timestamp now);

  /// One sync attempt covering records up to `now`; applies any sensor
  /// configuration change the server reports.
  sync::SyncOutcome sync(Timestamp now);

  /// Service loop. Ticks at start + k * record_interval (k >= 1) and syncs
  /// at start + k * sync_interval, sampling first when both fall due.
  /// Returns after `stop` is requested, once any in-flight sync finished.
  void run(Clock& clock, std::stop_token stop, SyncMode mode = SyncMode::worker);

  std::vector<SensorSpec> sensor_specs() const;
  const DaemonStats& stats() const { return stats_; }
  const std::string& node_id() const { return node_id_; }

 private:
  void apply_config(const std::vector<SensorSpec>& remote);
  void collect_sync(std::future<sync::SyncOutcome>& inflight);

  std::string node_id_;
  SamplingConfig sampling_;
  std::vector<std::unique_ptr<SensorDriver>> drivers_;
  LocalStore& store_;
  sync::SyncClient& sync_;
  DriverFactory factory_;
  std::vector<Record> unstored_;
  DaemonStats stats_;
  mutable std::mutex drivers_mu_;
};

}  // namespace bdl::node
