#include "bdl/node/daemon.hpp"

#include <algorithm>

#include "bdl/core/error.hpp"
#include "bdl/node/sampler.hpp"

namespace bdl::node {

NodeDaemon::NodeDaemon(std::string node_id, SamplingConfig sampling, std::vector<std::unique_ptr<SensorDriver>> drivers,
                       LocalStore& store, sync::SyncClient& sync, DriverFactory factory)
    : node_id_(std::move(node_id)),
      sampling_(sampling),
      drivers_(std::move(drivers)),
      store_(store),
      sync_(sync),
      factory_(std::move(factory)) {
  check_node_id(node_id_);
  if (sampling_.record_interval < kMinRecordInterval) {
    throw ConfigError("record interval must be at least " + std::to_string(kMinRecordInterval.count()) + " s");
  }
  std::vector<std::string> names;
  for (const auto& d : drivers_) {
    check_sensor_spec(d->spec());
    names.push_back(d->spec().name);
  }
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
    throw ConfigError("sensor names must be unique within a node");
  }
}

NodeDaemon::~NodeDaemon() = default;

void NodeDaemon::sample(Timestamp now) {
  CycleResult cycle;
  {
    std::lock_guard lock(drivers_mu_);
    cycle = sample_cycle(node_id_, drivers_, now);
  }
  ++stats_.ticks;
  stats_.sensor_faults += cycle.errors.size();
  unstored_.push_back(std::move(cycle.record));
  try {
    for (const auto& e : cycle.errors) store_.log_error(e);
    for (const auto& r : unstored_) {
      if (store_.insert(r)) ++stats_.records_stored;
    }
    unstored_.clear();
  } catch (const StorageError&) {
    ++stats_.storage_failures;
  }
}

sync::SyncOutcome NodeDaemon::sync(Timestamp now) {
  auto before = store_.last_synced();
  sync::SyncOutcome outcome;
  try {
    outcome = sync_.sync_cycle(now, sensor_specs());
  } catch (const ConfigError& e) {
    // Oversized record: nothing can be sent until the cap is raised.
    outcome.status = sync::SyncStatus::failed;
    outcome.failure_stage = sync::SyncStage::upload;
    outcome.failure = e.what();
    store_.log_error(transport_fault(node_id_, now, e.what()));
  }
  if (outcome.status != sync::SyncStatus::skipped) ++stats_.sync_attempts;
  if (outcome.ok()) {
    ++stats_.sync_successes;
    if (store_.last_synced() != before) ++stats_.sync_advances;
  }
  if (outcome.new_config) apply_config(*outcome.new_config);
  return outcome;
}

std::vector<SensorSpec> NodeDaemon::sensor_specs() const {
  std::lock_guard lock(drivers_mu_);
  std::vector<SensorSpec> out;
  out.reserve(drivers_.size());
  for (const auto& d : drivers_) out.push_back(d->spec());
  return out;
}

void NodeDaemon::apply_config(const std::vector<SensorSpec>& remote) {
  std::lock_guard lock(drivers_mu_);
  for (auto& d : drivers_) {
    auto it = std::find_if(remote.begin(), remote.end(), [&](const SensorSpec& s) { return s.name == d->spec().name; });
    d->set_active(it != remote.end() && it->active);
  }
  if (!factory_) return;
  for (const auto& spec : remote) {
    if (!spec.active) continue;
    bool have = std::any_of(drivers_.begin(), drivers_.end(),
                            [&](const std::unique_ptr<SensorDriver>& d) { return d->spec().name == spec.name; });
    if (have) continue;
    if (auto driver = factory_(spec)) drivers_.push_back(std::move(driver));
  }
}

void NodeDaemon::collect_sync(std::future<sync::SyncOutcome>& inflight) {
  if (!inflight.valid()) return;
  inflight.get();
}

void NodeDaemon::run(Clock& clock, std::stop_token stop, SyncMode mode) {
  const auto start = clock.now();
  const auto sync_interval = sync_.policy().sync_interval;
  auto next_sample = start + sampling_.record_interval;
  auto next_sync = start + sync_interval;
  std::future<sync::SyncOutcome> inflight;

  while (!stop.stop_requested()) {
    auto deadline = std::min(next_sample, next_sync);
    if (!clock.sleep_until(deadline, stop)) break;
    if (deadline == next_sample) {
      sample(next_sample);
      next_sample += sampling_.record_interval;
    }
    if (deadline == next_sync && mode == SyncMode::inline_) {
      sync(next_sync);
      next_sync += sync_interval;
    } else if (deadline == next_sync) {
      bool idle = !inflight.valid() || inflight.wait_for(std::chrono::seconds{0}) == std::future_status::ready;
      if (idle) {
        collect_sync(inflight);
        inflight = std::async(std::launch::async, [this, at = next_sync] { return sync(at); });
      }
      next_sync += sync_interval;
    }
  }
  collect_sync(inflight);
}

}  // namespace bdl::node
