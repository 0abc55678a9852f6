#include "bdl/sync/sync_client.hpp"

#include <algorithm>

#include "bdl/core/batch_codec.hpp"
#include "bdl/core/error.hpp"

namespace bdl::sync {

SyncClient::SyncClient(std::string node_id, SyncPolicy policy, node::LocalStore& store, SyncTransport& transport)
    : node_id_(std::move(node_id)), policy_(policy), store_(store), transport_(transport) {
  check_node_id(node_id_);
  if (policy_.sync_interval <= std::chrono::seconds{0}) throw ConfigError("sync interval must be positive");
  if (policy_.max_file_bytes == 0) throw ConfigError("file cap must be positive");
}

std::optional<Timestamp> SyncClient::last_attempt() const {
  std::lock_guard lock(attempt_mu_);
  return last_attempt_;
}

SyncOutcome SyncClient::sync_cycle(Timestamp now, std::span<const SensorSpec> local_sensors) {
  SyncOutcome out;
  std::unique_lock busy(in_flight_, std::try_to_lock);
  if (!busy.owns_lock()) return out;
  {
    std::lock_guard lock(attempt_mu_);
    if (last_attempt_ && now < *last_attempt_ + policy_.sync_interval) return out;
    last_attempt_ = now;
  }

  auto fail = [&](SyncStage stage, const std::string& what) {
    out.status = SyncStatus::failed;
    out.failure_stage = stage;
    out.failure = what;
    store_.log_error(transport_fault(node_id_, now, what));
    return out;
  };

  try {
    out.checkpoint = transport_.checkpoint(node_id_);
  } catch (const TransportError& e) {
    return fail(SyncStage::checkpoint, std::string("checkpoint: ") + e.what());
  }
  if (out.checkpoint && out.checkpoint->node_id != node_id_) {
    return fail(SyncStage::checkpoint, "checkpoint names another node: " + out.checkpoint->str());
  }

  try {
    auto remote = transport_.fetch_config(node_id_);
    for (const auto& spec : local_sensors) {
      bool known = std::any_of(remote.sensors.begin(), remote.sensors.end(),
                               [&](const SensorSpec& s) { return s.name == spec.name; });
      if (!known && spec.active) transport_.add_sensor(node_id_, spec);
    }
    if (remote.updated) out.new_config = std::move(remote.sensors);
  } catch (const TransportError& e) {
    return fail(SyncStage::config, std::string("config: ") + e.what());
  }

  // The server is authoritative: anything at or before its checkpoint is
  // already stored there, whatever the local cursor says.
  if (out.checkpoint) store_.mark_synced(*out.checkpoint);

  auto pending = store_.pending_after(out.checkpoint, now);
  auto errors = store_.pending_errors();
  std::vector<std::string> order;
  for (const auto& s : local_sensors) order.push_back(s.name);
  auto batches = build_batches(node_id_, pending, errors, policy_, order);
  out.batches_planned = batches.size();

  for (std::size_t i = 0; i < batches.size(); ++i) {
    const auto& batch = batches[i];
    IngestReport report;
    try {
      report = transport_.upload(encode_batch(batch));
    } catch (const TransportError& e) {
      out.failed_batch = i;
      return fail(SyncStage::upload, "upload of batch " + std::to_string(i + 1) + "/" +
                                         std::to_string(batches.size()) + ": " + e.what());
    }
    store_.mark_synced(batch.records.back().id);
    store_.mark_errors_synced(batch.errors.size());
    ++out.batches_sent;
    out.records_sent += batch.records.size();
    out.duplicates += report.duplicates;
    out.rejected += report.rejected.size();
    out.batch_records.push_back(batch.records.size());
  }
  out.status = SyncStatus::completed;
  return out;
}

}  // namespace bdl::sync
