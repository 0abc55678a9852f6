#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "bdl/core/model.hpp"
#include "bdl/core/time.hpp"

namespace bdl::sim {

/// A disconnect window relative to the scenario start. `nodes` holds
/// 1-based node numbers (node n is registered as rpi_n); empty means all.
struct FaultWindow {
  std::vector<std::size_t> nodes;
  std::chrono::seconds from{0};
  std::chrono::seconds to{0};

  friend bool operator==(const FaultWindow&, const FaultWindow&) = default;
};

struct ScenarioConfig {
  std::size_t node_count = 1;
  std::size_t houses = 1;
  /// Assigned to nodes round-robin.
  std::vector<std::string> profiles{"enviro"};
  std::chrono::seconds duration = std::chrono::hours{3};
  std::chrono::seconds record_interval{60};
  std::chrono::seconds sync_interval = std::chrono::hours{1};
  std::size_t max_file_bytes = 2u << 20;
  /// Simulated seconds per wall-clock second; 0 runs as fast as possible.
  double time_compression = 0;
  Timestamp start = std::chrono::sys_days{std::chrono::year{2021} / 8 / 1};
  std::uint64_t seed = 1;

  std::vector<FaultWindow> faults;
  /// Share of node-hours to disconnect at random, drawn from every hour but
  /// the last. Added on top of `faults`.
  double disconnect_fraction = 0;
  double ack_loss = 0;
  double redelivery = 0;
  double sensor_fault_rate = 0;
  /// Random per-node start offset within one record interval. Every node
  /// still runs for `duration` from its own start.
  bool stagger = true;
};

/// Throws ConfigError when the scenario cannot run.
void validate_scenario(const ScenarioConfig& cfg);

/// Plain-text scenario: `key = value` lines plus any number of
/// `fault = <nodes> <from> <to>` lines, where nodes is `*` or a comma list
/// of node numbers or ids, and durations take an s/m/h/d suffix.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);

/// Parses "90", "90s", "15m", "2h", "1d".
std::chrono::seconds parse_duration(const std::string& text);

struct UploadEntry {
  std::chrono::seconds at{0};  // since the node started
  std::size_t records = 0;

  friend bool operator==(const UploadEntry&, const UploadEntry&) = default;
};

struct NodeReport {
  std::string node_id;
  std::string label;
  std::string profile;
  std::size_t generated = 0;
  std::size_t synced = 0;
  std::size_t pending = 0;
  std::size_t sensor_faults = 0;
  std::size_t sync_attempts = 0;
  std::size_t sync_failures = 0;
  /// One entry per batch file the server acknowledged or received.
  std::vector<UploadEntry> uploads;

  friend bool operator==(const NodeReport&, const NodeReport&) = default;
};

/// Everything a run decides; identical for identical configs.
struct SimOutcome {
  std::uint64_t seed = 0;
  std::vector<NodeReport> nodes;
  /// Records sent by the syncs that fell in each hour of the nodes' run,
  /// then the final quiescing cycle as the last element.
  std::vector<std::size_t> hourly_records;
  double disconnected_node_hours = 0;
  std::size_t central_records = 0;
  std::size_t duplicates_observed = 0;
  std::size_t transfers_blocked = 0;
  std::size_t acks_lost = 0;
  std::size_t redelivered = 0;
  bool consistent = false;
  std::vector<std::string> violations;

  friend bool operator==(const SimOutcome&, const SimOutcome&) = default;
};

struct SimReport {
  SimOutcome outcome;
  double wall_seconds = 0;
  double simulated_seconds = 0;
  /// Simulated seconds per wall second actually achieved.
  double achieved_compression = 0;
};

/// Per-node record sets keyed by node id.
using PartitionMap = std::map<std::string, std::vector<Record>>;

struct Verdict {
  bool consistent = true;
  std::vector<std::string> violations;
};

/// Brute-force comparison of every node's local records with its central
/// partition: same RecordIds with identical readings, no RecordId twice,
/// nothing on the server a node never generated.
Verdict consistency_oracle(const PartitionMap& local, const PartitionMap& central);

/// Random disconnect windows covering `fraction` of node-hours, hour-aligned,
/// never in the final hour. Deterministic in `seed`.
std::vector<FaultWindow> random_outages(std::size_t node_count, std::chrono::seconds duration, double fraction,
                                        std::uint64_t seed);

/// Runs the scenario on a virtual clock: an in-process central store, one
/// daemon per node on a lossy virtual network, the fault schedule, then one
/// final connected sync per node and the consistency oracle.
SimReport run_scenario(const ScenarioConfig& cfg);

nlohmann::json to_json(const SimReport& report);
std::string summary_text(const SimReport& report);

}  // namespace bdl::sim
