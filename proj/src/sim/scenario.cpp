#include "bdl/sim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>
#include <random>
#include <sstream>
#include <thread>

#include "bdl/core/error.hpp"
#include "bdl/core/kv_config.hpp"
#include "bdl/node/daemon.hpp"
#include "bdl/server/central_store.hpp"
#include "bdl/server/direct_transport.hpp"
#include "bdl/sim/drivers.hpp"
#include "bdl/sim/network.hpp"

namespace bdl::sim {

using namespace std::chrono;

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t tag, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), tag,
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  return rng();
}

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

FaultWindow parse_fault(const std::string& value) {
  std::istringstream in(value);
  std::string nodes, from, to, extra;
  if (!(in >> nodes >> from >> to) || (in >> extra)) {
    throw ConfigError("fault: expected '<nodes> <from> <to>', got '" + value + "'");
  }
  FaultWindow w;
  if (nodes != "*") {
    for (auto& item : split(nodes, ',')) {
      if (item.rfind("rpi_", 0) == 0) item = item.substr(4);
      auto n = parse_integer("fault", item);
      if (n < 1) throw ConfigError("fault: node numbers start at 1");
      w.nodes.push_back(static_cast<std::size_t>(n));
    }
  }
  w.from = parse_duration(from);
  w.to = parse_duration(to);
  return w;
}

/// Upstream wrapper that tallies what the server reports as duplicates,
/// including deliveries whose response never reached the node.
class CountingTransport : public sync::SyncTransport {
 public:
  explicit CountingTransport(sync::SyncTransport& inner) : inner_(inner) {}
  std::optional<RecordId> checkpoint(const std::string& node_id) override { return inner_.checkpoint(node_id); }
  IngestReport upload(const std::string& batch_csv) override {
    auto r = inner_.upload(batch_csv);
    duplicates += r.duplicates;
    return r;
  }
  sync::RemoteConfig fetch_config(const std::string& node_id) override { return inner_.fetch_config(node_id); }
  void add_sensor(const std::string& node_id, const SensorSpec& spec) override { inner_.add_sensor(node_id, spec); }

  std::size_t duplicates = 0;

 private:
  sync::SyncTransport& inner_;
};

struct NodeSim {
  NodeSim(std::string id) : store(id) {}

  node::LocalStore store;
  std::unique_ptr<sync::SyncClient> client;
  std::unique_ptr<node::NodeDaemon> daemon;
  Timestamp origin;
  NodeReport report;
};

enum class Phase { sample = 0, sync = 1 };

struct Event {
  Timestamp at;
  Phase phase;
  std::size_t node;

  bool operator>(const Event& o) const { return std::tie(at, phase, node) > std::tie(o.at, o.phase, o.node); }
};

std::size_t hour_count(seconds duration) { return static_cast<std::size_t>(ceil<hours>(duration).count()); }

}  // namespace

seconds parse_duration(const std::string& text) {
  auto t = trim(text);
  if (t.empty()) throw ConfigError("empty duration");
  long long unit = 1;
  switch (t.back()) {
    case 's': unit = 1; t.pop_back(); break;
    case 'm': unit = 60; t.pop_back(); break;
    case 'h': unit = 3600; t.pop_back(); break;
    case 'd': unit = 86400; t.pop_back(); break;
    default: break;
  }
  return seconds{parse_integer("duration", t) * unit};
}

void validate_scenario(const ScenarioConfig& cfg) {
  if (cfg.node_count == 0) throw ConfigError("node_count must be at least 1");
  if (cfg.houses == 0 || cfg.houses > cfg.node_count) throw ConfigError("houses must be between 1 and node_count");
  if (cfg.profiles.empty()) throw ConfigError("at least one profile is required");
  for (const auto& p : cfg.profiles) profile_sensors(p);
  if (cfg.duration <= seconds{0}) throw ConfigError("duration must be positive");
  if (cfg.record_interval < node::kMinRecordInterval) throw ConfigError("record_interval below the 2 s minimum");
  if (cfg.sync_interval < cfg.record_interval) throw ConfigError("sync_interval must not be shorter than record_interval");
  if (cfg.max_file_bytes == 0) throw ConfigError("max_file_bytes must be positive");
  if (!(cfg.time_compression >= 0) || !std::isfinite(cfg.time_compression)) {
    throw ConfigError("time_compression must be a finite, non-negative ratio");
  }
  for (double p : {cfg.disconnect_fraction, cfg.ack_loss, cfg.redelivery, cfg.sensor_fault_rate}) {
    if (!(p >= 0 && p < 1)) throw ConfigError("probabilities and fractions must lie in [0, 1)");
  }
  for (const auto& w : cfg.faults) {
    if (w.from < seconds{0} || !(w.from < w.to) || w.to > cfg.duration) {
      throw ConfigError("fault windows must satisfy 0 <= from < to <= duration");
    }
    for (auto n : w.nodes) {
      if (n < 1 || n > cfg.node_count) throw ConfigError("fault window names node " + std::to_string(n) + " out of range");
    }
  }
}

ScenarioConfig parse_scenario(const std::string& text) {
  ScenarioConfig cfg;
  for (const auto& [key, value] : parse_key_values(text)) {
    if (key == "node_count") {
      cfg.node_count = static_cast<std::size_t>(parse_integer(key, value));
    } else if (key == "houses") {
      cfg.houses = static_cast<std::size_t>(parse_integer(key, value));
    } else if (key == "profiles" || key == "profile") {
      cfg.profiles = split(value, ',');
    } else if (key == "duration") {
      cfg.duration = parse_duration(value);
    } else if (key == "record_interval") {
      cfg.record_interval = parse_duration(value);
    } else if (key == "sync_interval") {
      cfg.sync_interval = parse_duration(value);
    } else if (key == "max_file_bytes") {
      cfg.max_file_bytes = static_cast<std::size_t>(parse_integer(key, value));
    } else if (key == "time_compression") {
      cfg.time_compression = parse_real(key, value);
    } else if (key == "start") {
      try {
        cfg.start = parse_timestamp(value);
      } catch (const Error& e) {
        throw ConfigError(std::string("start: ") + e.what());
      }
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_integer(key, value));
    } else if (key == "disconnect_fraction") {
      cfg.disconnect_fraction = parse_real(key, value);
    } else if (key == "ack_loss") {
      cfg.ack_loss = parse_real(key, value);
    } else if (key == "redelivery") {
      cfg.redelivery = parse_real(key, value);
    } else if (key == "sensor_fault_rate") {
      cfg.sensor_fault_rate = parse_real(key, value);
    } else if (key == "stagger") {
      cfg.stagger = parse_bool(key, value);
    } else if (key == "fault") {
      cfg.faults.push_back(parse_fault(value));
    } else {
      throw ConfigError("unknown scenario key '" + key + "'");
    }
  }
  validate_scenario(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) { return parse_scenario(read_text_file(path)); }

std::vector<FaultWindow> random_outages(std::size_t node_count, seconds duration, double fraction,
                                        std::uint64_t seed) {
  const auto h = hour_count(duration);
  const auto wanted = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(node_count * h)));
  if (wanted == 0) return {};
  std::vector<std::pair<std::size_t, std::size_t>> slots;  // (node, hour)
  for (std::size_t n = 1; n <= node_count; ++n) {
    for (std::size_t hr = 0; hr + 1 < h; ++hr) slots.emplace_back(n, hr);
  }
  if (wanted > slots.size()) throw ConfigError("disconnect_fraction leaves no connected final hour");
  std::mt19937_64 rng(seed);
  std::shuffle(slots.begin(), slots.end(), rng);
  slots.resize(wanted);
  std::sort(slots.begin(), slots.end());

  std::vector<FaultWindow> out;
  for (const auto& [n, hr] : slots) {
    auto from = duration_cast<seconds>(hours{hr});
    auto to = std::min(duration, duration_cast<seconds>(hours{hr + 1}));
    if (!out.empty() && out.back().nodes.front() == n && out.back().to == from) {
      out.back().to = to;
    } else {
      out.push_back({{n}, from, to});
    }
  }
  return out;
}

Verdict consistency_oracle(const PartitionMap& local, const PartitionMap& central) {
  Verdict v;
  auto flag = [&](std::string msg) {
    v.consistent = false;
    v.violations.push_back(std::move(msg));
  };

  std::map<RecordId, int> seen_central;
  for (const auto& [node, records] : central) {
    for (const auto& r : records) {
      if (r.id.node_id != node) flag("record " + r.id.str() + " stored in partition " + node);
      if (++seen_central[r.id] == 2) flag("duplicate record " + r.id.str() + " in the central store");
    }
  }
  std::map<RecordId, int> seen_local;
  for (const auto& [node, records] : local) {
    for (const auto& r : records) {
      if (++seen_local[r.id] == 2) flag("duplicate record " + r.id.str() + " in the local store of " + node);
    }
  }

  std::map<RecordId, const Record*> central_by_id;
  for (const auto& [node, records] : central) {
    for (const auto& r : records) central_by_id.emplace(r.id, &r);
  }
  std::map<RecordId, const Record*> local_by_id;
  for (const auto& [node, records] : local) {
    for (const auto& r : records) local_by_id.emplace(r.id, &r);
  }

  for (const auto& [id, rec] : local_by_id) {
    auto it = central_by_id.find(id);
    if (it == central_by_id.end()) {
      flag("record " + id.str() + " missing from the central store");
    } else if (it->second->readings != rec->readings) {
      flag("record " + id.str() + " differs between local and central copies");
    }
  }
  for (const auto& [id, rec] : central_by_id) {
    if (!local_by_id.contains(id)) flag("record " + id.str() + " on the server was never generated by a node");
  }
  return v;
}

SimReport run_scenario(const ScenarioConfig& cfg) {
  validate_scenario(cfg);
  const auto wall_start = steady_clock::now();
  const auto hours_total = hour_count(cfg.duration);

  ManualClock clock(cfg.start);
  server::CentralStore central(clock);
  server::DirectTransport direct(central);
  CountingTransport counting(direct);
  VirtualNetwork net(clock, counting, derive_seed(cfg.seed, 1), cfg.ack_loss, cfg.redelivery);

  std::vector<FaultWindow> windows = cfg.faults;
  auto random = random_outages(cfg.node_count, cfg.duration, cfg.disconnect_fraction, derive_seed(cfg.seed, 2));
  windows.insert(windows.end(), random.begin(), random.end());

  SimOutcome out;
  out.seed = cfg.seed;
  out.hourly_records.assign(hours_total + 1, 0);

  const auto per_house = (cfg.node_count + cfg.houses - 1) / cfg.houses;
  std::mt19937_64 layout(derive_seed(cfg.seed, 3));
  sync::SyncPolicy policy;
  policy.sync_interval = cfg.sync_interval;
  policy.max_file_bytes = cfg.max_file_bytes;

  std::vector<std::unique_ptr<NodeSim>> nodes;
  for (std::size_t i = 0; i < cfg.node_count; ++i) {
    auto label = "house" + std::to_string(i / per_house + 1) + "/node" + std::to_string(i % per_house + 1);
    auto id = central.register_node(label, cfg.record_interval).node_id;
    const auto& profile = cfg.profiles[i % cfg.profiles.size()];
    auto specs = profile_sensors(profile);
    for (const auto& s : specs) central.add_sensor(id, s);

    auto sim = std::make_unique<NodeSim>(id);
    sim->report.node_id = id;
    sim->report.label = label;
    sim->report.profile = profile;
    auto offset = cfg.stagger ? seconds{std::uniform_int_distribution<long long>(0, cfg.record_interval.count() - 1)(layout)}
                              : seconds{0};
    sim->origin = cfg.start + offset;
    auto driver_seed = derive_seed(cfg.seed, 4, i);
    auto fault_rate = cfg.sensor_fault_rate;
    Timestamp origin = sim->origin;
    sim->client = std::make_unique<sync::SyncClient>(id, policy, sim->store, net.link(id));
    sim->daemon = std::make_unique<node::NodeDaemon>(
        id, node::SamplingConfig{cfg.record_interval}, simulated_drivers(specs, driver_seed, origin, fault_rate),
        sim->store, *sim->client, [=](const SensorSpec& spec) {
          return simulated_driver(spec, driver_seed, origin, fault_rate);
        });
    nodes.push_back(std::move(sim));
  }

  for (const auto& w : windows) {
    auto apply = [&](std::size_t n) {
      net.add_outage({nodes[n - 1]->report.node_id, cfg.start + w.from, cfg.start + w.to});
      out.disconnected_node_hours += duration<double, std::ratio<3600>>(w.to - w.from).count();
    };
    if (w.nodes.empty()) {
      for (std::size_t n = 1; n <= cfg.node_count; ++n) apply(n);
    } else {
      for (auto n : w.nodes) apply(n);
    }
  }

  auto account = [&](NodeSim& n, const sync::SyncOutcome& o, Timestamp at, std::size_t slot) {
    if (o.status == sync::SyncStatus::skipped) return;
    ++n.report.sync_attempts;
    if (o.status == sync::SyncStatus::failed) ++n.report.sync_failures;
    for (auto count : o.batch_records) {
      n.report.uploads.push_back({duration_cast<seconds>(at - n.origin), count});
      out.hourly_records[slot] += count;
    }
  };

  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    queue.push({nodes[i]->origin + cfg.record_interval, Phase::sample, i});
    queue.push({nodes[i]->origin + cfg.sync_interval, Phase::sync, i});
  }
  // Each node runs for `duration` from its own origin.
  while (!queue.empty()) {
    auto ev = queue.top();
    queue.pop();
    if (ev.at > nodes[ev.node]->origin + cfg.duration) continue;
    clock.set(ev.at);
    if (cfg.time_compression > 0) {
      std::this_thread::sleep_until(
          wall_start + duration_cast<steady_clock::duration>(duration<double>((ev.at - cfg.start).count() / cfg.time_compression)));
    }
    auto& n = *nodes[ev.node];
    if (ev.phase == Phase::sample) {
      n.daemon->sample(ev.at);
      queue.push({ev.at + cfg.record_interval, Phase::sample, ev.node});
    } else {
      auto slot = static_cast<std::size_t>(ceil<hours>(ev.at - n.origin).count()) - 1;
      account(n, n.daemon->sync(ev.at), ev.at, std::min(slot, hours_total - 1));
      queue.push({ev.at + cfg.sync_interval, Phase::sync, ev.node});
    }
  }

  // One final connected cycle, one sync interval after the last node stopped.
  net.heal();
  const auto final_at = cfg.start + cfg.duration + cfg.record_interval + cfg.sync_interval;
  clock.set(final_at);
  for (auto& n : nodes) {
    auto o = n->daemon->sync(final_at);
    account(*n, o, final_at, hours_total);
    if (!o.ok()) out.violations.push_back("final sync of " + n->report.node_id + " failed: " + o.failure);
  }

  PartitionMap local, stored;
  for (auto& n : nodes) {
    const auto& id = n->report.node_id;
    local[id] = n->store.records();
    stored[id] = central.records(id);
    auto last = n->store.last_synced();
    auto& r = n->report;
    r.generated = local[id].size();
    r.synced = last ? static_cast<std::size_t>(std::count_if(local[id].begin(), local[id].end(),
                                                             [&](const Record& rec) { return rec.id <= *last; }))
                    : 0;
    r.pending = r.generated - r.synced;
    r.sensor_faults = n->daemon->stats().sensor_faults;
    out.central_records += stored[id].size();
    out.nodes.push_back(r);
  }

  auto verdict = consistency_oracle(local, stored);
  out.violations.insert(out.violations.end(), verdict.violations.begin(), verdict.violations.end());
  out.consistent = out.violations.empty();
  auto link = net.stats();
  out.transfers_blocked = link.blocked;
  out.acks_lost = link.acks_lost;
  out.redelivered = link.redelivered;
  out.duplicates_observed = counting.duplicates;

  SimReport report;
  report.outcome = std::move(out);
  report.wall_seconds = duration<double>(steady_clock::now() - wall_start).count();
  report.simulated_seconds = static_cast<double>(cfg.duration.count());
  report.achieved_compression = report.simulated_seconds / std::max(report.wall_seconds, 1e-9);
  return report;
}

nlohmann::json to_json(const SimReport& report) {
  const auto& o = report.outcome;
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : o.nodes) {
    nlohmann::json uploads = nlohmann::json::array();
    for (const auto& u : n.uploads) uploads.push_back({{"at_s", u.at.count()}, {"records", u.records}});
    nodes.push_back({{"node_id", n.node_id},
                     {"label", n.label},
                     {"profile", n.profile},
                     {"generated", n.generated},
                     {"synced", n.synced},
                     {"pending", n.pending},
                     {"sensor_faults", n.sensor_faults},
                     {"sync_attempts", n.sync_attempts},
                     {"sync_failures", n.sync_failures},
                     {"uploads", uploads}});
  }
  return {{"seed", o.seed},
          {"consistent", o.consistent},
          {"violations", o.violations},
          {"central_records", o.central_records},
          {"duplicates_observed", o.duplicates_observed},
          {"disconnected_node_hours", o.disconnected_node_hours},
          {"transfers_blocked", o.transfers_blocked},
          {"acks_lost", o.acks_lost},
          {"redelivered", o.redelivered},
          {"hourly_records", o.hourly_records},
          {"nodes", nodes},
          {"wall_seconds", report.wall_seconds},
          {"simulated_seconds", report.simulated_seconds},
          {"achieved_compression", report.achieved_compression}};
}

std::string summary_text(const SimReport& report) {
  const auto& o = report.outcome;
  std::size_t generated = 0, synced = 0, pending = 0, faults = 0;
  for (const auto& n : o.nodes) {
    generated += n.generated;
    synced += n.synced;
    pending += n.pending;
    faults += n.sensor_faults;
  }
  std::ostringstream s;
  s << "seed " << o.seed << ": " << o.nodes.size() << " nodes, " << report.simulated_seconds / 3600.0
    << " h simulated in " << report.wall_seconds << " s (" << static_cast<long long>(report.achieved_compression)
    << "x)\n";
  s << "records: generated " << generated << ", synced " << synced << ", pending " << pending << ", central "
    << o.central_records << ", sensor faults " << faults << "\n";
  s << "network: " << o.disconnected_node_hours << " node-hours disconnected, " << o.transfers_blocked
    << " transfers blocked, " << o.acks_lost << " acks lost, " << o.redelivered << " redelivered, "
    << o.duplicates_observed << " duplicates absorbed\n";
  s << "records uploaded per hour:";
  for (std::size_t h = 0; h + 1 < o.hourly_records.size(); ++h) s << ' ' << o.hourly_records[h];
  s << " | final " << o.hourly_records.back() << "\n";
  s << "verdict: " << (o.consistent ? "consistent" : "INCONSISTENT") << "\n";
  for (const auto& v : o.violations) s << "  " << v << "\n";
  return s.str();
}

}  // namespace bdl::sim
