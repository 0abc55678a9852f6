#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "bdl/core/time.hpp"
#include "bdl/sync/transport.hpp"

namespace bdl::sim {

/// A node's link is down for every transfer attempted in [start, end).
struct Outage {
  std::string node_id;
  Timestamp start;
  Timestamp end;
};

struct LinkStats {
  std::size_t transfers = 0;
  std::size_t blocked = 0;      // refused during an outage
  std::size_t acks_lost = 0;    // delivered, but the node saw a failure
  std::size_t redelivered = 0;  // upload delivered twice
};

/// Lossy, time-aware network between the simulated nodes and one upstream
/// transport. Loss is modeled per transfer: a call either reaches the
/// server or fails with TransportError.
///
/// Besides outages, each upload may independently lose its acknowledgement
/// (`ack_loss`) or be delivered a second time (`redelivery`). Both are
/// seeded per node, so a run is reproducible.
class VirtualNetwork {
 public:
  VirtualNetwork(const Clock& clock, sync::SyncTransport& upstream, std::uint64_t seed, double ack_loss = 0.0,
                 double redelivery = 0.0);
  ~VirtualNetwork();

  void add_outage(Outage o);
  /// Disables every fault, e.g. for a final quiescing cycle.
  void heal() { healed_ = true; }
  bool is_down(const std::string& node_id, Timestamp t) const;

  /// The transport a node uses. Stable for the network's lifetime.
  sync::SyncTransport& link(const std::string& node_id);

  LinkStats stats() const;

 private:
  class Link;

  const Clock& clock_;
  sync::SyncTransport& upstream_;
  std::uint64_t seed_;
  double ack_loss_;
  double redelivery_;
  bool healed_ = false;
  std::map<std::string, std::vector<Outage>> outages_;
  std::map<std::string, std::unique_ptr<Link>> links_;
};

}  // namespace bdl::sim
