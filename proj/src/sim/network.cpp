#include "bdl/sim/network.hpp"

#include "bdl/core/error.hpp"

namespace bdl::sim {

class VirtualNetwork::Link : public sync::SyncTransport {
 public:
  Link(VirtualNetwork& net, std::string node_id, std::uint64_t seed)
      : net_(net), node_id_(std::move(node_id)), rng_(seed) {}

  std::optional<RecordId> checkpoint(const std::string& node_id) override {
    gate("checkpoint");
    return net_.upstream_.checkpoint(node_id);
  }

  IngestReport upload(const std::string& batch_csv) override {
    gate("upload");
    auto report = net_.upstream_.upload(batch_csv);
    if (!net_.healed_ && roll(net_.redelivery_)) {
      ++stats.redelivered;
      net_.upstream_.upload(batch_csv);
    }
    if (!net_.healed_ && roll(net_.ack_loss_)) {
      ++stats.acks_lost;
      throw TransportError(node_id_ + ": connection reset before the response arrived");
    }
    return report;
  }

  sync::RemoteConfig fetch_config(const std::string& node_id) override {
    gate("config");
    return net_.upstream_.fetch_config(node_id);
  }

  void add_sensor(const std::string& node_id, const SensorSpec& spec) override {
    gate("add sensor");
    net_.upstream_.add_sensor(node_id, spec);
  }

  LinkStats stats;

 private:
  void gate(const char* what) {
    ++stats.transfers;
    if (net_.is_down(node_id_, net_.clock_.now())) {
      ++stats.blocked;
      throw TransportError(std::string(what) + ": " + node_id_ + " is disconnected");
    }
  }

  bool roll(double p) { return p > 0 && std::uniform_real_distribution<double>(0, 1)(rng_) < p; }

  VirtualNetwork& net_;
  std::string node_id_;
  std::mt19937_64 rng_;
};

VirtualNetwork::VirtualNetwork(const Clock& clock, sync::SyncTransport& upstream, std::uint64_t seed, double ack_loss,
                               double redelivery)
    : clock_(clock), upstream_(upstream), seed_(seed), ack_loss_(ack_loss), redelivery_(redelivery) {}

VirtualNetwork::~VirtualNetwork() = default;

void VirtualNetwork::add_outage(Outage o) {
  if (!(o.start < o.end)) throw ConfigError("outage for " + o.node_id + " must end after it starts");
  outages_[o.node_id].push_back(std::move(o));
}

bool VirtualNetwork::is_down(const std::string& node_id, Timestamp t) const {
  if (healed_) return false;
  auto it = outages_.find(node_id);
  if (it == outages_.end()) return false;
  for (const auto& o : it->second) {
    if (o.start <= t && t < o.end) return true;
  }
  return false;
}

sync::SyncTransport& VirtualNetwork::link(const std::string& node_id) {
  auto& slot = links_[node_id];
  if (!slot) {
    std::vector<std::uint32_t> material{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    for (unsigned char c : node_id) material.push_back(c);
    std::seed_seq seq(material.begin(), material.end());
    std::mt19937_64 mix(seq);
    slot = std::make_unique<Link>(*this, node_id, mix());
  }
  return *slot;
}

LinkStats VirtualNetwork::stats() const {
  LinkStats total;
  for (const auto& [id, link] : links_) {
    total.transfers += link->stats.transfers;
    total.blocked += link->stats.blocked;
    total.acks_lost += link->stats.acks_lost;
    total.redelivered += link->stats.redelivered;
  }
  return total;
}

}  // namespace bdl::sim
