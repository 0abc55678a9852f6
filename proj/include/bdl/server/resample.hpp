#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bdl/core/model.hpp"

namespace bdl::server {

struct ResampleQuery {
  std::string node_id;
  /// Empty selects every sensor of the node, in registry order.
  std::vector<std::string> sensors;
  Timestamp from{};
  Timestamp to{};
  std::chrono::seconds interval{3600};
};

struct SensorStats {
  /// mean for continuous, sum for event_count, max for binary sensors.
  double aggregate = 0;
  double min = 0;
  double max = 0;
  double mean = 0;
  std::size_t count = 0;

  friend bool operator==(const SensorStats&, const SensorStats&) = default;
};

struct BucketStats {
  Timestamp bucket_start{};
  /// Absent when the bucket holds no present reading for that sensor.
  std::map<std::string, std::optional<SensorStats>> sensors;

  friend bool operator==(const BucketStats&, const BucketStats&) = default;
};

/// Tiles [from, to) with buckets of `interval` (the last one may be short)
/// and aggregates the present readings of each sensor per bucket.
/// `records` must be ascending; records outside the range are ignored.
std::vector<BucketStats> resample(std::span<const Record> records, std::span<const SensorSpec> sensors,
                                  Timestamp from, Timestamp to, std::chrono::seconds interval);

}  // namespace bdl::server
