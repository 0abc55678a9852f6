#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bdl/core/model.hpp"
#include "bdl/node/driver.hpp"

namespace bdl::node {

struct CycleResult {
  Record record;
  std::vector<ErrorLogEntry> errors;
};

/// Reads every active driver once and merges the values into one record
/// stamped `now`. A driver that throws, or returns a value outside its
/// kind, yields an absent reading and a sensor_fault entry; the cycle
/// itself never fails. Throws ValidationError only when no driver is active.
CycleResult sample_cycle(const std::string& node_id, std::span<const std::unique_ptr<SensorDriver>> drivers,
                         Timestamp now);

}  // namespace bdl::node
