#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bdl/node/driver.hpp"

namespace bdl::sim {

/// Known node profiles: "enviro" and "prototype-v1".
std::vector<std::string> profile_names();

/// Sensor specs for a profile, in the profile's column order. Throws ConfigError.
std::vector<SensorSpec> profile_sensors(const std::string& profile);

/// Seeded stand-in for a physical sensor. The signal depends on the sensor
/// name (temperature, humidity, pressure, light, sound, ...) and falls back
/// to a generic shape for its value kind. Readings are a deterministic
/// function of the seed and the sequence of read times.
///
/// `fault_rate` is the per-read probability of a SensorFault.
std::unique_ptr<node::SensorDriver> simulated_driver(const SensorSpec& spec, std::uint64_t seed, Timestamp start,
                                                     double fault_rate = 0.0);

std::vector<std::unique_ptr<node::SensorDriver>> simulated_drivers(const std::vector<SensorSpec>& specs,
                                                                   std::uint64_t seed, Timestamp start,
                                                                   double fault_rate = 0.0);

}  // namespace bdl::sim
