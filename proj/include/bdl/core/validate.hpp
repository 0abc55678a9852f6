#pragma once

#include <optional>
#include <string>

#include "bdl/core/model.hpp"

namespace bdl {

/// Checks one value against the sensor's value kind. Returns the reason on
/// violation.
std::optional<std::string> check_reading(const SensorSpec& spec, double value);

/// Accepts iff the record belongs to `node`, its reading keys equal the
/// node's active sensor names and every present value fits its kind.
/// Returns the first violation found.
std::optional<std::string> validate_record(const Record& record, const NodeDescriptor& node);

}  // namespace bdl
