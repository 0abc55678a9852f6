#pragma once

namespace bdl::node {

inline constexpr int kAdcMaxCode = 1023;

/// 10-bit conversion as done by an MCP3008: floor(voltage / vref * 1023),
/// clamped to [0, 1023]. Throws ValidationError for negative voltage or a
/// non-positive reference.
int adc_quantize(double voltage, double vref);

}  // namespace bdl::node
