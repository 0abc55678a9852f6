#include "bdl/node/adc.hpp"

#include <algorithm>
#include <cmath>

#include "bdl/core/error.hpp"

namespace bdl::node {

int adc_quantize(double voltage, double vref) {
  if (!(vref > 0.0) || !std::isfinite(vref)) throw ValidationError("ADC reference voltage must be positive");
  if (!(voltage >= 0.0) || std::isnan(voltage)) throw ValidationError("ADC input voltage must be non-negative");
  double code = std::floor(voltage / vref * kAdcMaxCode);
  return static_cast<int>(std::clamp(code, 0.0, static_cast<double>(kAdcMaxCode)));
}

}  // namespace bdl::node
