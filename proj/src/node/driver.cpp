#include "bdl/node/driver.hpp"

#include "bdl/node/adc.hpp"
#include "bdl/node/beat.hpp"

namespace bdl::node {

double EventCountingDriver::read(Timestamp now) {
  EventTime from = window_start_;
  EventTime to = now;
  if (!(from < to)) return 0;
  window_start_ = now;
  auto events = poll_events(from, to);
  return static_cast<double>(beat_accumulate(events, from, to));
}

double AnalogDriver::read(Timestamp now) {
  double v = voltage(now);
  if (v < 0) throw SensorFault("negative voltage on ADC channel " + std::to_string(spec().channel));
  return adc_quantize(v, vref_);
}

}  // namespace bdl::node
