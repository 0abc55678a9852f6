#pragma once

#include <optional>
#include <vector>

#include "bdl/core/error.hpp"
#include "bdl/core/model.hpp"

namespace bdl::node {

/// Raised by a driver when the hardware could not be read. The sampling
/// cycle turns it into an absent reading plus a sensor_fault log entry.
class SensorFault : public Error {
 public:
  using Error::Error;
};

/// One sensor as seen by the sampling loop.
///
/// Direct-input and custom-code drivers return an instantaneous value.
/// Event-feedback drivers derive from EventCountingDriver and return the
/// number of edges since the previous read.
class SensorDriver {
 public:
  explicit SensorDriver(SensorSpec spec) : spec_(std::move(spec)) {}
  virtual ~SensorDriver() = default;

  SensorDriver(const SensorDriver&) = delete;
  SensorDriver& operator=(const SensorDriver&) = delete;

  const SensorSpec& spec() const { return spec_; }
  bool active() const { return spec_.active; }
  void set_active(bool active) { spec_.active = active; }

  /// Value for the cycle ending at `now`. Throws SensorFault.
  virtual double read(Timestamp now) = 0;

 private:
  SensorSpec spec_;
};

/// Beat counter over a pin's edge stream.
class EventCountingDriver : public SensorDriver {
 public:
  EventCountingDriver(SensorSpec spec, Timestamp counting_since)
      : SensorDriver(std::move(spec)), window_start_(counting_since) {}

  /// Edge count in [previous read, now). The window is consumed even when
  /// the poll faults, so a later cycle never reports two intervals' worth.
  double read(Timestamp now) final;

 protected:
  /// Edges observed in [from, to).
  virtual std::vector<EventTime> poll_events(EventTime from, EventTime to) = 0;

 private:
  Timestamp window_start_;
};

/// Analogue sensor behind the ADC; reports the raw 10-bit code.
class AnalogDriver : public SensorDriver {
 public:
  AnalogDriver(SensorSpec spec, double vref) : SensorDriver(std::move(spec)), vref_(vref) {}

  double read(Timestamp now) final;

 protected:
  virtual double voltage(Timestamp now) = 0;

 private:
  double vref_;
};

}  // namespace bdl::node
