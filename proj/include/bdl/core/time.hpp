#pragma once

#include <chrono>
#include <stop_token>
#include <string>
#include <string_view>

#include "bdl/core/error.hpp"

namespace bdl {

/// UTC wall-clock instant at one-second resolution. Every persisted or
/// transmitted timestamp uses this type.
using Timestamp = std::chrono::sys_seconds;

/// Finer-grained instant used for sensor edge events inside a sampling window.
using EventTime = std::chrono::sys_time<std::chrono::milliseconds>;

/// ISO-8601 basic UTC form, e.g. `20210801T143000Z`.
std::string format_timestamp(Timestamp ts);

/// Inverse of format_timestamp. Rejects fractional seconds, offsets other
/// than `Z`, and out-of-range calendar fields.
Timestamp parse_timestamp(std::string_view text);

/// Converts an arbitrary-precision instant, rejecting sub-second values.
template <class Duration>
Timestamp to_timestamp(std::chrono::sys_time<Duration> t) {
  auto whole = std::chrono::floor<std::chrono::seconds>(t);
  if (whole != t) throw ValidationError("timestamp has sub-second component");
  return whole;
}

/// Injectable time source. Nothing in the node runtime reads the system
/// clock directly.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() const = 0;
  /// Blocks until `deadline` or until stop is requested. Returns false when
  /// woken by a stop request.
  virtual bool sleep_until(Timestamp deadline, std::stop_token stop) = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp now() const override;
  bool sleep_until(Timestamp deadline, std::stop_token stop) override;
};

/// Clock whose time only moves when someone sleeps on it: sleep_until jumps
/// straight to the deadline. Single-consumer.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(Timestamp start) : now_(start) {}
  Timestamp now() const override { return now_; }
  bool sleep_until(Timestamp deadline, std::stop_token stop) override;
  void set(Timestamp t) { now_ = t; }

 private:
  Timestamp now_;
};

}  // namespace bdl
