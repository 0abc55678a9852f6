#include "bdl/sim/drivers.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bdl/node/adc.hpp"

namespace bdl::sim {

namespace {

using namespace std::chrono;

constexpr double kTwoPi = 6.283185307179586;
constexpr double kVref = 3.3;

std::mt19937_64 make_rng(std::uint64_t seed, const std::string& name) {
  std::vector<std::uint32_t> material{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  for (unsigned char c : name) material.push_back(c);
  std::seed_seq seq(material.begin(), material.end());
  return std::mt19937_64(seq);
}

/// Fraction of the UTC day elapsed at `t`, in [0, 1).
double day_phase(Timestamp t) {
  auto since_midnight = t - floor<days>(t);
  return static_cast<double>(since_midnight.count()) / 86400.0;
}

SensorSpec spec_of(std::string name, InterfaceType type, ValueKind kind, int channel, std::string unit) {
  SensorSpec s;
  s.name = s.sensor_id = std::move(name);
  s.interface_type = type;
  s.value_kind = kind;
  s.channel = channel;
  s.unit = std::move(unit);
  return s;
}

/// Shared fault injection for every simulated driver.
class Faulty {
 public:
  Faulty(double rate, std::mt19937_64& rng) : rate_(rate), rng_(rng) {}
  void maybe_fail(const std::string& name) {
    if (rate_ > 0 && std::uniform_real_distribution<double>(0, 1)(rng_) < rate_) {
      throw node::SensorFault(name + ": simulated read failure");
    }
  }

 private:
  double rate_;
  std::mt19937_64& rng_;
};

struct Diurnal {
  double mean;
  double amplitude;
  double peak_phase;  // fraction of the day at the maximum
  double noise;       // bound of the uniform noise term
  double lo;
  double hi;
};

/// Daily sinusoid plus bounded noise, clamped to the physical range.
class DiurnalDriver : public node::SensorDriver {
 public:
  DiurnalDriver(SensorSpec spec, Diurnal shape, std::uint64_t seed, double fault_rate)
      : SensorDriver(std::move(spec)), shape_(shape), rng_(make_rng(seed, this->spec().name)), faulty_(fault_rate, rng_) {}

  double read(Timestamp now) override {
    faulty_.maybe_fail(spec().name);
    double v = shape_.mean + shape_.amplitude * std::cos(kTwoPi * (day_phase(now) - shape_.peak_phase)) +
               std::uniform_real_distribution<double>(-shape_.noise, shape_.noise)(rng_);
    return std::clamp(v, shape_.lo, shape_.hi);
  }

 private:
  Diurnal shape_;
  std::mt19937_64 rng_;
  Faulty faulty_;
};

/// Mean-reverting drift with bounded noise, as gas sensors wander.
class DriftDriver : public node::SensorDriver {
 public:
  DriftDriver(SensorSpec spec, double mean, double spread, double lo, double hi, std::uint64_t seed, double fault_rate)
      : SensorDriver(std::move(spec)),
        mean_(mean),
        spread_(spread),
        lo_(lo),
        hi_(hi),
        rng_(make_rng(seed, this->spec().name)),
        faulty_(fault_rate, rng_),
        level_(mean) {}

  double read(Timestamp) override {
    faulty_.maybe_fail(spec().name);
    level_ += 0.02 * (mean_ - level_) + std::uniform_real_distribution<double>(-spread_, spread_)(rng_) * 0.1;
    level_ = std::clamp(level_, lo_, hi_);
    double v = level_ + std::uniform_real_distribution<double>(-spread_, spread_)(rng_) * 0.05;
    return std::clamp(v, lo_, hi_);
  }

 private:
  double mean_, spread_, lo_, hi_;
  std::mt19937_64 rng_;
  Faulty faulty_;
  double level_;
};

/// MQ2-style gas channel: a drifting voltage read through the ADC and
/// scaled to ppm.
class AdcGasDriver : public node::SensorDriver {
 public:
  AdcGasDriver(SensorSpec spec, double full_scale_ppm, std::uint64_t seed, double fault_rate)
      : SensorDriver(std::move(spec)),
        full_scale_(full_scale_ppm),
        rng_(make_rng(seed, this->spec().name)),
        faulty_(fault_rate, rng_) {}

  double read(Timestamp) override {
    faulty_.maybe_fail(spec().name);
    volts_ += 0.02 * (0.4 - volts_) + std::uniform_real_distribution<double>(-0.01, 0.01)(rng_);
    volts_ = std::clamp(volts_, 0.0, kVref);
    return node::adc_quantize(volts_, kVref) * full_scale_ / node::kAdcMaxCode;
  }

 private:
  double full_scale_;
  std::mt19937_64 rng_;
  Faulty faulty_;
  double volts_ = 0.4;
};

/// Digital light module: 0 while lit, 1 in the dark. Each day's dawn and
/// dusk edges are jittered by up to 45 minutes around 06:00 and 18:00.
class LightDriver : public node::SensorDriver {
 public:
  LightDriver(SensorSpec spec, std::uint64_t seed, double fault_rate)
      : SensorDriver(std::move(spec)), seed_(seed), rng_(make_rng(seed, this->spec().name)), faulty_(fault_rate, rng_) {}

  double read(Timestamp now) override {
    faulty_.maybe_fail(spec().name);
    auto day = floor<days>(now);
    if (day != day_) {
      auto jitter = make_rng(seed_ ^ static_cast<std::uint64_t>(day.time_since_epoch().count()), spec().name);
      std::uniform_int_distribution<int> offset(-45, 45);
      day_ = day;
      dawn_ = day + hours{6} + minutes{offset(jitter)};
      dusk_ = day + hours{18} + minutes{offset(jitter)};
    }
    return (now >= dawn_ && now < dusk_) ? 0.0 : 1.0;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  Faulty faulty_;
  sys_days day_{};
  Timestamp dawn_{}, dusk_{};
};

/// Rare binary events, e.g. a flame detector.
class RareFlagDriver : public node::SensorDriver {
 public:
  RareFlagDriver(SensorSpec spec, double p, std::uint64_t seed, double fault_rate)
      : SensorDriver(std::move(spec)), p_(p), rng_(make_rng(seed, this->spec().name)), faulty_(fault_rate, rng_) {}

  double read(Timestamp) override {
    faulty_.maybe_fail(spec().name);
    return std::bernoulli_distribution(p_)(rng_) ? 1.0 : 0.0;
  }

 private:
  double p_;
  std::mt19937_64 rng_;
  Faulty faulty_;
};

/// Poisson edge stream with a day and a night rate (events per minute).
class PoissonEventDriver : public node::EventCountingDriver {
 public:
  PoissonEventDriver(SensorSpec spec, Timestamp start, double day_rate, double night_rate, std::uint64_t seed,
                     double fault_rate)
      : EventCountingDriver(std::move(spec), start),
        day_rate_(day_rate),
        night_rate_(night_rate),
        rng_(make_rng(seed, this->spec().name)),
        faulty_(fault_rate, rng_) {}

 protected:
  std::vector<EventTime> poll_events(EventTime from, EventTime to) override {
    faulty_.maybe_fail(spec().name);
    if (!(from < to)) return {};
    double phase = day_phase(floor<seconds>(from));
    double rate = (phase >= 0.25 && phase < 0.9) ? day_rate_ : night_rate_;
    double span_min = duration<double, std::ratio<60>>(to - from).count();
    auto n = std::poisson_distribution<int>(rate * span_min)(rng_);
    std::uniform_int_distribution<std::int64_t> at(0, (to - from).count() - 1);
    std::vector<EventTime> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(from + milliseconds{at(rng_)});
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  double day_rate_, night_rate_;
  std::mt19937_64 rng_;
  Faulty faulty_;
};

}  // namespace

std::vector<std::string> profile_names() { return {"enviro", "prototype-v1"}; }

std::vector<SensorSpec> profile_sensors(const std::string& profile) {
  using IT = InterfaceType;
  using VK = ValueKind;
  if (profile == "enviro") {
    return {
        spec_of("proximity", IT::custom_code, VK::continuous, 2, "raw"),
        spec_of("humidity", IT::custom_code, VK::continuous, 2, "%"),
        spec_of("pressure", IT::custom_code, VK::continuous, 2, "hPa"),
        spec_of("light", IT::direct_input, VK::binary, 17, ""),
        spec_of("gas_oxidising", IT::custom_code, VK::continuous, 3, "kOhm"),
        spec_of("gas_reducing", IT::custom_code, VK::continuous, 3, "kOhm"),
    };
  }
  if (profile == "prototype-v1") {
    // DHT11 gives two readings and the MQ2 three, so seven parts make ten columns.
    return {
        spec_of("temperature", IT::custom_code, VK::continuous, 4, "degC"),
        spec_of("humidity", IT::custom_code, VK::continuous, 4, "%"),
        spec_of("light", IT::direct_input, VK::binary, 17, ""),
        spec_of("sound", IT::event_feedback, VK::event_count, 27, "events"),
        spec_of("flame", IT::direct_input, VK::binary, 22, ""),
        spec_of("vibration", IT::event_feedback, VK::event_count, 23, "events"),
        spec_of("motion", IT::event_feedback, VK::event_count, 24, "events"),
        spec_of("smoke", IT::custom_code, VK::continuous, 0, "ppm"),
        spec_of("co", IT::custom_code, VK::continuous, 0, "ppm"),
        spec_of("lpg", IT::custom_code, VK::continuous, 0, "ppm"),
    };
  }
  throw ConfigError("unknown sensor profile '" + profile + "'");
}

std::unique_ptr<node::SensorDriver> simulated_driver(const SensorSpec& spec, std::uint64_t seed, Timestamp start,
                                                     double fault_rate) {
  const auto& n = spec.name;
  if (n == "temperature") return std::make_unique<DiurnalDriver>(spec, Diurnal{22, 3, 0.625, 0.4, -10, 50}, seed, fault_rate);
  if (n == "humidity") return std::make_unique<DiurnalDriver>(spec, Diurnal{50, 12, 0.125, 3, 0, 100}, seed, fault_rate);
  if (n == "pressure") return std::make_unique<DiurnalDriver>(spec, Diurnal{1013, 1.5, 0.4, 0.3, 870, 1085}, seed, fault_rate);
  if (n == "proximity") return std::make_unique<DriftDriver>(spec, 20, 10, 0, 2047, seed, fault_rate);
  if (n == "gas_oxidising") return std::make_unique<DriftDriver>(spec, 20, 2, 0.1, 1000, seed, fault_rate);
  if (n == "gas_reducing") return std::make_unique<DriftDriver>(spec, 300, 20, 1, 2000, seed, fault_rate);
  if (n == "smoke" || n == "co" || n == "lpg") return std::make_unique<AdcGasDriver>(spec, 10000, seed, fault_rate);
  if (n == "light") return std::make_unique<LightDriver>(spec, seed, fault_rate);
  if (n == "flame") return std::make_unique<RareFlagDriver>(spec, 0.001, seed, fault_rate);
  if (n == "sound") return std::make_unique<PoissonEventDriver>(spec, start, 5, 0.5, seed, fault_rate);
  if (n == "vibration") return std::make_unique<PoissonEventDriver>(spec, start, 1, 0.1, seed, fault_rate);
  if (n == "motion") return std::make_unique<PoissonEventDriver>(spec, start, 2, 0.05, seed, fault_rate);

  switch (spec.value_kind) {
    case ValueKind::continuous:
      return std::make_unique<DiurnalDriver>(spec, Diurnal{50, 20, 0.5, 5, 0, 100}, seed, fault_rate);
    case ValueKind::binary:
      return std::make_unique<RareFlagDriver>(spec, 0.05, seed, fault_rate);
    case ValueKind::event_count:
      return std::make_unique<PoissonEventDriver>(spec, start, 1, 1, seed, fault_rate);
  }
  throw ConfigError("unsupported value kind");
}

std::vector<std::unique_ptr<node::SensorDriver>> simulated_drivers(const std::vector<SensorSpec>& specs,
                                                                   std::uint64_t seed, Timestamp start,
                                                                   double fault_rate) {
  std::vector<std::unique_ptr<node::SensorDriver>> out;
  for (const auto& s : specs) out.push_back(simulated_driver(s, seed, start, fault_rate));
  return out;
}

}  // namespace bdl::sim
