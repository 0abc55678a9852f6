#include "bdl/server/resample.hpp"

#include <algorithm>

#include "bdl/core/error.hpp"

namespace bdl::server {

namespace {

struct Accumulator {
  double sum = 0;
  double min = 0;
  double max = 0;
  std::size_t count = 0;

  void add(double v) {
    if (count == 0) {
      min = max = v;
    } else {
      min = std::min(min, v);
      max = std::max(max, v);
    }
    sum += v;
    ++count;
  }
};

}  // namespace

std::vector<BucketStats> resample(std::span<const Record> records, std::span<const SensorSpec> sensors,
                                  Timestamp from, Timestamp to, std::chrono::seconds interval) {
  if (!(from < to)) throw ValidationError("query range must satisfy from < to");
  if (interval <= std::chrono::seconds{0}) throw ValidationError("bucket interval must be positive");

  const auto span = to - from;
  const auto bucket_count = static_cast<std::size_t>((span + interval - std::chrono::seconds{1}) / interval);
  std::vector<std::vector<Accumulator>> acc(bucket_count, std::vector<Accumulator>(sensors.size()));

  auto first = std::lower_bound(records.begin(), records.end(), from,
                                [](const Record& r, Timestamp t) { return r.id.timestamp < t; });
  for (auto it = first; it != records.end() && it->id.timestamp < to; ++it) {
    auto bucket = static_cast<std::size_t>((it->id.timestamp - from) / interval);
    for (std::size_t s = 0; s < sensors.size(); ++s) {
      auto reading = it->readings.find(sensors[s].name);
      if (reading != it->readings.end() && reading->second) acc[bucket][s].add(*reading->second);
    }
  }

  std::vector<BucketStats> out(bucket_count);
  for (std::size_t b = 0; b < bucket_count; ++b) {
    out[b].bucket_start = from + interval * static_cast<long long>(b);
    for (std::size_t s = 0; s < sensors.size(); ++s) {
      const auto& a = acc[b][s];
      std::optional<SensorStats> stats;
      if (a.count > 0) {
        SensorStats st;
        st.count = a.count;
        st.min = a.min;
        st.max = a.max;
        st.mean = a.sum / static_cast<double>(a.count);
        // Rounding in sum / count can land a hair outside [min, max].
        st.mean = std::clamp(st.mean, st.min, st.max);
        switch (sensors[s].value_kind) {
          case ValueKind::continuous: st.aggregate = st.mean; break;
          case ValueKind::event_count: st.aggregate = a.sum; break;
          case ValueKind::binary: st.aggregate = st.max; break;
        }
        stats = st;
      }
      out[b].sensors.emplace(sensors[s].name, stats);
    }
  }
  return out;
}

}  // namespace bdl::server
