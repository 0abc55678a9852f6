#pragma once

// Brute-force reference for bucket statistics: every bucket rescans every
// record. Shares nothing with the server's single-pass implementation.

#include <limits>

#include "bdl/server/resample.hpp"

namespace bdl::testing {

inline std::vector<server::BucketStats> brute_force_resample(const std::vector<Record>& records,
                                                             const std::vector<SensorSpec>& sensors, Timestamp from,
                                                             Timestamp to, std::chrono::seconds interval) {
  std::vector<server::BucketStats> out;
  for (Timestamp start = from; start < to; start += interval) {
    Timestamp end = std::min(start + interval, to);
    server::BucketStats bucket;
    bucket.bucket_start = start;
    for (const auto& s : sensors) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      double sum = 0;
      std::size_t n = 0;
      for (const auto& r : records) {
        if (r.id.timestamp < start || r.id.timestamp >= end) continue;
        auto it = r.readings.find(s.name);
        if (it == r.readings.end() || !it->second) continue;
        lo = std::min(lo, *it->second);
        hi = std::max(hi, *it->second);
        sum += *it->second;
        ++n;
      }
      if (n == 0) {
        bucket.sensors[s.name] = std::nullopt;
        continue;
      }
      server::SensorStats st;
      st.count = n;
      st.min = lo;
      st.max = hi;
      st.mean = sum / static_cast<double>(n);
      st.aggregate = s.value_kind == ValueKind::continuous ? st.mean
                     : s.value_kind == ValueKind::event_count ? sum
                                                              : hi;
      bucket.sensors[s.name] = st;
    }
    out.push_back(std::move(bucket));
  }
  return out;
}

/// Exact on count/min/max, relative `tol` on mean and continuous aggregates.
inline bool stats_match(const std::vector<server::BucketStats>& got, const std::vector<server::BucketStats>& want,
                        double tol, std::string* why = nullptr) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  auto close = [&](double a, double b) { return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b))); };
  if (got.size() != want.size()) return fail("bucket count differs");
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (got[i].bucket_start != want[i].bucket_start) return fail("bucket start differs at " + std::to_string(i));
    if (got[i].sensors.size() != want[i].sensors.size()) return fail("sensor set differs at " + std::to_string(i));
    for (const auto& [name, w] : want[i].sensors) {
      auto it = got[i].sensors.find(name);
      if (it == got[i].sensors.end()) return fail("missing sensor " + name);
      const auto& g = it->second;
      if (g.has_value() != w.has_value()) return fail("presence differs for " + name + " at " + std::to_string(i));
      if (!w) continue;
      if (g->count != w->count || g->min != w->min || g->max != w->max) {
        return fail("count/min/max differ for " + name + " at " + std::to_string(i));
      }
      if (!close(g->mean, w->mean) || !close(g->aggregate, w->aggregate)) {
        return fail("mean/aggregate differ for " + name + " at " + std::to_string(i));
      }
    }
  }
  return true;
}

}  // namespace bdl::testing
