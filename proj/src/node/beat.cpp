#include "bdl/node/beat.hpp"

#include <algorithm>

#include "bdl/core/error.hpp"

namespace bdl::node {

std::size_t beat_accumulate(std::span<const EventTime> events, EventTime from, EventTime to) {
  if (!(from < to)) throw ValidationError("beat window must satisfy from < to");
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [&](EventTime t) { return from <= t && t < to; }));
}

}  // namespace bdl::node
