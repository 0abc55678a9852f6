#pragma once

#include <cstddef>
#include <span>

#include "bdl/core/time.hpp"

namespace bdl::node {

/// Number of edge events with `from <= t < to`. Events need not be sorted.
/// Half-open windows make counts additive over adjacent windows.
std::size_t beat_accumulate(std::span<const EventTime> events, EventTime from, EventTime to);

}  // namespace bdl::node
