#pragma once

#include <compare>
#include <functional>
#include <string>
#include <string_view>

#include "bdl/core/time.hpp"

namespace bdl {

/// Primary key of a record: the producing node plus its sampling instant.
///
/// Ordering is meaningful only between IDs of the same node, where it is the
/// timestamp order. The defaulted comparison orders by node first, which
/// keeps containers well-formed but carries no protocol meaning.
struct RecordId {
  std::string node_id;
  Timestamp timestamp{};

  /// `<node_id>|<YYYYMMDDTHHMMSSZ>`
  std::string str() const;

  friend bool operator==(const RecordId&, const RecordId&) = default;
  friend auto operator<=>(const RecordId&, const RecordId&) = default;
};

/// Throws ValidationError when `node_id` is empty or contains a character
/// that would break the record-ID or CSV framing.
void check_node_id(std::string_view node_id);

RecordId make_record_id(std::string node_id, Timestamp ts);

template <class Duration>
RecordId make_record_id(std::string node_id, std::chrono::sys_time<Duration> t) {
  return make_record_id(std::move(node_id), to_timestamp(t));
}

RecordId parse_record_id(std::string_view canonical);

}  // namespace bdl

template <>
struct std::hash<bdl::RecordId> {
  std::size_t operator()(const bdl::RecordId& id) const noexcept {
    return std::hash<std::string>{}(id.node_id) ^
           (std::hash<long long>{}(id.timestamp.time_since_epoch().count()) * 0x9e3779b97f4a7c15ULL);
  }
};
