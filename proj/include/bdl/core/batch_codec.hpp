#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bdl/core/model.hpp"

namespace bdl {

// Batch CSV layout:
//
//   id,node_id,timestamp,<col1>,...,<colN>\n
//   <node>|<ts>,<node>,<ts>,<v1>,...,<vN>\n      one row per record, ascending
//   #errors\n                                      only when errors are present
//   node_id,timestamp,category,sensor,message\n
//   <node>,<ts>,<category>,<sensor or empty>,<message>\n
//
// Absent readings are empty cells. No quoting: every field charset excludes
// ',' and newlines.

inline constexpr std::string_view kErrorSectionMarker = "#errors";
inline constexpr std::string_view kErrorHeader = "node_id,timestamp,category,sensor,message";

/// Shortest decimal form that parses back to the same double.
std::string format_number(double value);

std::string encode_header(std::span<const std::string> columns);
/// One data row including the trailing newline.
std::string encode_row(const Record& record, std::span<const std::string> columns);
std::string encode_error_row(const ErrorLogEntry& entry);

/// Throws ValidationError when the batch breaks its invariants (ordering,
/// node ownership, key set, non-finite values, reserved characters).
std::string encode_batch(const BatchFile& batch);

/// Throws CodecError carrying the offending line number. The node id is
/// taken from the rows; a header-only file decodes with an empty node id.
BatchFile decode_batch(std::string_view text);

/// Standalone error-log CSV (header + rows), as served by the error export.
std::string encode_error_log(std::span<const ErrorLogEntry> entries);
std::vector<ErrorLogEntry> decode_error_log(std::string_view text);

}  // namespace bdl
