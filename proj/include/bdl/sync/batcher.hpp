#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bdl/core/model.hpp"

namespace bdl::sync {

struct SyncPolicy {
  std::chrono::seconds sync_interval{3600};
  /// Upper bound on one encoded batch file.
  std::size_t max_file_bytes = 2u << 20;
  std::chrono::milliseconds transport_timeout{10'000};
};

/// Splits pending records into batch files of at most `max_file_bytes`
/// encoded bytes, greedily and in order. A batch holds records with one key
/// set; columns follow `column_order` (unknown keys after it, sorted).
/// Pending errors ride in the first batch as far as they fit; the rest stay
/// pending for a later cycle. No records means no batches.
///
/// Throws ConfigError when a single record cannot fit under the cap.
std::vector<BatchFile> build_batches(const std::string& node_id, std::span<const Record> pending,
                                     std::span<const ErrorLogEntry> errors, const SyncPolicy& policy,
                                     std::span<const std::string> column_order = {});

}  // namespace bdl::sync
