#pragma once

#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "bdl/core/model.hpp"

namespace bdl::node {

/// The node's own record store: idempotent keyed inserts, an error log, and
/// the sync cursors.
///
/// With a journal path the store is an append-only JSON-lines journal that
/// is replayed on open and compacted once dead lines dominate. A torn final
/// line (crash mid-append) is discarded on replay; corruption anywhere else
/// is a StorageError. All members are safe to call concurrently; readers get
/// copies, so a sync in flight never holds the lock across I/O.
class LocalStore {
 public:
  /// Volatile store.
  explicit LocalStore(std::string node_id);
  /// Durable store backed by `journal`; replays existing content.
  LocalStore(std::string node_id, std::filesystem::path journal);
  ~LocalStore();

  LocalStore(const LocalStore&) = delete;
  LocalStore& operator=(const LocalStore&) = delete;

  const std::string& node_id() const { return node_id_; }

  /// Returns true when the record was new. Re-inserting an existing
  /// RecordId is a no-op. Throws ValidationError for a foreign record and
  /// StorageError when the journal cannot be written.
  bool insert(const Record& record);

  void log_error(const ErrorLogEntry& entry);

  /// Records strictly newer than `checkpoint` (all records when absent),
  /// ascending. `horizon`, when given, drops records stamped after it.
  /// Throws ValidationError when the checkpoint belongs to another node.
  std::vector<Record> pending_after(const std::optional<RecordId>& checkpoint,
                                    std::optional<Timestamp> horizon = std::nullopt) const;

  /// Error entries not yet acknowledged by the server, oldest first.
  std::vector<ErrorLogEntry> pending_errors() const;

  /// Advances last_synced; never moves it backwards.
  void mark_synced(const RecordId& last);
  /// Acknowledges the oldest `count` pending error entries.
  void mark_errors_synced(std::size_t count);

  std::optional<RecordId> last_synced() const;
  std::size_t size() const;
  std::vector<Record> records() const;
  std::vector<ErrorLogEntry> errors() const;

  /// Rewrites the journal with only live state.
  void compact();

 private:
  void replay();
  void append_line(const std::string& line);
  void maybe_compact();

  std::string node_id_;
  std::optional<std::filesystem::path> path_;
  std::FILE* journal_ = nullptr;
  std::size_t journal_lines_ = 0;

  mutable std::mutex mu_;
  std::map<Timestamp, Record> records_;
  std::vector<ErrorLogEntry> errors_;
  std::size_t errors_synced_ = 0;
  std::optional<RecordId> last_synced_;
};

}  // namespace bdl::node
