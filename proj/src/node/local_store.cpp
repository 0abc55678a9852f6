#include "bdl/node/local_store.hpp"

#include <fstream>

#include "bdl/core/error.hpp"
#include "bdl/core/json.hpp"

namespace bdl::node {

using nlohmann::json;

namespace {

constexpr std::size_t kCompactSlack = 4096;

}  // namespace

LocalStore::LocalStore(std::string node_id) : node_id_(std::move(node_id)) { check_node_id(node_id_); }

LocalStore::LocalStore(std::string node_id, std::filesystem::path journal)
    : node_id_(std::move(node_id)), path_(std::move(journal)) {
  check_node_id(node_id_);
  replay();
  journal_ = std::fopen(path_->c_str(), "ab");
  if (journal_ == nullptr) throw StorageError("cannot open journal " + path_->string());
}

LocalStore::~LocalStore() {
  if (journal_ != nullptr) std::fclose(journal_);
}

void LocalStore::replay() {
  std::ifstream in(*path_, std::ios::binary);
  if (!in) return;
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  std::size_t valid_end = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string::npos) break;  // torn tail
    std::string_view line(content.data() + pos, nl - pos);
    json j;
    try {
      j = json::parse(line);
      const auto& op = j.at("op").get_ref<const std::string&>();
      if (op == "rec") {
        auto r = j.at("r").get<Record>();
        records_.try_emplace(r.id.timestamp, std::move(r));
      } else if (op == "err") {
        errors_.push_back(j.at("e").get<ErrorLogEntry>());
      } else if (op == "sync") {
        last_synced_ = parse_record_id(j.at("id").get<std::string>());
      } else if (op == "errsync") {
        errors_synced_ = j.at("n").get<std::size_t>();
      } else {
        throw StorageError("unknown journal op '" + op + "'");
      }
    } catch (const std::exception& e) {
      throw StorageError(path_->string() + ": corrupt journal line " + std::to_string(journal_lines_ + 1) + ": " +
                         e.what());
    }
    ++journal_lines_;
    pos = nl + 1;
    valid_end = pos;
  }
  if (valid_end != content.size()) std::filesystem::resize_file(*path_, valid_end);
}

void LocalStore::append_line(const std::string& line) {
  if (journal_ == nullptr) return;
  if (std::fwrite(line.data(), 1, line.size(), journal_) != line.size() || std::fputc('\n', journal_) == EOF ||
      std::fflush(journal_) != 0) {
    throw StorageError("journal write failed for " + path_->string());
  }
  ++journal_lines_;
}

bool LocalStore::insert(const Record& record) {
  if (record.id.node_id != node_id_) {
    throw ValidationError("record " + record.id.str() + " does not belong to node " + node_id_);
  }
  std::lock_guard lock(mu_);
  if (records_.contains(record.id.timestamp)) return false;
  if (journal_) append_line(json{{"op", "rec"}, {"r", record}}.dump());
  records_.emplace(record.id.timestamp, record);
  maybe_compact();
  return true;
}

void LocalStore::log_error(const ErrorLogEntry& entry) {
  std::lock_guard lock(mu_);
  if (journal_) append_line(json{{"op", "err"}, {"e", entry}}.dump());
  errors_.push_back(entry);
}

std::vector<Record> LocalStore::pending_after(const std::optional<RecordId>& checkpoint,
                                              std::optional<Timestamp> horizon) const {
  if (checkpoint && checkpoint->node_id != node_id_) {
    throw ValidationError("checkpoint " + checkpoint->str() + " belongs to another node");
  }
  std::lock_guard lock(mu_);
  auto it = checkpoint ? records_.upper_bound(checkpoint->timestamp) : records_.begin();
  std::vector<Record> out;
  for (; it != records_.end(); ++it) {
    if (horizon && it->first > *horizon) break;
    out.push_back(it->second);
  }
  return out;
}

std::vector<ErrorLogEntry> LocalStore::pending_errors() const {
  std::lock_guard lock(mu_);
  return {errors_.begin() + static_cast<std::ptrdiff_t>(errors_synced_), errors_.end()};
}

void LocalStore::mark_synced(const RecordId& last) {
  if (last.node_id != node_id_) throw ValidationError("sync cursor " + last.str() + " belongs to another node");
  std::lock_guard lock(mu_);
  if (last_synced_ && last.timestamp <= last_synced_->timestamp) return;
  if (journal_) append_line(json{{"op", "sync"}, {"id", last.str()}}.dump());
  last_synced_ = last;
}

void LocalStore::mark_errors_synced(std::size_t count) {
  if (count == 0) return;
  std::lock_guard lock(mu_);
  auto next = std::min(errors_.size(), errors_synced_ + count);
  if (journal_) append_line(json{{"op", "errsync"}, {"n", next}}.dump());
  errors_synced_ = next;
}

std::optional<RecordId> LocalStore::last_synced() const {
  std::lock_guard lock(mu_);
  return last_synced_;
}

std::size_t LocalStore::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

std::vector<Record> LocalStore::records() const {
  std::lock_guard lock(mu_);
  std::vector<Record> out;
  out.reserve(records_.size());
  for (const auto& [ts, r] : records_) out.push_back(r);
  return out;
}

std::vector<ErrorLogEntry> LocalStore::errors() const {
  std::lock_guard lock(mu_);
  return errors_;
}

void LocalStore::maybe_compact() {
  auto live = records_.size() + errors_.size() + 2;
  if (journal_ != nullptr && journal_lines_ > 2 * live + kCompactSlack) {
    // mu_ is held by the caller.
    auto tmp = *path_;
    tmp += ".compact";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      std::size_t lines = 0;
      for (const auto& [ts, r] : records_) {
        out << json{{"op", "rec"}, {"r", r}}.dump() << '\n';
        ++lines;
      }
      for (const auto& e : errors_) {
        out << json{{"op", "err"}, {"e", e}}.dump() << '\n';
        ++lines;
      }
      if (last_synced_) {
        out << json{{"op", "sync"}, {"id", last_synced_->str()}}.dump() << '\n';
        ++lines;
      }
      out << json{{"op", "errsync"}, {"n", errors_synced_}}.dump() << '\n';
      ++lines;
      out.flush();
      if (!out) throw StorageError("compaction write failed for " + tmp.string());
      journal_lines_ = lines;
    }
    std::fclose(journal_);
    journal_ = nullptr;
    std::filesystem::rename(tmp, *path_);
    journal_ = std::fopen(path_->c_str(), "ab");
    if (journal_ == nullptr) throw StorageError("cannot reopen journal " + path_->string());
  }
}

void LocalStore::compact() {
  std::lock_guard lock(mu_);
  if (journal_ == nullptr) return;
  auto saved = journal_lines_;
  journal_lines_ = std::numeric_limits<std::size_t>::max() / 2;
  try {
    maybe_compact();
  } catch (...) {
    journal_lines_ = saved;
    throw;
  }
}

}  // namespace bdl::node
