#include "bdl/core/record_id.hpp"

namespace bdl {

std::string RecordId::str() const { return node_id + '|' + format_timestamp(timestamp); }

void check_node_id(std::string_view node_id) {
  if (node_id.empty()) throw ValidationError("node id is empty");
  for (char c : node_id) {
    if (c == '|' || c == ',' || c == '\n' || c == '\r') {
      throw ValidationError("node id '" + std::string(node_id) + "' contains a reserved character");
    }
  }
}

RecordId make_record_id(std::string node_id, Timestamp ts) {
  check_node_id(node_id);
  return RecordId{std::move(node_id), ts};
}

RecordId parse_record_id(std::string_view canonical) {
  auto bar = canonical.rfind('|');
  if (bar == std::string_view::npos) {
    throw ValidationError("record id '" + std::string(canonical) + "' has no '|' separator");
  }
  std::string node(canonical.substr(0, bar));
  check_node_id(node);
  return RecordId{std::move(node), parse_timestamp(canonical.substr(bar + 1))};
}

}  // namespace bdl
