#pragma once

// nlohmann::json bindings for the domain types used on the HTTP API and in
// on-disk journals.

#include <json.hpp>

#include "bdl/core/model.hpp"

namespace bdl {

void to_json(nlohmann::json& j, const SensorSpec& s);
void from_json(const nlohmann::json& j, SensorSpec& s);

void to_json(nlohmann::json& j, const NodeDescriptor& n);
void from_json(const nlohmann::json& j, NodeDescriptor& n);

void to_json(nlohmann::json& j, const Record& r);
void from_json(const nlohmann::json& j, Record& r);

void to_json(nlohmann::json& j, const ErrorLogEntry& e);
void from_json(const nlohmann::json& j, ErrorLogEntry& e);

void to_json(nlohmann::json& j, const IngestReport& r);
void from_json(const nlohmann::json& j, IngestReport& r);

}  // namespace bdl
