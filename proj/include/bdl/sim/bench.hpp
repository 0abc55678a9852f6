#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include <json.hpp>

namespace bdl::sim {

struct BenchConfig {
  double rpm = 200;
  double minutes = 2;
  /// Target server; an in-process server on a loopback port when absent.
  std::optional<std::string> server_url;
  std::size_t nodes = 48;
  std::string profile = "prototype-v1";
  std::size_t records_per_request = 60;
  std::uint64_t seed = 1;
  /// Spread requests evenly at `rpm`; otherwise send back to back.
  bool paced = true;
  std::chrono::milliseconds timeout{10000};
};

struct BenchReport {
  std::size_t requests = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;          // answered with an error or rejected rows
  std::size_t transport_errors = 0;  // no usable answer
  std::size_t records_inserted = 0;
  double elapsed_s = 0;
  double achieved_rpm = 0;
  double mean_latency_ms = 0;
  double max_latency_ms = 0;

  /// At least `rpm * minutes` ingests at `rpm` or better, none refused.
  bool sustains(double rpm, double minutes) const;
};

/// Drives /api/ingest with hourly files from simulated nodes: registers
/// `nodes` nodes through the API, then issues rpm * minutes uploads, each
/// the next hour of one node's data, round-robin over nodes.
BenchReport run_bench_ingest(const BenchConfig& cfg, const std::function<void(const std::string&)>& progress = {});

nlohmann::json to_json(const BenchReport& report);

}  // namespace bdl::sim
