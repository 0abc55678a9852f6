#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "bdl/core/batch_codec.hpp"
#include "bdl/core/json.hpp"
#include "bdl/server/central_store.hpp"
#include "bdl/server/direct_transport.hpp"
#include "fakes.hpp"
#include "resample_oracle.hpp"

using namespace bdl;
using namespace bdl::server;
using namespace std::chrono;
using testing::make_spec;

namespace {

const Timestamp kT0 = sys_days{year{2021} / 8 / 1};

struct Fixture {
  Fixture() : store(clock) {
    node_id = store.register_node("house1/kitchen").node_id;
    store.add_sensor(node_id, make_spec("temperature", ValueKind::continuous));
    store.add_sensor(node_id, make_spec("sound", ValueKind::event_count, InterfaceType::event_feedback, 17));
    store.add_sensor(node_id, make_spec("light", ValueKind::binary, InterfaceType::direct_input, 27));
    store.fetch_config(node_id);
  }

  BatchFile batch(int first, int count, std::uint64_t seed = 1) const {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(first));
    BatchFile b;
    b.node_id = node_id;
    b.columns = {"temperature", "sound", "light"};
    for (int i = first; i < first + count; ++i) {
      Record r{make_record_id(node_id, kT0 + minutes{i}), {}};
      r.readings["temperature"] = rng() % 10 == 0 ? std::nullopt : std::optional<double>(20.0 + (rng() % 1000) / 100.0);
      r.readings["sound"] = static_cast<double>(rng() % 30);
      r.readings["light"] = static_cast<double>(rng() % 2);
      b.records.push_back(std::move(r));
    }
    return b;
  }

  ManualClock clock{kT0};
  CentralStore store;
  std::string node_id;
};

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "bdl_server_test" / name;
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("checkpoint") {
  Fixture f;
  CHECK_FALSE(f.store.checkpoint(f.node_id));

  f.store.ingest(encode_batch(f.batch(0, 60)));
  auto all = f.store.records(f.node_id);
  auto brute = std::max_element(all.begin(), all.end(), [](const Record& a, const Record& b) {
    return a.id.timestamp < b.id.timestamp;
  });
  CHECK(f.store.checkpoint(f.node_id) == brute->id);

  SUBCASE("unknown node is auto-registered") {
    auto before = f.store.nodes().size();
    CHECK_FALSE(f.store.checkpoint("rpi_99"));
    auto nodes = f.store.nodes();
    CHECK(nodes.size() == before + 1);
    CHECK(nodes.back().node_id == "rpi_99");
    CHECK(nodes.back().sensors.empty());
  }
  SUBCASE("malformed node id") { CHECK_THROWS_AS(f.store.checkpoint("a|b"), ValidationError); }
}

TEST_CASE("ingest") {
  Fixture f;
  auto file = encode_batch(f.batch(0, 60));

  SUBCASE("healthy hourly file") {
    auto rep = f.store.ingest(file);
    CHECK(rep.inserted == 60);
    CHECK(rep.duplicates == 0);
    CHECK(rep.rejected.empty());
  }
  SUBCASE("replay is idempotent") {
    f.store.ingest(file);
    auto before = f.store.records(f.node_id);
    auto rep = f.store.ingest(file);
    CHECK(rep.inserted == 0);
    CHECK(rep.duplicates == 60);
    CHECK(f.store.records(f.node_id) == before);
  }
  SUBCASE("overlapping files give the set union") {
    auto a = f.batch(0, 60);
    auto b = f.batch(40, 80);
    // Overlap rows carry the same content as in a real replay.
    for (int i = 0; i < 20; ++i) b.records[static_cast<std::size_t>(i)] = a.records[static_cast<std::size_t>(40 + i)];
    f.store.ingest(encode_batch(a));
    auto rep = f.store.ingest(encode_batch(b));
    CHECK(rep.inserted == 60);
    CHECK(rep.duplicates == 20);
    CHECK(f.store.partition_size(f.node_id) == 120);
  }
  SUBCASE("undecodable file stores nothing") {
    auto broken = file + "garbage,row\n";
    CHECK_THROWS_AS(f.store.ingest(broken), CodecError);
    CHECK(f.store.partition_size(f.node_id) == 0);
  }
  SUBCASE("unknown node") {
    auto b = f.batch(0, 2);
    b.node_id = "rpi_77";
    for (auto& r : b.records) r.id.node_id = "rpi_77";
    CHECK_THROWS_AS(f.store.ingest(encode_batch(b)), NotFoundError);
  }
  SUBCASE("rows with unknown sensors or out-of-kind values are rejected individually") {
    BatchFile b;
    b.node_id = f.node_id;
    b.columns = {"temperature", "co2"};
    b.records.push_back({make_record_id(f.node_id, kT0), {{"temperature", 20.0}, {"co2", 400.0}}});
    auto rep = f.store.ingest(encode_batch(b));
    CHECK(rep.inserted == 0);
    REQUIRE(rep.rejected.size() == 1);
    CHECK(rep.rejected[0].line == 2);

    auto good = f.batch(0, 3);
    good.records[1].readings["light"] = 2.0;
    rep = f.store.ingest(encode_batch(good));
    CHECK(rep.inserted == 2);
    REQUIRE(rep.rejected.size() == 1);
    CHECK(rep.rejected[0].line == 3);
  }
  SUBCASE("sensor added through the registry is accepted afterwards") {
    BatchFile b;
    b.node_id = f.node_id;
    b.columns = {"co2"};
    b.records.push_back({make_record_id(f.node_id, kT0), {{"co2", 400.0}}});
    CHECK(f.store.ingest(encode_batch(b)).rejected.size() == 1);
    f.store.add_sensor(f.node_id, make_spec("co2", ValueKind::continuous));
    CHECK(f.store.ingest(encode_batch(b)).inserted == 1);
  }
  SUBCASE("error section is appended once") {
    auto b = f.batch(0, 5);
    b.errors.push_back(sensor_fault(f.node_id, kT0 + minutes{2}, "temperature", "checksum"));
    b.errors.push_back(transport_fault(f.node_id, kT0 + minutes{3}, "timeout"));
    auto rep = f.store.ingest(encode_batch(b));
    CHECK(rep.errors_logged == 2);
    rep = f.store.ingest(encode_batch(b));
    CHECK(rep.errors_logged == 0);
    CHECK(f.store.errors(f.node_id) == b.errors);
  }
  SUBCASE("header-only file is a no-op") {
    CHECK(f.store.ingest("id,node_id,timestamp,temperature\n") == IngestReport{});
  }
}

TEST_CASE("registry") {
  ManualClock clock(kT0);
  CentralStore store(clock);
  CHECK(store.register_node("a").node_id == "rpi_1");
  CHECK(store.register_node("b").node_id == "rpi_2");
  store.checkpoint("rpi_3");
  CHECK(store.register_node("c").node_id == "rpi_4");

  auto n = store.node("rpi_1");
  REQUIRE(n);
  CHECK_FALSE(n->updated);
  CHECK(n->created_at == kT0);

  auto gas = make_spec("gas_oxidising", ValueKind::continuous, InterfaceType::custom_code, 0);
  CHECK(store.add_sensor("rpi_1", gas).updated);
  auto fetched = store.fetch_config("rpi_1");
  CHECK(fetched.was_updated);
  CHECK_FALSE(store.node("rpi_1")->updated);
  CHECK_FALSE(store.fetch_config("rpi_1").was_updated);

  CHECK_THROWS_AS(store.add_sensor("rpi_1", gas), ValidationError);
  CHECK_THROWS_AS(store.add_sensor("rpi_1", make_spec("x,y", ValueKind::binary)), ValidationError);
  CHECK_THROWS_AS(store.add_sensor("rpi_1", make_spec("adc", ValueKind::continuous, InterfaceType::direct_input, 8)),
                  ValidationError);
  CHECK_THROWS_AS(store.remove_sensor("rpi_1", "nonexistent"), NotFoundError);
  CHECK_THROWS_AS(store.add_sensor("rpi_42", gas), NotFoundError);

  CHECK(store.remove_sensor("rpi_1", "gas_oxidising").updated);
  CHECK_FALSE(store.node("rpi_1")->sensors[0].active);
  CHECK_THROWS_AS(store.remove_sensor("rpi_1", "gas_oxidising"), NotFoundError);
  // Re-adding reactivates the same entry.
  store.add_sensor("rpi_1", gas);
  CHECK(store.node("rpi_1")->sensors.size() == 1);
  CHECK(store.node("rpi_1")->sensors[0].active);

  CHECK_FALSE(store.deactivate_node("rpi_2").active);
  CHECK(store.nodes().size() == 4);
}

TEST_CASE("removing a sensor keeps its history") {
  Fixture f;
  f.store.ingest(encode_batch(f.batch(0, 120)));
  ResampleQuery q{f.node_id, {"sound"}, kT0, kT0 + hours{2}, hours{1}};
  auto before = f.store.query_resampled(q);
  auto export_before = f.store.export_csv(f.node_id, {"sound"}, kT0, kT0 + hours{2});

  f.store.remove_sensor(f.node_id, "sound");
  CHECK(f.store.query_resampled(q) == before);
  CHECK(f.store.export_csv(f.node_id, {"sound"}, kT0, kT0 + hours{2}) == export_before);
  CHECK(f.store.partition_size(f.node_id) == 120);
}

TEST_CASE("query_resampled") {
  Fixture f;
  f.store.ingest(encode_batch(f.batch(0, 240)));
  auto records = f.store.records(f.node_id);
  auto sensors = f.store.node(f.node_id)->sensors;

  SUBCASE("bucket equal to the record interval is the identity") {
    auto out = f.store.query_resampled({f.node_id, {"light"}, kT0, kT0 + hours{4}, minutes{1}});
    REQUIRE(out.size() == 240);
    for (std::size_t i = 0; i < out.size(); ++i) {
      auto st = out[i].sensors.at("light");
      REQUIRE(st);
      CHECK(st->count == 1);
      CHECK(st->min == *records[i].readings.at("light"));
      CHECK(st->max == st->min);
      CHECK(st->mean == st->min);
    }
  }
  SUBCASE("constant series") {
    ManualClock clock(kT0);
    CentralStore store(clock);
    auto id = store.register_node("x").node_id;
    store.add_sensor(id, make_spec("t", ValueKind::continuous));
    BatchFile b{id, {"t"}, {}, {}};
    for (int i = 0; i < 600; ++i) b.records.push_back({make_record_id(id, kT0 + minutes{i}), {{"t", 0.1}}});
    store.ingest(encode_batch(b));
    for (const auto& bucket : store.query_resampled({id, {}, kT0, kT0 + hours{10}, minutes{7}})) {
      auto st = bucket.sensors.at("t");
      REQUIRE(st);
      CHECK(st->min == 0.1);
      CHECK(st->max == 0.1);
      CHECK(st->mean == 0.1);
    }
  }
  SUBCASE("matches the brute-force oracle, including a short tail bucket") {
    auto from = kT0 + minutes{13};
    auto to = kT0 + hours{3} + minutes{29};
    auto got = f.store.query_resampled({f.node_id, {}, from, to, minutes{25}});
    auto want = testing::brute_force_resample(records, sensors, from, to, minutes{25});
    std::string why;
    CHECK_MESSAGE(testing::stats_match(got, want, 1e-9, &why), why);
    CHECK(got.back().bucket_start == kT0 + hours{3} + minutes{8});
  }
  SUBCASE("conservation") {
    auto out = f.store.query_resampled({f.node_id, {}, kT0, kT0 + hours{4}, minutes{17}});
    std::size_t count = 0;
    double events = 0;
    for (const auto& b : out) {
      if (auto st = b.sensors.at("temperature")) count += st->count;
      if (auto st = b.sensors.at("sound")) events += st->aggregate;
      for (const auto& [name, st] : b.sensors) {
        if (st) CHECK((st->min <= st->mean && st->mean <= st->max));
      }
    }
    std::size_t present = 0;
    double total = 0;
    for (const auto& r : records) {
      present += r.readings.at("temperature").has_value();
      total += *r.readings.at("sound");
    }
    CHECK(count == present);
    CHECK(events == total);
  }
  SUBCASE("empty buckets are absent") {
    auto out = f.store.query_resampled({f.node_id, {"temperature"}, kT0 + hours{10}, kT0 + hours{12}, hours{1}});
    REQUIRE(out.size() == 2);
    CHECK_FALSE(out[0].sensors.at("temperature"));
  }
  SUBCASE("interval finer than the record interval is rejected") {
    CHECK_THROWS_WITH_AS(f.store.query_resampled({f.node_id, {}, kT0, kT0 + hours{1}, seconds{30}}),
                         doctest::Contains("equal to or greater than the record interval"), ValidationError);
  }
  SUBCASE("bad queries") {
    CHECK_THROWS_AS(f.store.query_resampled({f.node_id, {"co2"}, kT0, kT0 + hours{1}, hours{1}}), ValidationError);
    CHECK_THROWS_AS(f.store.query_resampled({f.node_id, {}, kT0, kT0, hours{1}}), ValidationError);
    CHECK_THROWS_AS(f.store.query_resampled({"rpi_9", {}, kT0, kT0 + hours{1}, hours{1}}), NotFoundError);
  }
}

TEST_CASE("month-long temperature series summary") {
  ManualClock clock(kT0);
  CentralStore store(clock);
  auto id = store.register_node("house1/living").node_id;
  store.add_sensor(id, make_spec("temperature", ValueKind::continuous));
  std::mt19937_64 rng(12);
  std::normal_distribution<double> noise(0.0, 0.15);
  BatchFile b{id, {"temperature"}, {}, {}};
  for (int i = 0; i < 30 * 24 * 60; ++i) {
    double diurnal = 26.98 + 0.5 * std::sin(2 * 3.141592653589793 * (i % 1440) / 1440.0);
    b.records.push_back({make_record_id(id, kT0 + minutes{i}), {{"temperature", diurnal + noise(rng)}}});
  }
  store.ingest(encode_batch(b));
  auto out = store.query_resampled({id, {}, kT0, kT0 + days{30}, days{30}});
  REQUIRE(out.size() == 1);
  auto st = *out[0].sensors.at("temperature");
  CHECK(st.min <= st.mean);
  CHECK(st.mean <= st.max);
  auto want = testing::brute_force_resample(b.records, {make_spec("temperature", ValueKind::continuous)}, kT0,
                                            kT0 + days{30}, days{30});
  CHECK(testing::stats_match(out, want, 1e-9));
}

TEST_CASE("exports") {
  Fixture f;
  auto b = f.batch(0, 180);
  b.errors.push_back(sensor_fault(f.node_id, kT0 + minutes{5}, "temperature", "checksum"));
  f.store.ingest(encode_batch(b));

  SUBCASE("full-range export decodes to the partition") {
    auto text = f.store.export_csv(f.node_id, {}, kT0, kT0 + days{1});
    auto back = decode_batch(text);
    CHECK(back.columns == std::vector<std::string>{"temperature", "sound", "light"});
    CHECK(back.records == f.store.records(f.node_id));
  }
  SUBCASE("exact [from, to) filter and sensor subset") {
    auto back = decode_batch(f.store.export_csv(f.node_id, {"light"}, kT0 + minutes{10}, kT0 + minutes{20}));
    REQUIRE(back.records.size() == 10);
    CHECK(back.records.front().id.timestamp == kT0 + minutes{10});
    CHECK(back.records.back().id.timestamp == kT0 + minutes{19});
    CHECK(back.records.front().readings.size() == 1);
  }
  SUBCASE("empty range is header only") {
    CHECK(f.store.export_csv(f.node_id, {}, kT0 + days{5}, kT0 + days{6}) ==
          "id,node_id,timestamp,temperature,sound,light\n");
    CHECK(f.store.export_errors(f.node_id, kT0 + days{5}, kT0 + days{6}) ==
          "node_id,timestamp,category,sensor,message\n");
  }
  SUBCASE("error export after one sensor fault") {
    auto rows = decode_error_log(f.store.export_errors(f.node_id, kT0, kT0 + days{1}));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].category == ErrorCategory::sensor_fault);
    CHECK(rows[0].sensor_name == "temperature");
  }
  SUBCASE("unknown node") { CHECK_THROWS_AS(f.store.export_csv("rpi_9", {}, kT0, kT0 + days{1}), NotFoundError); }
}

TEST_CASE("durable store reloads registry and partitions") {
  auto dir = fresh_dir("reload");
  ManualClock clock(kT0);
  std::string id;
  std::vector<Record> expected;
  {
    CentralStore store(clock, dir);
    id = store.register_node("house2/bedroom").node_id;
    store.add_sensor(id, make_spec("t", ValueKind::continuous));
    BatchFile b{id, {"t"}, {}, {transport_fault(id, kT0, "timeout")}};
    for (int i = 0; i < 50; ++i) b.records.push_back({make_record_id(id, kT0 + minutes{i}), {{"t", i * 0.5}}});
    store.ingest(encode_batch(b));
    expected = store.records(id);
  }
  CentralStore store(clock, dir);
  REQUIRE(store.node(id));
  CHECK(store.node(id)->label == "house2/bedroom");
  CHECK(store.node(id)->updated);
  CHECK(store.records(id) == expected);
  CHECK(store.errors(id).size() == 1);
  CHECK(store.register_node("next").node_id == "rpi_2");
}

TEST_CASE("a crashed ingest leaves no partial content") {
  auto dir = fresh_dir("crash");
  ManualClock clock(kT0);
  std::string id;
  {
    CentralStore store(clock, dir);
    id = store.register_node("n").node_id;
    store.add_sensor(id, make_spec("t", ValueKind::continuous));
    BatchFile b{id, {"t"}, {}, {}};
    for (int i = 0; i < 10; ++i) b.records.push_back({make_record_id(id, kT0 + minutes{i}), {{"t", 1.0}}});
    store.ingest(encode_batch(b));
  }
  // Simulate a second ingest that died before its commit line.
  {
    std::ofstream out(dir / (id + ".journal"), std::ios::app);
    Record r{make_record_id(id, kT0 + hours{1}), {{"t", 2.0}}};
    out << nlohmann::json{{"r", r}}.dump() << '\n' << "{\"r\":{\"id\":\"" << id << "|2021";
  }
  {
    CentralStore store(clock, dir);
    CHECK(store.partition_size(id) == 10);
    CHECK(store.checkpoint(id)->timestamp == kT0 + minutes{9});
    BatchFile b{id, {"t"}, {{make_record_id(id, kT0 + hours{2}), {{"t", 3.0}}}}, {}};
    store.ingest(encode_batch(b));
  }
  CentralStore store(clock, dir);
  CHECK(store.partition_size(id) == 11);
}

TEST_CASE("concurrent ingest from many nodes") {
  ManualClock clock(kT0);
  CentralStore store(clock);
  std::vector<std::string> ids;
  for (int n = 0; n < 48; ++n) {
    ids.push_back(store.register_node("house" + std::to_string(n / 4 + 1)).node_id);
    store.add_sensor(ids.back(), make_spec("t", ValueKind::continuous));
  }
  std::vector<std::thread> threads;
  for (const auto& id : ids) {
    threads.emplace_back([&store, id] {
      for (int hour = 0; hour < 10; ++hour) {
        BatchFile b{id, {"t"}, {}, {}};
        for (int m = 0; m < 60; ++m) {
          b.records.push_back({make_record_id(id, kT0 + hours{hour} + minutes{m}), {{"t", 1.0 * m}}});
        }
        auto body = encode_batch(b);
        store.ingest(body);
        store.ingest(body);  // replay
        store.checkpoint(id);
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& id : ids) CHECK(store.partition_size(id) == 600);
}

TEST_CASE("direct transport maps server rejections to transport errors") {
  Fixture f;
  DirectTransport t(f.store);
  CHECK_FALSE(t.checkpoint(f.node_id));
  CHECK_THROWS_AS(t.upload("not a batch"), TransportError);
  CHECK_THROWS_AS(t.fetch_config("rpi_9"), TransportError);
  t.add_sensor(f.node_id, make_spec("co2", ValueKind::continuous));
  auto cfg = t.fetch_config(f.node_id);
  CHECK(cfg.updated);
  CHECK(cfg.sensors.size() == 4);
}
