#include <doctest.h>

#include <algorithm>

#include "bdl/core/batch_codec.hpp"
#include "bdl/core/json.hpp"
#include "bdl/core/record_id.hpp"
#include "bdl/core/validate.hpp"
#include "generators.hpp"

using namespace bdl;
using namespace std::chrono;

namespace {

Timestamp utc(int y, unsigned mo, unsigned d, int h = 0, int mi = 0, int s = 0) {
  return sys_days{year{y} / mo / d} + hours{h} + minutes{mi} + seconds{s};
}

SensorSpec spec(std::string name, ValueKind kind, InterfaceType type = InterfaceType::custom_code, int channel = 4) {
  SensorSpec s;
  s.name = s.sensor_id = std::move(name);
  s.value_kind = kind;
  s.interface_type = type;
  s.channel = channel;
  return s;
}

NodeDescriptor node_with(std::vector<SensorSpec> sensors) {
  NodeDescriptor n;
  n.node_id = "rpi_1";
  n.sensors = std::move(sensors);
  return n;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("record id canonical form") {
  CHECK(make_record_id("rpi_10", utc(2021, 8, 1, 14, 30, 0)).str() == "rpi_10|20210801T143000Z");
  CHECK(make_record_id("rpi_1", Timestamp{}).str() == "rpi_1|19700101T000000Z");
}

TEST_CASE("record id rejects bad node ids and sub-second instants") {
  CHECK_THROWS_AS(make_record_id("", Timestamp{}), ValidationError);
  CHECK_THROWS_AS(make_record_id("a|b", Timestamp{}), ValidationError);
  CHECK_THROWS_AS(make_record_id("a\nb", Timestamp{}), ValidationError);
  CHECK_THROWS_AS(make_record_id("a,b", Timestamp{}), ValidationError);
  CHECK_THROWS_AS(make_record_id("rpi_1", sys_time<milliseconds>{milliseconds{1500}}), ValidationError);
  CHECK(make_record_id("rpi_1", sys_time<milliseconds>{milliseconds{2000}}).timestamp == Timestamp{seconds{2}});
}

TEST_CASE("record id parse rejects malformed text") {
  CHECK_THROWS_AS(parse_record_id("rpi_1"), ValidationError);
  CHECK_THROWS_AS(parse_record_id("rpi_1|20210801T143000"), ValidationError);
  CHECK_THROWS_AS(parse_record_id("rpi_1|20211301T143000Z"), ValidationError);
  CHECK_THROWS_AS(parse_record_id("rpi_1|20210801T143000.5Z"), ValidationError);
  CHECK_THROWS_AS(parse_record_id("|20210801T143000Z"), ValidationError);
}

TEST_CASE("record id round-trips over 1000 seeded inputs") {
  testing::Rng rng(20210801);
  for (int i = 0; i < 1000; ++i) {
    auto node = testing::random_node_id(rng);
    auto ts = testing::random_timestamp(rng);
    auto id = make_record_id(node, ts);
    auto back = parse_record_id(id.str());
    REQUIRE(back.node_id == node);
    REQUIRE(back.timestamp == ts);
  }
}

TEST_CASE("same-node ids order by timestamp") {
  auto a = make_record_id("rpi_1", utc(2021, 1, 1));
  auto b = make_record_id("rpi_1", utc(2021, 1, 1, 0, 1));
  CHECK(a < b);
  CHECK(a != b);
  CHECK(a == make_record_id("rpi_1", utc(2021, 1, 1)));
}

TEST_CASE("sensor spec checks") {
  CHECK_NOTHROW(check_sensor_spec(spec("light", ValueKind::continuous, InterfaceType::direct_input, 7)));
  CHECK_THROWS_AS(check_sensor_spec(spec("light", ValueKind::continuous, InterfaceType::direct_input, 8)),
                  ValidationError);
  CHECK_THROWS_AS(check_sensor_spec(spec("a,b", ValueKind::binary)), ValidationError);
  CHECK_THROWS_AS(check_sensor_spec(spec("timestamp", ValueKind::binary)), ValidationError);
  CHECK_THROWS_AS(check_sensor_spec(spec("flame", ValueKind::binary, InterfaceType::direct_input, 40)),
                  ValidationError);
}

TEST_CASE("validate_record") {
  auto node = node_with({spec("temperature", ValueKind::continuous), spec("humidity", ValueKind::continuous),
                         spec("flame", ValueKind::binary), spec("sound", ValueKind::event_count)});
  auto id = make_record_id("rpi_1", utc(2021, 8, 1));
  Record ok{id, {{"temperature", 26.5}, {"humidity", 40.0}, {"flame", 0.0}, {"sound", 3.0}}};

  SUBCASE("exact key match accepted") {
    auto two = node_with({spec("temperature", ValueKind::continuous), spec("humidity", ValueKind::continuous)});
    CHECK_FALSE(validate_record(Record{id, {{"temperature", 26.5}, {"humidity", 40.0}}}, two));
    CHECK_FALSE(validate_record(ok, node));
  }
  SUBCASE("absent readings are allowed") {
    auto r = ok;
    r.readings["temperature"] = std::nullopt;
    CHECK_FALSE(validate_record(r, node));
  }
  SUBCASE("binary out of range") {
    auto r = ok;
    r.readings["flame"] = 2.0;
    auto why = validate_record(r, node);
    REQUIRE(why);
    CHECK(why->find("flame") != std::string::npos);
  }
  SUBCASE("missing key") {
    auto r = ok;
    r.readings.erase("humidity");
    CHECK(validate_record(r, node));
  }
  SUBCASE("unknown key") {
    auto r = ok;
    r.readings["co2"] = 400.0;
    CHECK(validate_record(r, node));
  }
  SUBCASE("inactive sensor counts as unknown") {
    auto n = node;
    n.sensors[3].active = false;
    CHECK(validate_record(ok, n));
    auto r = ok;
    r.readings.erase("sound");
    CHECK_FALSE(validate_record(r, n));
  }
  SUBCASE("non-finite continuous and fractional counts") {
    auto r = ok;
    r.readings["temperature"] = std::numeric_limits<double>::infinity();
    CHECK(validate_record(r, node));
    r = ok;
    r.readings["sound"] = 1.5;
    CHECK(validate_record(r, node));
    r.readings["sound"] = -1.0;
    CHECK(validate_record(r, node));
  }
  SUBCASE("foreign node") {
    auto r = ok;
    r.id.node_id = "rpi_2";
    CHECK(validate_record(r, node));
  }
  SUBCASE("pure") { CHECK(validate_record(ok, node) == validate_record(ok, node)); }
}

TEST_CASE("encode exact bytes") {
  BatchFile b;
  b.node_id = "rpi_10";
  b.columns = {"temperature", "light"};
  b.records.push_back({make_record_id("rpi_10", utc(2021, 8, 1, 14, 30)), {{"temperature", 26.5}, {"light", 0.0}}});
  b.records.push_back(
      {make_record_id("rpi_10", utc(2021, 8, 1, 14, 31)), {{"temperature", std::nullopt}, {"light", 1.0}}});
  CHECK(encode_batch(b) ==
        "id,node_id,timestamp,temperature,light\n"
        "rpi_10|20210801T143000Z,rpi_10,20210801T143000Z,26.5,0\n"
        "rpi_10|20210801T143100Z,rpi_10,20210801T143100Z,,1\n");

  b.errors.push_back(sensor_fault("rpi_10", utc(2021, 8, 1, 14, 31), "temperature", "checksum, mismatch"));
  b.errors.push_back(transport_fault("rpi_10", utc(2021, 8, 1, 15), "server unavailable"));
  CHECK(encode_batch(b) ==
        "id,node_id,timestamp,temperature,light\n"
        "rpi_10|20210801T143000Z,rpi_10,20210801T143000Z,26.5,0\n"
        "rpi_10|20210801T143100Z,rpi_10,20210801T143100Z,,1\n"
        "#errors\n"
        "node_id,timestamp,category,sensor,message\n"
        "rpi_10,20210801T143100Z,sensor_fault,temperature,checksum  mismatch\n"
        "rpi_10,20210801T150000Z,transport_fault,,server unavailable\n");
}

TEST_CASE("empty batch is header only") {
  BatchFile b;
  b.node_id = "rpi_1";
  b.columns = {"temperature"};
  auto text = encode_batch(b);
  CHECK(text == "id,node_id,timestamp,temperature\n");
  auto back = decode_batch(text);
  CHECK(back.records.empty());
  CHECK(back.columns == b.columns);
}

TEST_CASE("hourly batch of 60 records has 61 lines") {
  BatchFile b;
  b.node_id = "rpi_1";
  b.columns = {"temperature"};
  for (int i = 0; i < 60; ++i) {
    b.records.push_back({make_record_id("rpi_1", utc(2021, 8, 1) + minutes{i}), {{"temperature", 20.0 + i * 0.1}}});
  }
  auto text = encode_batch(b);
  CHECK(count_lines(text) == 61);
  auto back = decode_batch(text);
  REQUIRE(back.records.size() == 60);
  for (std::size_t i = 1; i < back.records.size(); ++i) {
    CHECK(back.records[i - 1].id.timestamp + seconds{60} == back.records[i].id.timestamp);
  }
}

TEST_CASE("encode rejects batches that break invariants") {
  BatchFile b;
  b.node_id = "rpi_1";
  b.columns = {"t"};
  auto r1 = Record{make_record_id("rpi_1", utc(2021, 1, 1, 0, 1)), {{"t", 1.0}}};
  auto r0 = Record{make_record_id("rpi_1", utc(2021, 1, 1, 0, 0)), {{"t", 1.0}}};
  b.records = {r1, r0};
  CHECK_THROWS_AS(encode_batch(b), ValidationError);
  b.records = {r1, r1};
  CHECK_THROWS_AS(encode_batch(b), ValidationError);
  b.records = {Record{make_record_id("rpi_1", utc(2021, 1, 1)), {{"u", 1.0}}}};
  CHECK_THROWS_AS(encode_batch(b), ValidationError);
  b.records = {Record{make_record_id("rpi_2", utc(2021, 1, 1)), {{"t", 1.0}}}};
  CHECK_THROWS_AS(encode_batch(b), ValidationError);
  b.records = {Record{make_record_id("rpi_1", utc(2021, 1, 1)), {{"t", std::nan("")}}}};
  CHECK_THROWS_AS(encode_batch(b), ValidationError);
}

TEST_CASE("decode reports the offending line") {
  auto line_of = [](std::string_view text) -> std::size_t {
    try {
      decode_batch(text);
    } catch (const CodecError& e) {
      return e.line();
    }
    return 0;
  };
  const std::string header = "id,node_id,timestamp,t\n";
  const std::string row0 = "n|20210101T000000Z,n,20210101T000000Z,1\n";
  const std::string row1 = "n|20210101T000100Z,n,20210101T000100Z,2\n";

  CHECK(line_of("") == 1);
  CHECK(line_of("id,node,timestamp,t\n") == 1);
  CHECK(line_of(header + row0 + "n|20210101T000100Z,n,20210101T000100Z\n") == 3);
  CHECK(line_of(header + row1 + row0) == 3);
  CHECK(line_of(header + row0 + row0) == 3);
  CHECK(line_of(header + row0 + row1 + "n|20210101T000200Z,n,20210101T000200Z,abc\n") == 4);
  CHECK(line_of(header + "n|20210101T000000Z,m,20210101T000000Z,1\n") == 2);
  CHECK(line_of(header + "n|20210101T000000Z,n,20210101T000001Z,1\n") == 2);
  CHECK(line_of(header + row0 + "m|20210101T000100Z,m,20210101T000100Z,1\n") == 3);
  CHECK(line_of(header + row0 + "#errors\nbogus\n") == 4);
  CHECK(line_of(header + row0 + "#errors\n" + std::string(kErrorHeader) + "\nn,20210101T000000Z,sensor_fault,,x\n") == 5);
  CHECK(line_of(header + row0 + "\n" + row1) == 3);
  CHECK(line_of(header + row0 + "n|20210101T000100Z,n,20210101T000100Z,inf\n") == 3);
  CHECK(line_of(header + row0 + row1) == 0);
}

TEST_CASE("decode(encode(b)) == b over 500 seeded batches") {
  testing::Rng rng(500);
  std::size_t absent = 0;
  for (int i = 0; i < 500; ++i) {
    auto b = testing::random_batch(rng);
    for (const auto& r : b.records) {
      for (const auto& [k, v] : r.readings) absent += !v;
    }
    auto back = decode_batch(encode_batch(b));
    REQUIRE(back == b);
  }
  CHECK(absent > 0);
}

TEST_CASE("error log export format round-trips") {
  std::vector<ErrorLogEntry> entries{sensor_fault("rpi_1", utc(2021, 1, 1), "sound", "gpio read failed"),
                                     transport_fault("rpi_1", utc(2021, 1, 1, 1), "timeout")};
  auto text = encode_error_log(entries);
  CHECK(text.starts_with("node_id,timestamp,category,sensor,message\n"));
  CHECK(decode_error_log(text) == entries);
  CHECK(encode_error_log({}) == "node_id,timestamp,category,sensor,message\n");
}

TEST_CASE("json round-trip of registry and records") {
  NodeDescriptor n = node_with({spec("temperature", ValueKind::continuous), spec("flame", ValueKind::binary)});
  n.label = "house3/kitchen";
  n.updated = true;
  n.created_at = utc(2021, 8, 1);
  nlohmann::json j = n;
  CHECK(j.get<NodeDescriptor>() == n);

  Record r{make_record_id("rpi_1", utc(2021, 8, 1)), {{"temperature", 0.1}, {"flame", std::nullopt}}};
  nlohmann::json jr = r;
  CHECK(jr.get<Record>() == r);

  IngestReport rep{3, 2, {{4, "bad"}}, 1};
  nlohmann::json jp = rep;
  CHECK(jp.get<IngestReport>() == rep);
}
