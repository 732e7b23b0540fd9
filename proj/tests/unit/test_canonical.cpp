#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include <json.hpp>

#include "carbon/canonical.hpp"
#include "carbon/errors.hpp"

using namespace carbon;

namespace {

Batch sample_batch() {
  Batch b;
  b.producer_id = "farm-1";
  b.window_start = Timestamp::parse("2025-06-01T10:00:00Z");
  b.window_end = b.window_start + 300;
  b.batch_id = make_batch_id(b.producer_id, Date::parse("2025-06-01"), 120);
  for (int i = 0; i < 5; ++i) {
    PlantMinuteAggregate a;
    a.minute_start = b.window_start + i * 60;
    a.total_power = 24000.0 + i * 1.25;
    a.avg_voltage = 230.0;
    a.avg_frequency = 50.0;
    a.phase_count = 24;
    b.aggregates.push_back(a);
  }
  b.aggregates[2].flags = {{AnomalyKind::kRangePower, "meter=3 phase=2 value=7000.000"}};
  b.aggregates[2].quality = Quality::kFlagged;
  return b;
}

}  // namespace

TEST_CASE("fixed three-decimal rendering") {
  CHECK(format_fixed3(1.0) == "1.000");
  CHECK(format_fixed3(-0.0) == "0.000");
  CHECK(format_fixed3(-0.0004) == "0.000");
  CHECK(format_fixed3(4166.6666) == "4166.667");
  CHECK(round3(0.12345) == 0.123);
}

TEST_CASE("batch id format") {
  CHECK(make_batch_id("farm-1", Date::parse("2025-06-01"), 7) == "farm-1-20250601-007");
}

TEST_CASE("canonical batch bytes") {
  const Batch b = sample_batch();
  const std::string bytes = canonical_serialize(b);

  // Independent reading of the same bytes.
  const auto doc = nlohmann::json::parse(bytes);
  CHECK(doc.dump() != "");
  CHECK(doc.at("batch_id") == "farm-1-20250601-120");
  CHECK(doc.at("schema_version") == 1);
  CHECK(doc.at("aggregates").size() == 5);
  CHECK(doc.at("aggregates")[2].at("flags")[0].at("code") == "RANGE_POWER");
  CHECK(bytes.find("\"total_power\":24001.250") != std::string::npos);
  CHECK(bytes.rfind("{\"aggregates\":[{\"avg_frequency\":50.000,\"avg_voltage\":230.000,\"flags\":[]", 0) == 0);
  CHECK(bytes.ends_with(
        "\"schema_version\":1,\"window_end\":\"2025-06-01T10:05:00Z\",\"window_start\":\"2025-06-01T10:00:00Z\"}"));

  CHECK(parse_canonical_batch(bytes) == b);
}

TEST_CASE("serialization ignores aggregate order") {
  Batch b = sample_batch();
  const std::string ref = canonical_serialize(b);
  std::mt19937 rng(3);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(b.aggregates.begin(), b.aggregates.end(), rng);
    CHECK(canonical_serialize(b) == ref);
  }
}

TEST_CASE("parser rejects non-canonical or incomplete input") {
  const std::string bytes = canonical_serialize(sample_batch());
  auto expect_parse_error = [](const std::string& text) {
    try {
      parse_canonical_batch(text);
      FAIL("accepted: " << text.substr(0, 80));
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kParse);
    }
  };
  expect_parse_error(bytes + " ");
  expect_parse_error("{}");
  expect_parse_error("not json");
  std::string reals = bytes;
  reals.replace(reals.find("230.000"), 7, "230.0");
  expect_parse_error(reals);

  auto doc = nlohmann::json::parse(bytes);
  doc.erase("producer_id");
  try {
    parse_canonical_batch(doc.dump());
    FAIL("missing field accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("producer_id") != std::string::npos);
  }
  auto extra = nlohmann::json::parse(bytes);
  extra["zzz"] = 1;
  expect_parse_error(extra.dump());
}

TEST_CASE("quality classification") {
  CHECK(classify_quality(24, false) == Quality::kOk);
  CHECK(classify_quality(23, false) == Quality::kPartial);
  CHECK(classify_quality(24, true) == Quality::kFlagged);
  CHECK(classify_quality(10, true) == Quality::kFlagged);
}
