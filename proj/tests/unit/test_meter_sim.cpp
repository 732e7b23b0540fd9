#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <tuple>

#include "carbon/errors.hpp"
#include "carbon/meter_sim.hpp"

using namespace carbon;

namespace {

const Date kDay = Date::parse("2025-06-01");

FleetConfig short_fleet(std::uint64_t seed, std::int64_t begin, std::int64_t end) {
  FleetConfig f;
  f.seed = seed;
  f.begin_second = begin;
  f.end_second = end;
  return f;
}

}  // namespace

TEST_CASE("clear-sky profile shape") {
  const SolarProfile p;
  const double noon = (p.sunrise + p.sunset) / 2.0;
  CHECK(clear_sky_power(noon, p) == Catch::Approx(p.peak_plant_power));
  CHECK(clear_sky_power(p.sunrise, p) == 0.0);
  CHECK(clear_sky_power(3 * 3600, p) == 0.0);
  const double quarter = p.sunrise + (p.sunset - p.sunrise) / 6.0;
  CHECK(clear_sky_power(quarter, p) == Catch::Approx(p.peak_plant_power * std::sin(std::numbers::pi / 6.0)));
}

TEST_CASE("meter sampling is deterministic and physical") {
  const FleetConfig f = short_fleet(5, 0, 10);
  const Timestamp t = kDay.midnight() + 12 * 3600;
  const auto a = sample_meter(3, t, f);
  const auto b = sample_meter(3, t, f);
  CHECK(a == b);
  FleetConfig other = f;
  other.seed = 6;
  CHECK(sample_meter(3, t, other)[0].active_power != a[0].active_power);

  for (const auto& r : a) {
    CHECK(r.meter_id == 3);
    CHECK(reading_is_consistent(r));
    CHECK(r.active_power > 0.0);
    CHECK(r.voltage > 220.0);
    CHECK(r.voltage < 240.0);
    CHECK(r.current == Catch::Approx(r.apparent_power / r.voltage));
    CHECK(r.frequency == a[0].frequency);
  }
  // Grid frequency is common to all meters at an instant.
  CHECK(sample_meter(7, t, f)[1].frequency == a[0].frequency);

  CHECK_THROWS_AS(sample_meter(0, t, f), Error);
  try {
    sample_meter(9, t, f);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kInvalidMeter);
  }
}

TEST_CASE("zero-noise meter at noon reports its exact share") {
  FleetConfig f;
  f.profile.noise_stddev_fraction = 0.0;
  f.accuracy_fraction = 0.0;
  const Timestamp noon = kDay.midnight() + 13 * 3600;
  for (const auto& r : sample_meter(1, noon, f)) CHECK(r.active_power == Catch::Approx(90000.0 / 24));
}

TEST_CASE("plant output never exceeds nameplate at the default profile") {
  const FleetConfig f;
  for (std::int64_t s = 12 * 3600; s < 14 * 3600; s += 37) {
    double total = 0.0;
    for (int m = 1; m <= kMeterCount; ++m) {
      for (const auto& r : sample_meter(m, kDay.midnight() + s, f)) total += r.active_power;
    }
    REQUIRE(total <= f.plant_capacity_watts);
  }
}

TEST_CASE("fault-free transport delivers every reading once, in time order") {
  const FleetConfig f = short_fleet(9, 0, 600);
  DeliveryStats stats;
  const auto msgs = collect_day(f, kDay, FaultConfig{}, &stats);
  CHECK(stats.generated == msgs.size());
  CHECK(stats.delivered == msgs.size());
  CHECK(stats.duplicates == 0);

  std::map<int, std::set<std::int64_t>> per_meter;
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    if (i > 0) REQUIRE(msgs[i - 1].delivered_at <= msgs[i].delivered_at);
    REQUIRE(msgs[i].delivered_at == msgs[i].reading.ts);
    per_meter[msgs[i].reading.meter_id].insert(msgs[i].reading.ts.seconds);
  }
  REQUIRE(per_meter.size() == 8);
  for (const auto& [meter, times] : per_meter) {
    // Period is 1 or 2 s, so every minute holds 30..60 samples.
    CHECK(times.size() >= 300);
    CHECK(times.size() <= 600);
    std::int64_t prev = -1;
    for (auto t : times) {
      const auto gap = prev < 0 ? 1 : t - prev;
      REQUIRE((gap == 1 || gap == 2));
      prev = t;
    }
  }
}

TEST_CASE("faulty transport is at-least-once with bounded jitter") {
  const FleetConfig f = short_fleet(9, 0, 900);
  FaultConfig faults;
  faults.duplicate_probability = 0.1;
  faults.drop_then_retry_probability = 0.05;
  faults.reorder_jitter_max = 20;
  faults.rng_seed = 77;
  DeliveryStats stats;
  const auto msgs = collect_day(f, kDay, faults, &stats);
  const auto clean = collect_day(f, kDay, FaultConfig{});

  std::set<std::tuple<int, int, std::int64_t>> clean_ids, seen;
  for (const auto& m : clean) clean_ids.insert({m.reading.meter_id, m.reading.phase, m.reading.ts.seconds});
  std::size_t out_of_order = 0;
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    const auto& m = msgs[i];
    REQUIRE(m.delivered_at >= m.reading.ts);
    REQUIRE(m.delivered_at - m.reading.ts <= 20);
    seen.insert({m.reading.meter_id, m.reading.phase, m.reading.ts.seconds});
    if (i > 0 && m.reading.ts < msgs[i - 1].reading.ts) ++out_of_order;
  }
  CHECK(seen == clean_ids);
  CHECK(msgs.size() == clean.size() + stats.duplicates);
  CHECK(out_of_order > 0);
  const double dup_rate = static_cast<double>(stats.duplicates) / static_cast<double>(stats.generated);
  CHECK(dup_rate > 0.08);
  CHECK(dup_rate < 0.12);
  CHECK(stats.retries > 0);
}

TEST_CASE("configuration validation") {
  FaultConfig bad;
  bad.reorder_jitter_max = 31;
  CHECK_THROWS_AS(bad.validate(), Error);
  FleetConfig f;
  f.collectors = {{"A", {1, 2}}, {"B", {2, 3}}};
  CHECK_THROWS_AS(f.validate(), Error);
  FleetConfig hot;
  hot.profile.peak_plant_power = 150000;
  CHECK_THROWS_AS(hot.validate(), Error);
}
