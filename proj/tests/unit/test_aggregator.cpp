#include <catch_amalgamated.hpp>

#include <filesystem>
#include <random>

#include <json.hpp>

#include "carbon/aggregator.hpp"
#include "carbon/collector.hpp"
#include "carbon/errors.hpp"
#include "carbon/io.hpp"

using namespace carbon;
namespace fs = std::filesystem;

namespace {

const Date kDay = Date::parse("2025-06-01");

MinuteRecord rec(int meter, int phase, Timestamp minute, double power, double voltage = 230.0, double freq = 50.0,
                 double pf = 0.99) {
  MinuteRecord r;
  r.meter_id = meter;
  r.phase = phase;
  r.minute_start = minute;
  r.averages = PhaseAverages{power, voltage, power / voltage, pf, freq, power / pf};
  r.sample_count = 40;
  return r;
}

std::vector<MinuteRecord> full_minute(Timestamp minute, double power) {
  std::vector<MinuteRecord> out;
  for (int m = 1; m <= kMeterCount; ++m) {
    for (int p = 1; p <= kPhasesPerMeter; ++p) out.push_back(rec(m, p, minute, power));
  }
  return out;
}

fs::path temp_root(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("carbon-agg-" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("minute aggregation") {
  const Timestamp t = kDay.midnight() + 600;
  auto all = full_minute(t, 1000.0);
  auto agg = aggregate_minute(all);
  CHECK(agg.total_power == 24000.0);
  CHECK(agg.avg_voltage == 230.0);
  CHECK(agg.phase_count == 24);
  CHECK(agg.quality == Quality::kOk);

  std::vector<MinuteRecord> series;
  int k = 1;
  for (int m = 1; m <= kMeterCount; ++m) {
    for (int p = 1; p <= kPhasesPerMeter; ++p) series.push_back(rec(m, p, t, k++));
  }
  CHECK(aggregate_minute(series).total_power == 24.0 * 25.0 / 2.0);

  all[5].averages.reset();
  all[5].sample_count = 0;
  agg = aggregate_minute(all);
  CHECK(agg.phase_count == 23);
  CHECK(agg.quality == Quality::kPartial);
  CHECK(agg.total_power == 23000.0);

  auto dup = full_minute(t, 1.0);
  dup.push_back(rec(1, 1, t, 1.0));
  try {
    aggregate_minute(dup);
    FAIL("duplicate accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kDuplicatePhase);
  }
}

TEST_CASE("anomaly rules") {
  const AnomalyRules rules;
  const Timestamp t = kDay.midnight() + 12 * 3600;
  auto rows = full_minute(t, 1000.0);
  auto agg = aggregate_minute(rows);
  CHECK(detect_anomalies(agg, nullptr, rows, rules).empty());

  rows[7] = rec(3, 2, t, 7000.0);
  agg = aggregate_minute(rows);
  auto flags = detect_anomalies(agg, nullptr, rows, rules);
  REQUIRE(flags.size() == 1);
  CHECK(flags[0].kind == AnomalyKind::kRangePower);
  CHECK(flags[0].detail == "meter=3 phase=2 value=7000.000");

  rows = full_minute(t, 1000.0);
  rows[0] = rec(1, 1, t, 1000.0, 260.0, 51.0, 1.2);
  flags = detect_anomalies(aggregate_minute(rows), nullptr, rows, rules);
  REQUIRE(flags.size() == 3);
  CHECK(flags[0].kind == AnomalyKind::kRangeVoltage);
  CHECK(flags[1].kind == AnomalyKind::kRangeFrequency);
  CHECK(flags[2].kind == AnomalyKind::kPfBounds);

  PlantMinuteAggregate prev;
  prev.total_power = 0.0;
  PlantMinuteAggregate jump;
  jump.total_power = 90000.0;
  flags = detect_anomalies(jump, &prev, {}, rules);
  REQUIRE(flags.size() == 1);
  CHECK(flags[0].kind == AnomalyKind::kRamp);
  CHECK(flags[0].detail == "delta=90000.000");
  jump.total_power = 60000.0;
  CHECK(detect_anomalies(jump, &prev, {}, rules).empty());
}

TEST_CASE("day aggregation keeps flags reproducible from inputs") {
  std::mt19937_64 rng(5);
  std::vector<MinuteRecord> day;
  for (int minute = 600; minute < 660; ++minute) {
    const Timestamp t = kDay.midnight() + minute * 60;
    for (auto r : full_minute(t, 3000.0 + static_cast<double>(rng() % 1000))) {
      if (rng() % 50 == 0) r.averages->active_power = 6500.0;
      if (rng() % 200 == 0) {
        r.averages.reset();
        r.sample_count = 0;
      }
      day.push_back(r);
    }
  }
  const AnomalyRules rules;
  const auto result = aggregate_day(day, rules);
  REQUIRE(result.aggregates.size() == 60);
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < result.aggregates.size(); ++i) {
    const auto& agg = result.aggregates[i];
    const auto& rows = result.rows.at(agg.minute_start.seconds);
    bool violation = false;
    for (const auto& r : rows) {
      if (r.present() && r.averages->active_power > rules.phase_power_max) violation = true;
    }
    CHECK(agg.flagged() == violation);
    CHECK(agg.quality == classify_quality(agg.phase_count, agg.flagged()));
    flagged += agg.flagged();

    // Conservation at minute level.
    double sum = 0;
    for (const auto& r : rows) sum += r.present() ? r.averages->active_power : 0.0;
    CHECK(agg.total_power == Catch::Approx(sum).epsilon(1e-9));
  }
  CHECK(flagged > 0);
}

TEST_CASE("batching by five-minute windows") {
  std::vector<PlantMinuteAggregate> aggs;
  for (int i = 0; i < 7; ++i) {
    PlantMinuteAggregate a;
    a.minute_start = kDay.midnight() + i * 60;
    a.phase_count = 24;
    aggs.push_back(a);
  }
  auto plan = make_batches("farm-1", kDay, aggs);
  REQUIRE(plan.batches.size() == 2);
  CHECK(plan.batches[0].aggregates.size() == 5);
  CHECK(plan.batches[1].aggregates.size() == 2);
  CHECK(plan.batches[1].batch_id == "farm-1-20250601-001");
  CHECK(plan.batches[1].window_start == kDay.midnight() + 300);
  CHECK(plan.batches[1].window_end == kDay.midnight() + 600);
  CHECK(plan.missing_windows.size() == 286);

  CHECK(make_batches("farm-1", kDay, {}).batches.empty());

  aggs.clear();
  for (int i = 0; i < kMinutesPerDay; ++i) {
    PlantMinuteAggregate a;
    a.minute_start = kDay.midnight() + i * 60;
    aggs.push_back(a);
  }
  plan = make_batches("farm-1", kDay, aggs);
  CHECK(plan.batches.size() == 288);
  CHECK(plan.missing_windows.empty());
  for (const auto& b : plan.batches) REQUIRE(b.aggregates.size() == 5);
}

TEST_CASE("scanning collector directories") {
  const fs::path root = temp_root("scan");
  std::vector<MinuteRecord> a_rows, b_rows;
  for (const auto& r : full_minute(kDay.midnight(), 1.0)) (r.meter_id <= 4 ? a_rows : b_rows).push_back(r);
  write_day_csv(reference_collector("A", root), kDay, a_rows);

  const std::vector<std::string> ids{"A", "B"};
  auto scan = scan_new_files(root, ids);
  CHECK(scan.files.size() == 4);
  REQUIRE(scan.notices.size() == 1);
  CHECK(scan.notices[0] == "MissingCollector: B");

  write_day_csv(reference_collector("B", root), kDay, b_rows);
  scan = scan_new_files(root, ids, kDay);
  REQUIRE(scan.files.size() == 8);
  CHECK(scan.notices.empty());
  CHECK(std::is_sorted(scan.files.begin(), scan.files.end(),
                       [](const DayFile& x, const DayFile& y) { return x.path < y.path; }));
  mark_processed(scan.files);
  CHECK(scan_new_files(root, ids).files.empty());
  fs::remove_all(root);
}

TEST_CASE("quarantine file lists flagged minutes with their rows") {
  const fs::path root = temp_root("quarantine");
  auto rows = full_minute(kDay.midnight() + 36000, 1000.0);
  rows[3] = rec(2, 1, kDay.midnight() + 36000, 9000.0);
  auto clean = full_minute(kDay.midnight() + 36060, 1000.0);
  rows.insert(rows.end(), clean.begin(), clean.end());
  const auto day = aggregate_day(rows, AnomalyRules{});
  const auto path = write_quarantine_file(root, kDay, day);
  CHECK(path.filename() == "anomalies-2025-06-01.jsonl");
  const std::string text = read_file(path);
  REQUIRE(std::count(text.begin(), text.end(), '\n') == 1);
  const auto j = nlohmann::json::parse(text);
  CHECK(j.at("codes")[0].at("code") == "RANGE_POWER");
  CHECK(j.at("rows").size() == 24);
  CHECK(j.at("aggregate").at("quality") == "FLAGGED");
  fs::remove_all(root);
}
