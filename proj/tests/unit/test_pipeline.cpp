#include <catch_amalgamated.hpp>

#include "carbon/errors.hpp"
#include "carbon/io.hpp"
#include "carbon/pipeline.hpp"
#include "support/workspace.hpp"

using namespace carbon;
namespace fs = std::filesystem;

namespace {

const Date kDay = Date::parse("2025-06-01");

}  // namespace

TEST_CASE("run configuration parsing") {
  const RunConfig c = parse_run_config(R"({"seed": 9, "date": "2025-07-04", "faults": {"duplicate_probability": 0.1},
      "fleet": {"spikes": [{"meter_id": 2, "phase": 3, "minute_of_day": 700, "active_power": 7000}]}})");
  CHECK(c.seed == 9);
  CHECK(c.fleet.seed == 9);
  CHECK(c.dates == std::vector<Date>{Date::parse("2025-07-04")});
  CHECK(c.faults.duplicate_probability == 0.1);
  REQUIRE(c.fleet.spikes.size() == 1);
  CHECK(c.fleet.spikes[0].minute_of_day == 700);

  const RunConfig back = parse_run_config(serialize_run_config(c));
  CHECK(serialize_run_config(back) == serialize_run_config(c));

  for (const char* bad : {R"({"date": "2025-13-01"})", R"({"sed": 1})", R"({"fleet": {"peak": 1}})",
                          R"({"seed": "x"})", "{"}) {
    try {
      parse_run_config(bad);
      FAIL("accepted " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kParse);
    }
  }
  RunConfig jittery;
  jittery.faults.reorder_jitter_max = 30;
  jittery.watermark_seconds = 10;
  CHECK_THROWS_AS(jittery.validate(), Error);
}

TEST_CASE("one simulated day end to end") {
  const fs::path home = fixture::fresh_dir("pipeline");
  RunConfig config;
  config.apply_seed(3);
  Workspace ws(home, config);
  const DayRunSummary s = run_pipeline_day(ws, kDay);
  CHECK(s.csv_rows == 34560);
  CHECK(s.aggregates == 1440);
  CHECK(s.batches == 288);
  CHECK(s.flagged == 0);
  CHECK(s.missing_windows.empty());

  CHECK(ws.ledger().scan_state("batch/farm-1/").size() == 288);
  CHECK(ws.ledger().query_state("manifest/farm-1/2025-06-01"));
  CHECK(verify_chain_dir(home / "ledger").ok);
  CHECK(fs::exists(home / "aggregator" / "anomalies-2025-06-01.jsonl"));
  CHECK(read_file(home / "collectors" / "A" / "2025-06-01" / ".processed") ==
        "SEM1.csv\nSEM2.csv\nSEM3.csv\nSEM4.csv\n");

  try {
    run_pipeline_day(ws, kDay);
    FAIL("day accepted twice");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kRejected);
  }

  const auto reopened = Workspace::open(home);
  CHECK(reopened->ledger().tip_hash() == ws.ledger().tip_hash());
  CHECK(reopened->config().seed == 3);
  fs::remove_all(home);
}

TEST_CASE("runs are deterministic in the seed") {
  RunConfig config;
  config.apply_seed(12);
  config.fleet.begin_second = 11 * 3600;
  config.fleet.end_second = 12 * 3600;
  Hash256 tips[3];
  for (int i = 0; i < 3; ++i) {
    if (i == 2) config.apply_seed(13);
    const fs::path home = fixture::fresh_dir("determinism-" + std::to_string(i));
    Workspace ws(home, config);
    const auto s = run_pipeline_day(ws, kDay);
    CHECK(s.aggregates == 60);
    CHECK(s.batches == 12);
    CHECK(s.missing_windows.size() == 276);
    tips[i] = ws.ledger().tip_hash();
    fs::remove_all(home);
  }
  CHECK(tips[0] == tips[1]);
  CHECK(tips[0] != tips[2]);
}

TEST_CASE("injected spike is flagged, quarantined and excluded") {
  const fs::path home = fixture::fresh_dir("spike");
  RunConfig config;
  config.fleet.spikes = {{3, 2, 720, 7000.0}};
  Workspace ws(home, config);
  const auto s = run_pipeline_day(ws, kDay);
  CHECK(s.flagged == 1);
  const auto q = ws.ledger().query_state("quarantine/2025-06-01/12:00");
  REQUIRE(q);
  CHECK(q->find("meter=3 phase=2 value=7000.000") != std::string::npos);
  CHECK(ws.ledger().get_history("quarantine/2025-06-01/12:00").size() == 1);

  CreditsClient client(ws.ledger());
  const auto credit = client.accrue_day("farm-1", kDay, config.emission);
  ws.ledger().flush();
  CHECK(credit.energy.duration_min == 1439.0);
  REQUIRE(credit.exclusions.size() == 1);
  CHECK(credit.exclusions[0].codes == std::vector<std::string>{"RANGE_POWER"});

  const auto report = replay_verify(fixture::audit_inputs(ws), kDay);
  CHECK(report.pass());
  CHECK(report.quarantine.flagged_minutes == 1);
  fs::remove_all(home);
}
