#include <catch_amalgamated.hpp>

#include <random>

#include "carbon/audit.hpp"
#include "carbon/errors.hpp"
#include "carbon/io.hpp"
#include "support/workspace.hpp"

using namespace carbon;
namespace fs = std::filesystem;

namespace {

const Date kDay = Date::parse("2025-06-01");

bool has_stage(const AuditReport& r, std::string_view stage) {
  return std::any_of(r.mismatches.begin(), r.mismatches.end(), [&](const Mismatch& m) { return m.stage == stage; });
}

struct AuditedDay {
  fs::path home;
  std::unique_ptr<Workspace> ws;

  explicit AuditedDay(const std::string& name) : home(fixture::fresh_dir(name)) {
    RunConfig config;
    config.apply_seed(17);
    config.fleet.begin_second = 10 * 3600;
    config.fleet.end_second = 11 * 3600;
    ws = std::make_unique<Workspace>(home, config);
    run_pipeline_day(*ws, kDay);
    CreditsClient(ws->ledger()).accrue_day("farm-1", kDay, config.emission);
    ws->ledger().flush();
  }
  ~AuditedDay() { fs::remove_all(home); }

  AuditReport audit() const { return replay_verify(fixture::audit_inputs(*ws), kDay); }
};

}  // namespace

TEST_CASE("clean day passes and the report is stable") {
  AuditedDay day("audit-clean");
  const AuditReport r = day.audit();
  CHECK(r.chain_ok);
  CHECK(r.replay_matches);
  CHECK(r.mismatches.empty());
  REQUIRE(r.credits.size() == 1);
  CHECK(r.credits[0].energy_kwh == Catch::Approx(r.credits[0].recomputed_energy_kwh).epsilon(1e-9));

  const fs::path out = day.home / "audit";
  emit_report(r, out);
  const std::string json1 = read_file(out / "audit-2025-06-01.json");
  const std::string text1 = read_file(out / "audit-2025-06-01.txt");
  CHECK(text1.rfind("AUDIT PASS\n", 0) == 0);
  emit_report(day.audit(), out);
  CHECK(read_file(out / "audit-2025-06-01.json") == json1);
  CHECK(read_file(out / "audit-2025-06-01.txt") == text1);
}

TEST_CASE("edited csv power value is attributed to the aggregate") {
  AuditedDay day("audit-csv");
  const fs::path csv = day.home / "collectors" / "A" / "2025-06-01" / "SEM2.csv";
  std::string text = read_file(csv);
  const std::size_t row = text.find("2025-06-01T10:30:00Z,2,1,");
  REQUIRE(row != std::string::npos);
  const std::size_t field = row + std::string("2025-06-01T10:30:00Z,2,1,").size();
  text[field] = text[field] == '9' ? '1' : static_cast<char>(text[field] + 1);
  write_file_atomic(csv, text);

  const AuditReport r = day.audit();
  CHECK_FALSE(r.pass());
  CHECK(r.chain_ok);
  CHECK_FALSE(r.replay_matches);
  CHECK(has_stage(r, stage::kInput));
  CHECK(has_stage(r, stage::kAggregate));
  const auto it = std::find_if(r.mismatches.begin(), r.mismatches.end(),
                               [](const Mismatch& m) { return m.stage == stage::kAggregate; });
  CHECK(it->key == "batch/farm-1/farm-1-20250601-126");

  const std::string txt = render_report_text(r);
  CHECK(txt.rfind("AUDIT FAIL\n", 0) == 0);
  const auto lines = std::count(txt.begin(), txt.end(), '\n');
  const auto items = static_cast<long>(r.mismatches.size());
  CHECK(std::count_if(r.mismatches.begin(), r.mismatches.end(), [&](const Mismatch& m) {
          return txt.find("stage=" + m.stage + " key=" + m.key) != std::string::npos;
        }) == items);
  CHECK(lines >= items + 1);
}

TEST_CASE("missing csv is reported as missing data") {
  AuditedDay day("audit-missing");
  fs::remove(day.home / "collectors" / "B" / "2025-06-01" / "SEM7.csv");
  const AuditReport r = day.audit();
  CHECK_FALSE(r.pass());
  CHECK(std::any_of(r.notices.begin(), r.notices.end(),
                    [](const std::string& n) { return n.rfind("MissingData: 2025-06-01", 0) == 0; }));
}

TEST_CASE("flipped block byte fails the chain check") {
  AuditedDay day("audit-block");
  const fs::path block = day.home / "ledger" / "blocks" / "1.json";
  std::string text = read_file(block);
  const std::size_t pos = text.find("total_power");
  REQUIRE(pos != std::string::npos);
  text[pos + 20] = text[pos + 20] == '1' ? '2' : '1';
  write_file_atomic(block, text);
  const AuditReport r = day.audit();
  CHECK_FALSE(r.chain_ok);
  CHECK_FALSE(r.pass());
  REQUIRE(!r.mismatches.empty());
  CHECK(r.mismatches[0].stage == "chain");
  CHECK(r.mismatches[0].key == "block/1");
}

TEST_CASE("csv tampering that preserves totals is still caught") {
  AuditedDay day("audit-subtle");
  const fs::path csv = day.home / "collectors" / "B" / "2025-06-01" / "SEM5.csv";
  std::string text = read_file(csv);
  // Change only the sample_count of a present row.
  const std::size_t row = text.find("2025-06-01T10:10:00Z,5,3,");
  const std::size_t eol = text.find('\n', row);
  const std::size_t comma = text.rfind(',', eol);
  text.replace(comma + 1, eol - comma - 1, "17");
  write_file_atomic(csv, text);
  const AuditReport r = day.audit();
  CHECK_FALSE(r.pass());
  CHECK(has_stage(r, stage::kInput));
  CHECK_FALSE(has_stage(r, stage::kAggregate));
}
