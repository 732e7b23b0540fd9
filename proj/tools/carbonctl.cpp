#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "carbon/audit.hpp"
#include "carbon/canonical.hpp"
#include "carbon/chaincode.hpp"
#include "carbon/config.hpp"
#include "carbon/errors.hpp"
#include "carbon/io.hpp"
#include "carbon/ledger.hpp"
#include "carbon/pipeline.hpp"

namespace fs = std::filesystem;
using namespace carbon;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path resolve_home(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("CARBON_LEDGER_HOME"); env != nullptr && *env != '\0') return env;
  return ".carbon-ledger";
}

Date parse_date_arg(const std::string& text) {
  try {
    return Date::parse(text);
  } catch (const Error&) {
    throw UsageError("malformed date '" + text + "' (expected YYYY-MM-DD)");
  }
}

RunConfig stored_config(const HomeLayout& home) {
  if (!fs::exists(home.config_file())) {
    throw Error(Errc::kIoFailure, "no data root at " + home.root.string() + " (run simulate first)");
  }
  return load_run_config(home.config_file());
}

void print_credit(const CarbonCredit& c) {
  std::printf("%s %s energy_kwh=%.6f co2_kg=%s period=%s\n", c.serial.c_str(),
              std::string(credit_state_name(c.state)).c_str(), c.energy.energy_kwh,
              format_fixed3(c.energy.co2_kg).c_str(), c.period.to_string().c_str());
}

std::string status_text(const TxStatus& s) { return s.valid ? "VALID" : "INVALID(" + s.reason + ")"; }

int cmd_simulate(const fs::path& root, const std::string& config_path, std::optional<std::uint64_t> seed,
                 const std::string& date_text) {
  RunConfig config;
  if (!config_path.empty()) {
    try {
      config = load_run_config(config_path);
    } catch (const Error& e) {
      if (e.code() == Errc::kIoFailure) throw;
      throw UsageError(e.what());
    }
  }
  if (seed) config.apply_seed(*seed);
  if (!date_text.empty()) config.dates = {parse_date_arg(date_text)};
  try {
    config.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  Workspace ws(root, config);
  for (const Date& d : config.dates) {
    const DayRunSummary s = run_pipeline_day(ws, d);
    std::printf("%s: %zu / %zu / %zu\n", d.to_string().c_str(), s.csv_rows, s.aggregates, s.batches);
    std::printf("  flagged minutes %zu, missing windows %zu, duplicates %zu, retries %zu\n", s.flagged,
                s.missing_windows.size(), s.delivery.duplicates, s.delivery.retries);
  }
  std::printf("chain height %llu tip %s\n", static_cast<unsigned long long>(ws.ledger().height()),
              ws.ledger().tip_hash().to_hex().c_str());
  std::printf("state digest %s\n", ws.ledger().current_state_digest().to_hex().c_str());
  return kExitOk;
}

int cmd_credits(const fs::path& root, const std::string& action, const std::string& date_text,
                const std::string& serial, std::string actor) {
  auto ws = Workspace::open(root);
  const RunConfig& config = ws->config();
  CreditsClient client(ws->ledger());
  std::optional<CarbonCredit> result;

  auto need_serial = [&] {
    if (serial.empty()) throw UsageError(action + " needs --serial");
  };
  if (action == "accrue") {
    if (date_text.empty()) throw UsageError("accrue needs --date");
    if (actor.empty()) actor = config.producer_id;
    result = client.accrue_day(actor, parse_date_arg(date_text), config.emission);
  } else if (action == "verify" || action == "issue") {
    need_serial();
    if (actor.empty()) actor = config.certifier;
    result = action == "verify" ? client.verify_credit(serial, actor) : client.issue_credit(serial, actor);
  } else if (action == "sell" || action == "retire") {
    need_serial();
    if (actor.empty()) actor = config.producer_id;
    result = client.transition(serial, action == "sell" ? CreditState::kSold : CreditState::kRetired, actor);
  } else if (action == "show") {
    need_serial();
    result = client.find(serial);
    if (!result) throw Error(Errc::kNotFound, "credit " + serial);
  } else {
    throw UsageError("unknown credits action '" + action + "'");
  }
  ws->ledger().flush();
  print_credit(*result);
  return kExitOk;
}

int cmd_audit(const fs::path& root, const std::string& date_text, std::string actor) {
  const HomeLayout home{root};
  const Date date = parse_date_arg(date_text);
  const RunConfig config = stored_config(home);
  if (actor.empty()) actor = config.auditor;
  const auto members = MembershipRegistry::parse(read_file(home.ledger() / "identities.json"));
  const auto who = members.find(actor);
  if (!who) throw Error(Errc::kUnknownIdentity, "identity '" + actor + "' is not registered");
  if (who->role != Role::kAuditor) {
    throw Error(Errc::kUnauthorized, actor + " is a " + std::string(role_name(who->role)) + ", audits need an AUDITOR");
  }

  AuditInputs in;
  in.collectors_root = home.collectors();
  in.ledger_dir = home.ledger();
  in.producer = config.producer_id;
  in.collectors = config.fleet.collectors;
  in.rules = config.rules;
  in.chaincode = config.chaincode_config();
  const AuditReport report = replay_verify(in, date);
  const fs::path path = emit_report(report, home.audit());
  std::cout << render_report_text(report) << "report " << path.string() << '\n';
  return report.pass() ? kExitOk : kExitDomain;
}

int cmd_ledger(const fs::path& root, const std::string& action, const std::string& key,
               std::optional<std::uint64_t> height) {
  const HomeLayout home{root};
  if (action == "verify") {
    const ChainCheck check = verify_chain_dir(home.ledger());
    if (check.ok) {
      std::printf("chain OK\n");
      return kExitOk;
    }
    std::printf("chain INVALID");
    if (check.first_bad_height) std::printf(" at block %llu", static_cast<unsigned long long>(*check.first_bad_height));
    std::printf(": %s\n", check.detail.c_str());
    return kExitDomain;
  }

  auto ws = Workspace::open(root);
  Ledger& ledger = ws->ledger();
  if (action == "inspect") {
    for (const Block& b : ledger.blocks()) {
      if (height && b.height != *height) continue;
      std::printf("block %llu %s txs=%zu hash=%s prev=%s\n", static_cast<unsigned long long>(b.height),
                  b.timestamp.to_string().c_str(), b.transactions.size(), b.block_hash.to_hex().c_str(),
                  b.prev_hash.to_hex().c_str());
      for (const Transaction& tx : b.transactions) {
        std::printf("  #%llu %s %s by %s %s\n", static_cast<unsigned long long>(tx.sequence),
                    tx.tx_id.to_hex().substr(0, 16).c_str(), tx.function.c_str(), tx.submitter.c_str(),
                    status_text(tx.status).c_str());
      }
    }
    return kExitOk;
  }
  if (action == "history") {
    if (key.empty()) throw UsageError("ledger history needs a key");
    const auto txs = ledger.get_history(key);
    for (const Transaction& tx : txs) {
      std::printf("#%llu %s %s by %s %s\n", static_cast<unsigned long long>(tx.sequence), tx.tx_id.to_hex().c_str(),
                  tx.function.c_str(), tx.submitter.c_str(), status_text(tx.status).c_str());
    }
    std::printf("%zu transactions\n", txs.size());
    return kExitOk;
  }
  throw UsageError("unknown ledger action '" + action + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Carbon credit certification pipeline"};
  app.require_subcommand(1);
  std::string home_flag;
  app.add_option("--home", home_flag, "Data root (default: $CARBON_LEDGER_HOME or ./.carbon-ledger)");

  auto* simulate = app.add_subcommand("simulate", "Run meter-sim -> collectors -> aggregator -> ledger");
  std::string config_path, date_text;
  std::optional<std::uint64_t> seed;
  simulate->add_option("--config", config_path, "Run configuration JSON");
  simulate->add_option("--seed", seed, "Simulation seed");
  simulate->add_option("--date", date_text, "Day to simulate (YYYY-MM-DD)");

  auto* credits = app.add_subcommand("credits", "Drive the credit lifecycle");
  std::string action, serial, actor;
  credits->add_option("action", action, "accrue | verify | issue | sell | retire | show")->required();
  credits->add_option("--date", date_text, "Day to accrue");
  credits->add_option("--serial", serial, "Credit serial");
  credits->add_option("--as", actor, "Acting identity");

  auto* audit = app.add_subcommand("audit", "Replay a day from raw CSVs and compare with the chain");
  audit->add_option("--date", date_text, "Day to audit")->required();
  audit->add_option("--as", actor, "Auditor identity");

  auto* ledger = app.add_subcommand("ledger", "Inspect or verify the ledger");
  std::string ledger_action, key;
  std::optional<std::uint64_t> height;
  ledger->add_option("action", ledger_action, "verify | inspect | history")->required();
  ledger->add_option("key", key, "State key for history");
  ledger->add_option("--height", height, "Only this block (inspect)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const fs::path root = resolve_home(home_flag);
  try {
    if (simulate->parsed()) return cmd_simulate(root, config_path, seed, date_text);
    if (credits->parsed()) return cmd_credits(root, action, date_text, serial, actor);
    if (audit->parsed()) return cmd_audit(root, date_text, actor);
    if (ledger->parsed()) return cmd_ledger(root, ledger_action, key, height);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitDomain;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitDomain;
  }
  return kExitUsage;
}
