#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "carbon/aggregator.hpp"
#include "carbon/chaincode.hpp"
#include "carbon/model.hpp"

namespace carbon {

// Stages a divergence is attributed to.
namespace stage {
inline constexpr std::string_view kChain = "chain";
inline constexpr std::string_view kInput = "input";
inline constexpr std::string_view kAggregate = "aggregate";
inline constexpr std::string_view kAnomaly = "anomaly";
inline constexpr std::string_view kBatch = "batch";
inline constexpr std::string_view kQuarantine = "quarantine";
inline constexpr std::string_view kCredit = "credit";
}  // namespace stage

struct Mismatch {
  std::string stage;
  std::string key;
  std::string expected_digest;  // "absent" when nothing was expected / found
  std::string found_digest;
  std::string detail;
  bool operator==(const Mismatch&) const = default;
};

struct QuarantineSummary {
  std::size_t flagged_minutes = 0;
  std::map<std::string, std::size_t> by_code;
};

struct CreditSummary {
  std::string serial;  // empty when the day was not accrued
  std::string state;
  double energy_kwh = 0.0;
  double co2_kg = 0.0;
  double recomputed_energy_kwh = 0.0;
  std::size_t excluded_minutes = 0;
};

struct AuditReport {
  Date first;
  Date last;
  std::string producer;
  bool chain_ok = false;
  bool replay_matches = false;
  std::vector<Mismatch> mismatches;
  QuarantineSummary quarantine;
  std::vector<CreditSummary> credits;
  std::vector<std::string> notices;  // e.g. MissingData

  bool pass() const { return chain_ok && replay_matches && mismatches.empty(); }
};

struct AuditInputs {
  std::filesystem::path collectors_root;
  std::filesystem::path ledger_dir;
  std::string producer;
  std::map<std::string, std::vector<int>> collectors;  // collector id -> meters
  AnomalyRules rules;
  ChaincodeConfig chaincode;
};

// Rebuilds the day from raw CSVs along a path separate from the pipeline
// (own parser, aggregation, rule evaluation, serializer and hashing) and
// compares the results with the chain. Never throws for data problems; they
// become mismatches or notices.
AuditReport replay_verify(const AuditInputs& inputs, const Date& date);

std::string render_report_json(const AuditReport& report);
// First line "AUDIT PASS" or "AUDIT FAIL", then one line per mismatch.
std::string render_report_text(const AuditReport& report);

// Writes audit-<date>.json and audit-<date>.txt into dir; returns the json path.
std::filesystem::path emit_report(const AuditReport& report, const std::filesystem::path& dir);

}  // namespace carbon
