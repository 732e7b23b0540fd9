#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "carbon/hash.hpp"
#include "carbon/ledger.hpp"
#include "carbon/model.hpp"

namespace carbon {

struct AnomalyRules {
  double phase_power_min = -200.0;
  double phase_power_max = 6'000.0;
  double voltage_min = 207.0;
  double voltage_max = 253.0;
  double frequency_min = 49.5;
  double frequency_max = 50.5;
  double max_ramp_watts_per_minute = 60'000.0;

  void validate() const;  // throws Error(kInvalidArgument)
};

struct DayFile {
  std::string collector_id;
  Date date;
  std::filesystem::path path;
};

struct ScanResult {
  std::vector<DayFile> files;         // path-sorted
  std::vector<std::string> notices;   // "MissingCollector: <id>"
  std::vector<std::string> errors;    // unreadable paths
};

inline constexpr std::string_view kProcessedMarker = ".processed";

// Unprocessed SEM*.csv files under <root>/<collector>/<YYYY-MM-DD>/. With a
// date, only that day is scanned and a missing day directory is a notice.
ScanResult scan_new_files(const std::filesystem::path& collectors_root, std::span<const std::string> collector_ids,
                          std::optional<Date> date = std::nullopt);

// Records the files in the .processed marker of their day directory.
void mark_processed(std::span<const DayFile> files);

// Fuses one minute's per-phase records. Absent records are skipped; values
// are rounded to the 3-decimal wire precision. Throws Error(kDuplicatePhase)
// or Error(kInvalidArgument) for mixed minutes.
PlantMinuteAggregate aggregate_minute(std::span<const MinuteRecord> records);

// Flags sorted; the aggregate itself is left untouched.
std::vector<AnomalyCode> detect_anomalies(const PlantMinuteAggregate& agg, const PlantMinuteAggregate* prev,
                                          std::span<const MinuteRecord> records, const AnomalyRules& rules);

struct DayAggregation {
  std::vector<PlantMinuteAggregate> aggregates;                 // minute order, flags and quality final
  std::map<std::int64_t, std::vector<MinuteRecord>> rows;      // minute_start seconds -> contributing rows
};

// Groups a day's rows by minute, aggregates, and applies the rules with the
// previous minute as ramp reference. Minutes with no present phase yield no
// aggregate.
DayAggregation aggregate_day(std::span<const MinuteRecord> records, const AnomalyRules& rules);

// anomalies-<date>.jsonl: one line per flagged minute with the aggregate, its
// codes and the contributing rows. Returns the path.
std::filesystem::path write_quarantine_file(const std::filesystem::path& dir, const Date& date,
                                            const DayAggregation& day);

struct BatchPlan {
  std::vector<Batch> batches;
  std::vector<int> missing_windows;  // windows with no aggregate at all
};

BatchPlan make_batches(const std::string& producer_id, const Date& date,
                       std::span<const PlantMinuteAggregate> aggregates);

struct Receipt {
  Hash256 tx_id;
  TxStatus status;
};

// Submits the canonical batch bytes. Throws Error(kUnauthorized) for a
// non-producer identity and Error(kRejected, reason) when the chaincode
// marks the transaction INVALID.
Receipt submit(const Batch& batch, const Identity& producer, Ledger& ledger);

// Content digests of the day's CSV files, keyed "<collector>/<date>/<file>".
std::vector<std::pair<std::string, Hash256>> digest_day_files(const std::filesystem::path& collectors_root,
                                                              std::span<const DayFile> files);

// Closes a day: records file digests and missing windows on-chain.
Receipt anchor_day(const Identity& producer, const Date& date,
                   const std::vector<std::pair<std::string, Hash256>>& files, const std::vector<int>& missing_windows,
                   Ledger& ledger);

}  // namespace carbon
