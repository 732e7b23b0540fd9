#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "carbon/meter_sim.hpp"
#include "carbon/model.hpp"

namespace carbon {

inline constexpr std::string_view kCsvHeader =
    "timestamp_utc,meter_id,phase,active_power_w,voltage_v,current_a,power_factor,frequency_hz,"
    "apparent_power_va,sample_count";

struct CollectorConfig {
  std::string collector_id;
  std::vector<int> assigned_meters;
  std::filesystem::path output_root;
  int watermark_seconds = 30;

  bool owns(int meter_id) const;
};

// Meters 1-4 report to collector A, 5-8 to collector B.
CollectorConfig reference_collector(const std::string& collector_id, const std::filesystem::path& output_root);

enum class IngestOutcome { kAccepted, kDuplicate, kRejected };

struct CollectorMinuteSummary {
  std::string collector_id;
  Timestamp minute_start;
  double collector_power = 0.0;  // sum of present phase averages, W
  int present_phases = 0;
  int total_phases = 0;

  bool partial() const { return present_phases < total_phases; }
};

// Data collection stage for one collector and one UTC day. Deduplicates
// redelivered samples, buffers them per minute, and closes each minute once
// the simulated clock has passed minute_end + watermark.
class Collector {
 public:
  struct Counters {
    std::size_t accepted = 0;
    std::size_t duplicates = 0;
    std::size_t rejected = 0;
  };

  Collector(CollectorConfig config, Date date, bool retain_raw = false);

  const CollectorConfig& config() const { return config_; }
  const Date& date() const { return date_; }

  // Advances the clock to msg.delivered_at, then classifies the reading.
  IngestOutcome ingest(const TransportMessage& msg);

  // Closes every minute whose watermark has passed at `now`.
  void advance_clock(Timestamp now);

  // Averages and releases the buffered samples of one phase-minute.
  MinuteRecord close_minute(int meter_id, int phase, Timestamp minute_start);

  // Closes all remaining minutes of the day and returns every record, sorted
  // by (minute_start, meter_id, phase).
  std::vector<MinuteRecord> finish_day();

  const Counters& counters() const { return counters_; }

  // Debug sidecar: the raw samples behind each closed record, keyed like the
  // record. Only populated when constructed with retain_raw.
  using RawKey = std::tuple<std::int64_t, int, int>;  // minute_start, meter, phase
  const std::map<RawKey, std::vector<PhaseReading>>& raw_samples() const { return raw_; }

 private:
  static std::uint64_t sample_key(const PhaseReading& r);
  void close_minute_index(int minute_index);

  CollectorConfig config_;
  Date date_;
  bool retain_raw_;
  int next_open_minute_ = 0;
  std::map<RawKey, std::vector<PhaseReading>> buffer_;
  std::unordered_set<std::uint64_t> seen_;
  std::vector<MinuteRecord> records_;
  std::map<RawKey, std::vector<PhaseReading>> raw_;
  Counters counters_;
};

std::filesystem::path day_directory(const std::filesystem::path& output_root, std::string_view collector_id,
                                    const Date& date);

// CSV text for one meter-day: header plus rows sorted by (minute_start, phase).
std::string render_day_csv(std::span<const MinuteRecord> rows);

// One SEM<meter>.csv per assigned meter under
// <output_root>/<collector_id>/<YYYY-MM-DD>/. Returns the written paths.
std::vector<std::filesystem::path> write_day_csv(const CollectorConfig& config, const Date& date,
                                                 std::span<const MinuteRecord> records);

// Strict reader for the collector CSV contract. Throws Error(kParse) with the
// path and line number, or Error(kIoFailure).
std::vector<MinuteRecord> read_day_csv(const std::filesystem::path& path);
std::vector<MinuteRecord> parse_day_csv(std::string_view text, std::string_view origin);

// P_collector(t): sum of avg_active_power over the present phases of one minute.
CollectorMinuteSummary collector_minute_power(std::string_view collector_id, std::span<const MinuteRecord> records);

}  // namespace carbon
