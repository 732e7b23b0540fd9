#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "carbon/time.hpp"

namespace carbon {

inline constexpr int kMeterCount = 8;
inline constexpr int kPhasesPerMeter = 3;
inline constexpr int kPlantPhases = kMeterCount * kPhasesPerMeter;
inline constexpr int kBatchSchemaVersion = 1;

// Slack allowed between apparent and active power from rounding in the meter.
inline constexpr double kApparentPowerSlackVa = 0.5;

struct PhaseKey {
  int meter_id = 0;
  int phase = 0;
  auto operator<=>(const PhaseKey&) const = default;
};

// One electrical sample from one phase of one meter. (meter_id, phase, ts) is
// the identity of the sample.
struct PhaseReading {
  int meter_id = 0;
  int phase = 0;
  Timestamp ts;
  double active_power = 0.0;    // W
  double voltage = 0.0;         // V
  double current = 0.0;         // A
  double power_factor = 0.0;
  double frequency = 0.0;       // Hz
  double apparent_power = 0.0;  // VA

  PhaseKey phase_key() const { return {meter_id, phase}; }
  bool same_sample(const PhaseReading& other) const {
    return meter_id == other.meter_id && phase == other.phase && ts == other.ts;
  }
  bool operator==(const PhaseReading&) const = default;
};

// Checks the physical invariants of a reading (pf bounds, apparent >= |active|).
bool reading_is_consistent(const PhaseReading& r);

struct PhaseAverages {
  double active_power = 0.0;
  double voltage = 0.0;
  double current = 0.0;
  double power_factor = 0.0;
  double frequency = 0.0;
  double apparent_power = 0.0;
  bool operator==(const PhaseAverages&) const = default;
};

// Minute-level record for one phase. `averages` is empty iff sample_count == 0.
struct MinuteRecord {
  int meter_id = 0;
  int phase = 0;
  Timestamp minute_start;
  std::optional<PhaseAverages> averages;
  int sample_count = 0;

  PhaseKey phase_key() const { return {meter_id, phase}; }
  bool present() const { return sample_count > 0 && averages.has_value(); }
  bool operator==(const MinuteRecord&) const = default;
};

enum class AnomalyKind { kRangePower, kRangeVoltage, kRangeFrequency, kRamp, kPfBounds };

std::string_view anomaly_name(AnomalyKind kind);
AnomalyKind parse_anomaly(std::string_view name);  // throws Error(kParse)

struct AnomalyCode {
  AnomalyKind kind = AnomalyKind::kRangePower;
  std::string detail;
  auto operator<=>(const AnomalyCode&) const = default;
};

enum class Quality { kOk, kPartial, kFlagged };

std::string_view quality_name(Quality q);
Quality parse_quality(std::string_view name);  // throws Error(kParse)

// Flags take precedence over partial coverage when both apply.
Quality classify_quality(int phase_count, bool flagged);

// Plant-wide minute aggregate: total_power is the sum over present phases,
// avg_voltage/avg_frequency are means over the phase_count present phases.
struct PlantMinuteAggregate {
  Timestamp minute_start;
  double total_power = 0.0;
  double avg_voltage = 0.0;
  double avg_frequency = 0.0;
  int phase_count = 0;
  Quality quality = Quality::kOk;
  std::vector<AnomalyCode> flags;

  bool flagged() const { return !flags.empty(); }
  bool operator==(const PlantMinuteAggregate&) const = default;
};

// Five consecutive minute aggregates bound to one producer and window.
struct Batch {
  std::string batch_id;
  Timestamp window_start;
  Timestamp window_end;  // exclusive
  std::string producer_id;
  int schema_version = kBatchSchemaVersion;
  std::vector<PlantMinuteAggregate> aggregates;

  bool operator==(const Batch&) const = default;
};

// `<producer>-<YYYYMMDD>-<NNN>`
std::string make_batch_id(std::string_view producer_id, const Date& date, int window);

enum class Role { kProducer, kCertifier, kAuditor };

std::string_view role_name(Role role);
Role parse_role(std::string_view name);  // throws Error(kParse)

struct Identity {
  std::string name;
  Role role = Role::kProducer;
  std::string key_id;
  bool operator==(const Identity&) const = default;
};

inline constexpr double kMinEmissionFactor = 0.25;
inline constexpr double kMaxEmissionFactor = 1.06;

struct EmissionConfig {
  double factor_kg_per_kwh = 0.4;
  double plant_capacity_watts = 100'000.0;

  void validate() const;  // throws Error(kFactorOutOfRange / kInvalidArgument)
};

}  // namespace carbon
