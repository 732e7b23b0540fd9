#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "carbon/ledger.hpp"
#include "carbon/model.hpp"

namespace carbon {

// Function names understood by CreditChaincode.
namespace fn {
inline constexpr std::string_view kSubmitBatch = "SubmitBatch";
inline constexpr std::string_view kAnchorDay = "AnchorDay";
inline constexpr std::string_view kAccrueDay = "AccrueDay";
inline constexpr std::string_view kVerifyCredit = "VerifyCredit";
inline constexpr std::string_view kIssueCredit = "IssueCredit";
inline constexpr std::string_view kTransitionCredit = "TransitionCredit";
}  // namespace fn

// Leading token of an INVALID reason.
namespace reason {
inline constexpr std::string_view kSchema = "schema";
inline constexpr std::string_view kUnauthorized = "unauthorized";
inline constexpr std::string_view kDuplicate = "duplicate";
inline constexpr std::string_view kTimestamps = "timestamps";
inline constexpr std::string_view kRange = "range";
inline constexpr std::string_view kUnresolved = "unresolved";
inline constexpr std::string_view kAlreadyAccrued = "already_accrued";
inline constexpr std::string_view kNoValidEnergy = "no_valid_energy";
inline constexpr std::string_view kFactorOutOfRange = "factor_out_of_range";
inline constexpr std::string_view kNotFound = "not_found";
inline constexpr std::string_view kIllegalTransition = "illegal_transition";
}  // namespace reason

// State key scheme.
std::string batch_key(std::string_view producer, std::string_view batch_id);
std::string credit_key(std::string_view serial);
std::string accrual_key(std::string_view producer, const Date& date);
std::string quarantine_key(const Date& date, Timestamp minute_start);
std::string quarantine_prefix(const Date& date);
std::string manifest_key(std::string_view producer, const Date& date);

struct ChaincodeConfig {
  double plant_capacity_watts = 100'000.0;
  double capacity_margin = 1.1;
  double voltage_min = 207.0;
  double voltage_max = 253.0;
  double frequency_min = 49.5;
  double frequency_max = 50.5;
};

// E_kWh = P_watts * t_min / (60 * 1000).
// Throws Error(kNegativePower) / Error(kNonPositiveDuration).
double compute_energy(double p_avg_watts, double duration_min);

// CO2_kg = E_kWh * factor. Throws Error(kFactorOutOfRange) outside
// [0.25, 1.06] and Error(kInvalidArgument) for negative energy.
double compute_co2(double energy_kwh, const EmissionConfig& config);

struct EnergyRecord {
  Timestamp period_start;
  Timestamp period_end;
  double p_avg = 0.0;         // W, mean over contributing minutes
  double duration_min = 0.0;  // contributing minutes
  double energy_kwh = 0.0;
  double co2_kg = 0.0;
  double factor_used = 0.0;
  bool operator==(const EnergyRecord&) const = default;
};

enum class CreditState { kPending, kVerified, kIssued, kSold, kRetired };

std::string_view credit_state_name(CreditState s);
CreditState parse_credit_state(std::string_view name);  // throws Error(kParse)

struct ExcludedMinute {
  Timestamp minute_start;
  std::vector<std::string> codes;
  bool operator==(const ExcludedMinute&) const = default;
};

struct PartialMinute {
  Timestamp minute_start;
  int phase_count = 0;
  bool operator==(const PartialMinute&) const = default;
};

struct CarbonCredit {
  std::string serial;
  std::string producer;
  Date period;
  EnergyRecord energy;
  CreditState state = CreditState::kPending;
  std::string certifier;
  std::vector<ExcludedMinute> exclusions;
  std::vector<PartialMinute> partial_minutes;

  double energy_kwh() const { return energy.energy_kwh; }
  double co2_kg() const { return energy.co2_kg; }
  bool operator==(const CarbonCredit&) const = default;
};

std::string credit_to_json(const CarbonCredit& credit);
CarbonCredit credit_from_json(std::string_view text);  // throws Error(kParse)

// Payload builders for the non-batch functions.
std::string anchor_day_payload(std::string_view producer, const Date& date,
                               const std::vector<std::pair<std::string, Hash256>>& files,
                               const std::vector<int>& missing_windows);
std::string accrue_day_payload(std::string_view producer, const Date& date, double factor_kg_per_kwh);
std::string credit_action_payload(std::string_view serial, std::optional<CreditState> target = std::nullopt);

// Structure, uniqueness, timestamp and range checks for a SubmitBatch payload;
// the first failing check determines the reason.
TxStatus validate_batch(std::string_view payload, const Identity& submitter, const StateView& state,
                        const ChaincodeConfig& config);

// Quarantine writes for the flagged aggregates of a batch, keyed by minute.
std::vector<std::pair<std::string, std::string>> quarantine(const Batch& batch);

class CreditChaincode final : public Chaincode {
 public:
  explicit CreditChaincode(ChaincodeConfig config = {}) : config_(config) {}

  Execution execute(const Invocation& call, const StateView& state) const override;

  const ChaincodeConfig& config() const { return config_; }

 private:
  Execution submit_batch(const Invocation& call, const StateView& state) const;
  Execution anchor_day(const Invocation& call, const StateView& state) const;
  Execution accrue_day(const Invocation& call, const StateView& state) const;
  Execution advance_credit(const Invocation& call, const StateView& state) const;

  ChaincodeConfig config_;
};

// Client-side wrapper that turns INVALID outcomes into typed errors
// (kUnauthorized, kIllegalTransition, kAlreadyAccrued, kNoValidEnergy, ...).
// Each call is one ledger transaction; the caller decides when to cut blocks.
class CreditsClient {
 public:
  explicit CreditsClient(Ledger& ledger) : ledger_(ledger) {}

  CarbonCredit accrue_day(const std::string& producer, const Date& date, const EmissionConfig& emission);
  CarbonCredit verify_credit(const std::string& serial, const std::string& certifier);
  CarbonCredit issue_credit(const std::string& serial, const std::string& actor);
  CarbonCredit transition(const std::string& serial, CreditState target, const std::string& actor);

  // Committed view of a credit.
  std::optional<CarbonCredit> find(const std::string& serial) const;

 private:
  CarbonCredit submit(std::string_view function, std::string payload, const std::string& actor,
                      const std::string& result_key_hint);

  Ledger& ledger_;
};

}  // namespace carbon
