#include "carbon/model.hpp"

#include <cmath>
#include <cstdio>

#include "carbon/errors.hpp"

namespace carbon {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kNonAligned: return "NonAligned";
    case Errc::kInvalidMeter: return "InvalidMeter";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kParse: return "Parse";
    case Errc::kIoFailure: return "IoFailure";
    case Errc::kDuplicatePhase: return "DuplicatePhase";
    case Errc::kUnauthorized: return "Unauthorized";
    case Errc::kRejected: return "Rejected";
    case Errc::kDuplicateName: return "DuplicateName";
    case Errc::kUnknownIdentity: return "UnknownIdentity";
    case Errc::kNegativePower: return "NegativePower";
    case Errc::kNonPositiveDuration: return "NonPositiveDuration";
    case Errc::kFactorOutOfRange: return "FactorOutOfRange";
    case Errc::kAlreadyAccrued: return "AlreadyAccrued";
    case Errc::kNoValidEnergy: return "NoValidEnergy";
    case Errc::kIllegalTransition: return "IllegalTransition";
    case Errc::kNotFound: return "NotFound";
    case Errc::kMissingData: return "MissingData";
  }
  return "Unknown";
}

bool reading_is_consistent(const PhaseReading& r) {
  return r.power_factor >= -1.0 && r.power_factor <= 1.0 && r.apparent_power >= 0.0 &&
         r.apparent_power >= std::abs(r.active_power) - kApparentPowerSlackVa;
}

std::string_view anomaly_name(AnomalyKind kind) {
  switch (kind) {
    case AnomalyKind::kRangePower: return "RANGE_POWER";
    case AnomalyKind::kRangeVoltage: return "RANGE_VOLTAGE";
    case AnomalyKind::kRangeFrequency: return "RANGE_FREQUENCY";
    case AnomalyKind::kRamp: return "RAMP";
    case AnomalyKind::kPfBounds: return "PF_BOUNDS";
  }
  return "";
}

AnomalyKind parse_anomaly(std::string_view name) {
  for (auto k : {AnomalyKind::kRangePower, AnomalyKind::kRangeVoltage, AnomalyKind::kRangeFrequency,
                 AnomalyKind::kRamp, AnomalyKind::kPfBounds}) {
    if (anomaly_name(k) == name) return k;
  }
  throw Error(Errc::kParse, "unknown anomaly code '" + std::string(name) + "'");
}

std::string_view quality_name(Quality q) {
  switch (q) {
    case Quality::kOk: return "OK";
    case Quality::kPartial: return "PARTIAL";
    case Quality::kFlagged: return "FLAGGED";
  }
  return "";
}

Quality parse_quality(std::string_view name) {
  if (name == "OK") return Quality::kOk;
  if (name == "PARTIAL") return Quality::kPartial;
  if (name == "FLAGGED") return Quality::kFlagged;
  throw Error(Errc::kParse, "unknown quality '" + std::string(name) + "'");
}

Quality classify_quality(int phase_count, bool flagged) {
  if (flagged) return Quality::kFlagged;
  if (phase_count > 0 && phase_count < kPlantPhases) return Quality::kPartial;
  return Quality::kOk;
}

std::string make_batch_id(std::string_view producer_id, const Date& date, int window) {
  char idx[8];
  std::snprintf(idx, sizeof(idx), "%03d", window);
  return std::string(producer_id) + "-" + date.compact() + "-" + idx;
}

std::string_view role_name(Role role) {
  switch (role) {
    case Role::kProducer: return "PRODUCER";
    case Role::kCertifier: return "CERTIFIER";
    case Role::kAuditor: return "AUDITOR";
  }
  return "";
}

Role parse_role(std::string_view name) {
  if (name == "PRODUCER") return Role::kProducer;
  if (name == "CERTIFIER") return Role::kCertifier;
  if (name == "AUDITOR") return Role::kAuditor;
  throw Error(Errc::kParse, "unknown role '" + std::string(name) + "'");
}

void EmissionConfig::validate() const {
  if (!(factor_kg_per_kwh >= kMinEmissionFactor && factor_kg_per_kwh <= kMaxEmissionFactor)) {
    throw Error(Errc::kFactorOutOfRange, "emission factor must lie in [0.25, 1.06] kg/kWh");
  }
  if (!(plant_capacity_watts > 0.0)) {
    throw Error(Errc::kInvalidArgument, "plant capacity must be positive");
  }
}

}  // namespace carbon
