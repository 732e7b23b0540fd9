#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "carbon/aggregator.hpp"
#include "carbon/chaincode.hpp"
#include "carbon/meter_sim.hpp"
#include "carbon/model.hpp"

namespace carbon {

// Everything a deterministic run depends on. All JSON fields are optional;
// unknown fields are rejected.
struct RunConfig {
  std::string producer_id = "farm-1";
  std::string certifier = "certifier-1";
  std::string auditor = "auditor-1";
  std::vector<Date> dates = {Date::parse("2025-06-01")};
  std::uint64_t seed = 1;
  std::uint64_t network_seed = 7;
  FleetConfig fleet;
  FaultConfig faults;
  AnomalyRules rules;
  EmissionConfig emission;
  int watermark_seconds = 30;
  std::size_t block_size = kDefaultBlockSize;

  // Seeds both the fleet and the transport fault generator.
  void apply_seed(std::uint64_t s);
  void validate() const;  // throws Error(kInvalidArgument / kFactorOutOfRange / kInvalidMeter)

  ChaincodeConfig chaincode_config() const;
};

// Throws Error(kParse) naming the offending field.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string serialize_run_config(const RunConfig& config);

}  // namespace carbon
