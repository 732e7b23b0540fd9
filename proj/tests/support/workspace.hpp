#pragma once

#include <filesystem>
#include <string>

#include "carbon/audit.hpp"
#include "carbon/pipeline.hpp"

namespace fixture {

inline std::filesystem::path fresh_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("carbon-test-" + name);
  std::filesystem::remove_all(p);
  return p;
}

inline carbon::AuditInputs audit_inputs(const carbon::Workspace& ws) {
  carbon::AuditInputs in;
  in.collectors_root = ws.layout().collectors();
  in.ledger_dir = ws.layout().ledger();
  in.producer = ws.config().producer_id;
  in.collectors = ws.config().fleet.collectors;
  in.rules = ws.config().rules;
  in.chaincode = ws.config().chaincode_config();
  return in;
}

}  // namespace fixture
