#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "carbon/aggregator.hpp"
#include "carbon/chaincode.hpp"
#include "carbon/collector.hpp"
#include "carbon/config.hpp"
#include "carbon/ledger.hpp"

namespace carbon {

// Data root layout.
struct HomeLayout {
  std::filesystem::path root;

  std::filesystem::path collectors() const { return root / "collectors"; }
  std::filesystem::path ledger() const { return root / "ledger"; }
  std::filesystem::path aggregator() const { return root / "aggregator"; }
  std::filesystem::path audit() const { return root / "audit"; }
  std::filesystem::path config_file() const { return root / "run-config.json"; }
};

// A data root opened with its chaincode and ledger. The run configuration is
// stored on first open and reused afterwards.
class Workspace {
 public:
  // Creates or reopens; registers the configured identities when missing.
  Workspace(const std::filesystem::path& root, const RunConfig& config);
  // Reopens with the stored configuration. Throws Error(kIoFailure) when the
  // root was never initialized.
  static std::unique_ptr<Workspace> open(const std::filesystem::path& root);

  const HomeLayout& layout() const { return layout_; }
  const RunConfig& config() const { return config_; }
  Ledger& ledger() { return *ledger_; }
  const CreditChaincode& chaincode() const { return chaincode_; }

  Identity identity(const std::string& name) const;  // throws kUnknownIdentity

 private:
  HomeLayout layout_;
  RunConfig config_;
  CreditChaincode chaincode_;
  std::unique_ptr<Ledger> ledger_;
};

struct DayRunSummary {
  Date date;
  std::size_t csv_rows = 0;
  std::size_t aggregates = 0;
  std::size_t batches = 0;
  std::size_t flagged = 0;
  std::vector<int> missing_windows;
  DeliveryStats delivery;
};

// Per-collector meter-day records from one simulated day.
std::map<std::string, std::vector<MinuteRecord>> simulate_collectors(const RunConfig& config, const Date& date,
                                                                     DeliveryStats* stats = nullptr);

// meter-sim -> collectors -> CSV -> aggregator -> ledger for one day, ending
// with the day anchor and all blocks cut. Throws Error(kRejected) when the day
// is already on-chain.
DayRunSummary run_pipeline_day(Workspace& ws, const Date& date);

}  // namespace carbon
