#include "carbon/pipeline.hpp"

#include "carbon/errors.hpp"
#include "carbon/io.hpp"

namespace fs = std::filesystem;

namespace carbon {
namespace {

void ensure_identity(Ledger& ledger, const std::string& name, Role role) {
  if (auto id = ledger.find_identity(name)) {
    if (id->role != role) {
      throw Error(Errc::kDuplicateName, name + " is registered as " + std::string(role_name(id->role)));
    }
    return;
  }
  ledger.register_identity(name, role);
}

std::vector<std::string> collector_ids(const RunConfig& config) {
  std::vector<std::string> ids;
  for (const auto& [id, meters] : config.fleet.collectors) ids.push_back(id);
  return ids;
}

}  // namespace

Workspace::Workspace(const fs::path& root, const RunConfig& config)
    : layout_{root}, config_(config), chaincode_(config.chaincode_config()) {
  config_.validate();
  fs::create_directories(layout_.root);
  if (!fs::exists(layout_.config_file())) write_file_atomic(layout_.config_file(), serialize_run_config(config_));
  LedgerOptions options;
  options.directory = layout_.ledger();
  options.network_seed = config_.network_seed;
  options.block_size = config_.block_size;
  ledger_ = std::make_unique<Ledger>(chaincode_, options);
  ensure_identity(*ledger_, config_.producer_id, Role::kProducer);
  ensure_identity(*ledger_, config_.certifier, Role::kCertifier);
  ensure_identity(*ledger_, config_.auditor, Role::kAuditor);
}

std::unique_ptr<Workspace> Workspace::open(const fs::path& root) {
  const HomeLayout layout{root};
  if (!fs::exists(layout.config_file())) {
    throw Error(Errc::kIoFailure, "no data root at " + root.string() + " (run simulate first)");
  }
  return std::make_unique<Workspace>(root, load_run_config(layout.config_file()));
}

Identity Workspace::identity(const std::string& name) const {
  auto id = ledger_->find_identity(name);
  if (!id) throw Error(Errc::kUnknownIdentity, "identity '" + name + "' is not registered");
  return *id;
}

std::map<std::string, std::vector<MinuteRecord>> simulate_collectors(const RunConfig& config, const Date& date,
                                                                     DeliveryStats* stats) {
  std::vector<std::unique_ptr<Collector>> collectors;
  std::array<Collector*, kMeterCount + 1> owner{};
  for (const auto& [id, meters] : config.fleet.collectors) {
    CollectorConfig cc{id, meters, {}, config.watermark_seconds};
    collectors.push_back(std::make_unique<Collector>(cc, date));
    for (int m : meters) owner[m] = collectors.back().get();
  }
  const DeliveryStats delivered = run_day(config.fleet, date, config.faults, [&](const TransportMessage& msg) {
    if (Collector* c = owner[msg.reading.meter_id]) c->ingest(msg);
  });
  if (stats) *stats = delivered;
  std::map<std::string, std::vector<MinuteRecord>> out;
  for (auto& c : collectors) out[c->config().collector_id] = c->finish_day();
  return out;
}

DayRunSummary run_pipeline_day(Workspace& ws, const Date& date) {
  const RunConfig& config = ws.config();
  Ledger& ledger = ws.ledger();
  const HomeLayout& home = ws.layout();
  const Identity producer = ws.identity(config.producer_id);
  if (ledger.query_state(manifest_key(config.producer_id, date))) {
    throw Error(Errc::kRejected, "duplicate: " + date.to_string() + " is already anchored on-chain");
  }

  DayRunSummary summary;
  summary.date = date;

  auto per_collector = simulate_collectors(config, date, &summary.delivery);
  for (const auto& [id, records] : per_collector) {
    CollectorConfig cc{id, config.fleet.collectors.at(id), home.collectors(), config.watermark_seconds};
    write_day_csv(cc, date, records);
  }
  per_collector.clear();

  const std::vector<std::string> ids = collector_ids(config);
  const ScanResult scan = scan_new_files(home.collectors(), ids, date);
  if (!scan.errors.empty()) throw Error(Errc::kIoFailure, "aggregator: " + scan.errors.front());
  std::vector<MinuteRecord> rows;
  for (const auto& f : scan.files) {
    auto part = read_day_csv(f.path);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  summary.csv_rows = rows.size();

  const DayAggregation day = aggregate_day(rows, config.rules);
  rows.clear();
  summary.aggregates = day.aggregates.size();
  for (const auto& agg : day.aggregates) summary.flagged += agg.flagged() ? 1 : 0;
  write_quarantine_file(home.aggregator(), date, day);

  BatchPlan plan = make_batches(config.producer_id, date, day.aggregates);
  summary.batches = plan.batches.size();
  summary.missing_windows = plan.missing_windows;
  for (const auto& batch : plan.batches) {
    ledger.set_clock(batch.window_end);
    submit(batch, producer, ledger);
    if (ledger.pending_count() >= config.block_size) ledger.cut_block();
  }
  ledger.set_clock(date.next().midnight());
  anchor_day(producer, date, digest_day_files(home.collectors(), scan.files), plan.missing_windows, ledger);
  ledger.flush();
  mark_processed(scan.files);
  return summary;
}

}  // namespace carbon
