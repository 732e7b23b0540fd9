#include "carbon/aggregator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "carbon/canonical.hpp"
#include "carbon/chaincode.hpp"
#include "carbon/collector.hpp"
#include "carbon/errors.hpp"
#include "carbon/io.hpp"

namespace fs = std::filesystem;

namespace carbon {
namespace {

std::string value_detail(const MinuteRecord& r, double value) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "meter=%d phase=%d value=%.3f", r.meter_id, r.phase, value);
  return buf;
}

bool is_meter_csv(const fs::path& p) {
  const std::string name = p.filename().string();
  return name.size() > 7 && name.rfind("SEM", 0) == 0 && p.extension() == ".csv";
}

std::set<std::string> read_marker(const fs::path& day_dir) {
  std::set<std::string> done;
  const fs::path marker = day_dir / kProcessedMarker;
  std::error_code ec;
  if (!fs::exists(marker, ec)) return done;
  std::istringstream in(read_file(marker));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) done.insert(line);
  }
  return done;
}

void scan_day_dir(const std::string& id, const Date& date, const fs::path& day_dir, ScanResult& out) {
  std::set<std::string> done;
  try {
    done = read_marker(day_dir);
  } catch (const Error& e) {
    out.errors.emplace_back(e.what());
  }
  std::error_code ec;
  std::vector<fs::path> found;
  for (fs::directory_iterator it(day_dir, ec), end; !ec && it != end; it.increment(ec)) {
    if (it->is_regular_file() && is_meter_csv(it->path()) && !done.count(it->path().filename().string())) {
      found.push_back(it->path());
    }
  }
  if (ec) out.errors.push_back("IoFailure: cannot list " + day_dir.string());
  std::sort(found.begin(), found.end());
  for (auto& p : found) out.files.push_back({id, date, std::move(p)});
}

nlohmann::json aggregate_json(const PlantMinuteAggregate& agg) {
  return nlohmann::json{{"avg_frequency", round3(agg.avg_frequency)},
                        {"avg_voltage", round3(agg.avg_voltage)},
                        {"minute_start", agg.minute_start.to_string()},
                        {"phase_count", agg.phase_count},
                        {"quality", quality_name(agg.quality)},
                        {"total_power", round3(agg.total_power)}};
}

nlohmann::json row_json(const MinuteRecord& r) {
  nlohmann::json j{{"meter_id", r.meter_id},
                   {"minute_start", r.minute_start.to_string()},
                   {"phase", r.phase},
                   {"sample_count", r.sample_count}};
  if (r.averages) {
    const PhaseAverages& a = *r.averages;
    j["active_power_w"] = a.active_power;
    j["apparent_power_va"] = a.apparent_power;
    j["current_a"] = a.current;
    j["frequency_hz"] = a.frequency;
    j["power_factor"] = a.power_factor;
    j["voltage_v"] = a.voltage;
  }
  return j;
}

Receipt submit_checked(std::string_view function, std::string payload, const Identity& producer, Ledger& ledger) {
  if (producer.role != Role::kProducer) {
    throw Error(Errc::kUnauthorized, std::string(role_name(producer.role)) + " identity cannot submit");
  }
  const Hash256 id = ledger.submit_tx(function, std::move(payload), producer.name);
  const auto tx = ledger.lookup_tx(id);
  if (!tx) throw Error(Errc::kNotFound, "submitted transaction not found");
  if (!tx->status.valid) throw Error(Errc::kRejected, tx->status.reason);
  return Receipt{id, tx->status};
}

}  // namespace

void AnomalyRules::validate() const {
  if (!(phase_power_min < phase_power_max) || !(voltage_min < voltage_max) || !(frequency_min < frequency_max)) {
    throw Error(Errc::kInvalidArgument, "anomaly ranges need lower < upper");
  }
  if (!(max_ramp_watts_per_minute > 0.0)) throw Error(Errc::kInvalidArgument, "ramp limit must be positive");
}

ScanResult scan_new_files(const fs::path& collectors_root, std::span<const std::string> collector_ids,
                          std::optional<Date> date) {
  ScanResult out;
  std::vector<std::string> ids(collector_ids.begin(), collector_ids.end());
  std::sort(ids.begin(), ids.end());
  for (const auto& id : ids) {
    const fs::path base = collectors_root / id;
    std::error_code ec;
    if (date) {
      const fs::path day_dir = base / date->to_string();
      if (!fs::is_directory(day_dir, ec)) {
        out.notices.push_back("MissingCollector: " + id);
        continue;
      }
      scan_day_dir(id, *date, day_dir, out);
      continue;
    }
    if (!fs::is_directory(base, ec)) {
      out.notices.push_back("MissingCollector: " + id);
      continue;
    }
    std::vector<std::pair<Date, fs::path>> days;
    for (fs::directory_iterator it(base, ec), end; !ec && it != end; it.increment(ec)) {
      if (!it->is_directory()) continue;
      try {
        days.emplace_back(Date::parse(it->path().filename().string()), it->path());
      } catch (const Error&) {
      }
    }
    if (ec) out.errors.push_back("IoFailure: cannot list " + base.string());
    std::sort(days.begin(), days.end());
    for (const auto& [d, dir] : days) scan_day_dir(id, d, dir, out);
  }
  return out;
}

void mark_processed(std::span<const DayFile> files) {
  std::map<fs::path, std::set<std::string>> by_dir;
  for (const auto& f : files) by_dir[f.path.parent_path()].insert(f.path.filename().string());
  for (auto& [dir, names] : by_dir) {
    std::set<std::string> all = read_marker(dir);
    all.insert(names.begin(), names.end());
    std::string text;
    for (const auto& n : all) text += n + "\n";
    write_file_atomic(dir / kProcessedMarker, text);
  }
}

PlantMinuteAggregate aggregate_minute(std::span<const MinuteRecord> records) {
  PlantMinuteAggregate agg;
  if (records.empty()) return agg;
  agg.minute_start = records.front().minute_start;

  std::vector<const MinuteRecord*> ordered;
  ordered.reserve(records.size());
  for (const auto& r : records) {
    if (r.minute_start != agg.minute_start) throw Error(Errc::kInvalidArgument, "records span several minutes");
    ordered.push_back(&r);
  }
  std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->phase_key() < b->phase_key(); });
  for (std::size_t i = 1; i < ordered.size(); ++i) {
    if (ordered[i - 1]->phase_key() == ordered[i]->phase_key()) {
      throw Error(Errc::kDuplicatePhase, "meter " + std::to_string(ordered[i]->meter_id) + " phase " +
                                             std::to_string(ordered[i]->phase) + " repeated");
    }
  }

  double power = 0.0, voltage = 0.0, frequency = 0.0;
  for (const MinuteRecord* r : ordered) {
    if (!r->present()) continue;
    power += r->averages->active_power;
    voltage += r->averages->voltage;
    frequency += r->averages->frequency;
    ++agg.phase_count;
  }
  if (agg.phase_count > 0) {
    agg.total_power = round3(power);
    agg.avg_voltage = round3(voltage / agg.phase_count);
    agg.avg_frequency = round3(frequency / agg.phase_count);
  }
  agg.quality = classify_quality(agg.phase_count, false);
  return agg;
}

std::vector<AnomalyCode> detect_anomalies(const PlantMinuteAggregate& agg, const PlantMinuteAggregate* prev,
                                          std::span<const MinuteRecord> records, const AnomalyRules& rules) {
  std::vector<AnomalyCode> flags;
  for (const auto& r : records) {
    if (!r.present()) continue;
    const PhaseAverages& a = *r.averages;
    if (a.active_power < rules.phase_power_min || a.active_power > rules.phase_power_max) {
      flags.push_back({AnomalyKind::kRangePower, value_detail(r, a.active_power)});
    }
    if (a.voltage < rules.voltage_min || a.voltage > rules.voltage_max) {
      flags.push_back({AnomalyKind::kRangeVoltage, value_detail(r, a.voltage)});
    }
    if (a.frequency < rules.frequency_min || a.frequency > rules.frequency_max) {
      flags.push_back({AnomalyKind::kRangeFrequency, value_detail(r, a.frequency)});
    }
    if (std::fabs(a.power_factor) > 1.0) flags.push_back({AnomalyKind::kPfBounds, value_detail(r, a.power_factor)});
  }
  if (prev != nullptr) {
    const double delta = std::fabs(agg.total_power - prev->total_power);
    if (delta > rules.max_ramp_watts_per_minute) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "delta=%.3f", delta);
      flags.push_back({AnomalyKind::kRamp, buf});
    }
  }
  std::sort(flags.begin(), flags.end());
  return flags;
}

DayAggregation aggregate_day(std::span<const MinuteRecord> records, const AnomalyRules& rules) {
  DayAggregation day;
  for (const auto& r : records) day.rows[r.minute_start.seconds].push_back(r);
  for (auto& [minute, rows] : day.rows) {
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.phase_key() < b.phase_key(); });
  }

  const PlantMinuteAggregate* prev = nullptr;
  for (auto it = day.rows.begin(); it != day.rows.end();) {
    PlantMinuteAggregate agg = aggregate_minute(it->second);
    if (agg.phase_count == 0) {
      prev = nullptr;
      it = day.rows.erase(it);
      continue;
    }
    const bool adjacent = prev != nullptr && agg.minute_start - prev->minute_start == kSecondsPerMinute;
    agg.flags = detect_anomalies(agg, adjacent ? prev : nullptr, it->second, rules);
    agg.quality = classify_quality(agg.phase_count, agg.flagged());
    day.aggregates.push_back(std::move(agg));
    prev = &day.aggregates.back();
    ++it;
  }
  return day;
}

fs::path write_quarantine_file(const fs::path& dir, const Date& date, const DayAggregation& day) {
  std::string text;
  for (const auto& agg : day.aggregates) {
    if (!agg.flagged()) continue;
    nlohmann::json codes = nlohmann::json::array();
    for (const auto& f : agg.flags) codes.push_back({{"code", anomaly_name(f.kind)}, {"detail", f.detail}});
    nlohmann::json rows = nlohmann::json::array();
    if (auto it = day.rows.find(agg.minute_start.seconds); it != day.rows.end()) {
      for (const auto& r : it->second) rows.push_back(row_json(r));
    }
    text += nlohmann::json{{"aggregate", aggregate_json(agg)}, {"codes", std::move(codes)}, {"rows", std::move(rows)}}
                .dump();
    text += '\n';
  }
  const fs::path path = dir / ("anomalies-" + date.to_string() + ".jsonl");
  write_file_atomic(path, text);
  return path;
}

BatchPlan make_batches(const std::string& producer_id, const Date& date,
                       std::span<const PlantMinuteAggregate> aggregates) {
  std::map<int, std::vector<PlantMinuteAggregate>> by_window;
  const Timestamp midnight = date.midnight();
  for (const auto& agg : aggregates) {
    if (Date::of(agg.minute_start) != date) {
      throw Error(Errc::kInvalidArgument, "aggregate " + agg.minute_start.to_string() + " outside " + date.to_string());
    }
    by_window[window_index(agg.minute_start)].push_back(agg);
  }
  BatchPlan plan;
  for (int w = 0; w < kWindowsPerDay; ++w) {
    auto it = by_window.find(w);
    if (it == by_window.end()) {
      plan.missing_windows.push_back(w);
      continue;
    }
    Batch b;
    b.producer_id = producer_id;
    b.batch_id = make_batch_id(producer_id, date, w);
    b.window_start = midnight + static_cast<std::int64_t>(w) * kWindowMinutes * kSecondsPerMinute;
    b.window_end = b.window_start + kWindowMinutes * kSecondsPerMinute;
    b.aggregates = std::move(it->second);
    std::sort(b.aggregates.begin(), b.aggregates.end(),
              [](const auto& x, const auto& y) { return x.minute_start < y.minute_start; });
    plan.batches.push_back(std::move(b));
  }
  return plan;
}

Receipt submit(const Batch& batch, const Identity& producer, Ledger& ledger) {
  return submit_checked(fn::kSubmitBatch, canonical_serialize(batch), producer, ledger);
}

std::vector<std::pair<std::string, Hash256>> digest_day_files(const fs::path& collectors_root,
                                                              std::span<const DayFile> files) {
  std::vector<std::pair<std::string, Hash256>> out;
  for (const auto& f : files) {
    out.emplace_back(fs::relative(f.path, collectors_root).generic_string(), digest(read_file(f.path)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Receipt anchor_day(const Identity& producer, const Date& date,
                   const std::vector<std::pair<std::string, Hash256>>& files, const std::vector<int>& missing_windows,
                   Ledger& ledger) {
  return submit_checked(fn::kAnchorDay, anchor_day_payload(producer.name, date, files, missing_windows), producer,
                        ledger);
}

}  // namespace carbon
