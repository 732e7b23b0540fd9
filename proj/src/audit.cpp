#include "carbon/audit.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "carbon/errors.hpp"
#include "carbon/io.hpp"
#include "carbon/ledger.hpp"

// Second implementation of the pipeline rules used for audits. It shares
// types with the production path but none of its parsing, aggregation,
// serialization or hashing code.

namespace fs = std::filesystem;
using nlohmann::json;

namespace carbon {
namespace {

constexpr const char* kAbsent = "absent";

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), md);
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned char c : md) out << std::setw(2) << static_cast<int>(c);
  return out.str();
}

std::string fixed(double v) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << std::fixed << std::setprecision(3) << v;
  std::string s = out.str();
  return s == "-0.000" ? "0.000" : s;
}

double wire(double v) { return std::strtod(fixed(v).c_str(), nullptr); }

struct Row {
  int meter = 0;
  int phase = 0;
  std::int64_t minute = 0;
  bool present = false;
  double power = 0, voltage = 0, current = 0, pf = 0, frequency = 0, apparent = 0;
  int count = 0;
};

bool parse_number(const std::string& field, double& out) {
  if (field.empty()) return false;
  char* end = nullptr;
  out = std::strtod(field.c_str(), &end);
  return end == field.c_str() + field.size() && std::isfinite(out);
}

bool parse_int(const std::string& field, int& out) {
  if (field.empty() || field.size() > 9) return false;
  char* end = nullptr;
  const long v = std::strtol(field.c_str(), &end, 10);
  if (end != field.c_str() + field.size()) return false;
  out = static_cast<int>(v);
  return true;
}

// Returns an error description, empty on success.
std::string parse_csv(const std::string& text, std::vector<Row>& rows) {
  static const std::string kHeader =
      "timestamp_utc,meter_id,phase,active_power_w,voltage_v,current_a,power_factor,frequency_hz,"
      "apparent_power_va,sample_count";
  if (text.empty() || text.back() != '\n') return "file does not end with a line feed";
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (line != kHeader) return "header mismatch";
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (f.size() != 10) return where + "expected 10 fields";
    Row r;
    try {
      const Timestamp ts = Timestamp::parse(f[0]);
      if (ts.seconds % 60 != 0) return where + "timestamp not minute-aligned";
      r.minute = ts.seconds;
    } catch (const Error&) {
      return where + "bad timestamp";
    }
    if (!parse_int(f[1], r.meter) || !parse_int(f[2], r.phase) || !parse_int(f[9], r.count)) {
      return where + "bad integer field";
    }
    if (r.meter < 1 || r.meter > kMeterCount || r.phase < 1 || r.phase > kPhasesPerMeter || r.count < 0) {
      return where + "meter, phase or count out of range";
    }
    const bool all_empty = std::all_of(f.begin() + 3, f.begin() + 9, [](const auto& s) { return s.empty(); });
    if (all_empty) {
      if (r.count != 0) return where + "absent values with nonzero sample_count";
    } else {
      double* targets[] = {&r.power, &r.voltage, &r.current, &r.pf, &r.frequency, &r.apparent};
      for (int i = 0; i < 6; ++i) {
        if (!parse_number(f[3 + i], *targets[i])) return where + "bad numeric field";
      }
      if (r.count == 0) return where + "values with zero sample_count";
      r.present = true;
    }
    rows.push_back(r);
  }
  return {};
}

struct MinuteAgg {
  std::int64_t minute = 0;
  double total = 0, voltage = 0, frequency = 0;
  int n = 0;
  std::vector<AnomalyCode> flags;
  Quality quality = Quality::kOk;
};

std::string detail_for(const Row& r, double value) {
  std::ostringstream out;
  out << "meter=" << r.meter << " phase=" << r.phase << " value=" << fixed(value);
  return out.str();
}

std::vector<MinuteAgg> recompute(const std::map<std::int64_t, std::vector<Row>>& by_minute, const AnomalyRules& rules) {
  std::vector<MinuteAgg> out;
  for (const auto& [minute, rows] : by_minute) {
    MinuteAgg a;
    a.minute = minute;
    double p = 0, v = 0, f = 0;
    for (const Row& r : rows) {
      if (!r.present) continue;
      p += r.power;
      v += r.voltage;
      f += r.frequency;
      ++a.n;
    }
    if (a.n == 0) continue;
    a.total = wire(p);
    a.voltage = wire(v / a.n);
    a.frequency = wire(f / a.n);
    for (const Row& r : rows) {
      if (!r.present) continue;
      if (r.power < rules.phase_power_min || r.power > rules.phase_power_max) {
        a.flags.push_back({AnomalyKind::kRangePower, detail_for(r, r.power)});
      }
      if (r.voltage < rules.voltage_min || r.voltage > rules.voltage_max) {
        a.flags.push_back({AnomalyKind::kRangeVoltage, detail_for(r, r.voltage)});
      }
      if (r.frequency < rules.frequency_min || r.frequency > rules.frequency_max) {
        a.flags.push_back({AnomalyKind::kRangeFrequency, detail_for(r, r.frequency)});
      }
      if (r.pf > 1.0 || r.pf < -1.0) a.flags.push_back({AnomalyKind::kPfBounds, detail_for(r, r.pf)});
    }
    if (!out.empty() && out.back().minute + 60 == minute) {
      const double delta = std::abs(a.total - out.back().total);
      if (delta > rules.max_ramp_watts_per_minute) a.flags.push_back({AnomalyKind::kRamp, "delta=" + fixed(delta)});
    }
    std::sort(a.flags.begin(), a.flags.end());
    a.quality = !a.flags.empty() ? Quality::kFlagged : a.n < kPlantPhases ? Quality::kPartial : Quality::kOk;
    out.push_back(std::move(a));
  }
  return out;
}

std::string quoted(std::string_view s) { return json(std::string(s)).dump(); }

std::string serialize(const std::string& producer, const std::string& batch_id, Timestamp start,
                      const std::vector<const MinuteAgg*>& aggs) {
  std::ostringstream out;
  out << "{\"aggregates\":[";
  for (std::size_t i = 0; i < aggs.size(); ++i) {
    const MinuteAgg& a = *aggs[i];
    if (i) out << ',';
    out << "{\"avg_frequency\":" << fixed(a.frequency) << ",\"avg_voltage\":" << fixed(a.voltage) << ",\"flags\":[";
    for (std::size_t k = 0; k < a.flags.size(); ++k) {
      if (k) out << ',';
      out << "{\"code\":" << quoted(anomaly_name(a.flags[k].kind)) << ",\"detail\":" << quoted(a.flags[k].detail)
          << '}';
    }
    out << "],\"minute_start\":" << quoted(Timestamp{a.minute}.to_string()) << ",\"phase_count\":" << a.n
        << ",\"quality\":" << quoted(quality_name(a.quality)) << ",\"total_power\":" << fixed(a.total) << '}';
  }
  out << "],\"batch_id\":" << quoted(batch_id) << ",\"producer_id\":" << quoted(producer)
      << ",\"schema_version\":1,\"window_end\":" << quoted((start + 300).to_string())
      << ",\"window_start\":" << quoted(start.to_string()) << '}';
  return out.str();
}

std::string quarantine_entry(const std::string& producer, const std::string& batch_id, const MinuteAgg& a) {
  json flags = json::array();
  for (const auto& f : a.flags) flags.push_back({{"code", anomaly_name(f.kind)}, {"detail", f.detail}});
  return json{{"avg_frequency", a.frequency},
              {"avg_voltage", a.voltage},
              {"batch_id", batch_id},
              {"flags", flags},
              {"minute_start", Timestamp{a.minute}.to_string()},
              {"phase_count", a.n},
              {"producer_id", producer},
              {"total_power", a.total}}
      .dump();
}

// Which stage a differing batch points at: numeric content, flags, or bytes.
std::string_view classify_batch_difference(const std::string& found, const std::vector<const MinuteAgg*>& expected) {
  json doc;
  try {
    doc = json::parse(found);
    const json& aggs = doc.at("aggregates");
    if (aggs.size() != expected.size()) return stage::kAggregate;
    bool flags_differ = false;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      const json& g = aggs.at(i);
      const MinuteAgg& e = *expected[i];
      if (g.at("minute_start").get<std::string>() != Timestamp{e.minute}.to_string() ||
          g.at("phase_count").get<int>() != e.n || g.at("total_power").get<double>() != e.total ||
          g.at("avg_voltage").get<double>() != e.voltage || g.at("avg_frequency").get<double>() != e.frequency) {
        return stage::kAggregate;
      }
      std::vector<std::pair<std::string, std::string>> codes;
      for (const json& f : g.at("flags")) codes.emplace_back(f.at("code").get<std::string>(), f.at("detail").get<std::string>());
      std::vector<std::pair<std::string, std::string>> want;
      for (const auto& f : e.flags) want.emplace_back(std::string(anomaly_name(f.kind)), f.detail);
      if (codes != want || g.at("quality").get<std::string>() != quality_name(e.quality)) flags_differ = true;
    }
    return flags_differ ? stage::kAnomaly : stage::kBatch;
  } catch (const json::exception&) {
    return stage::kBatch;
  }
}

std::string value_text(double v) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << std::setprecision(17) << v;
  return out.str();
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

class Auditor {
 public:
  Auditor(const AuditInputs& in, const Date& date, AuditReport& report) : in_(in), date_(date), report_(report) {}

  void run() {
    if (!check_chain()) {
      report_.notices.push_back("replay skipped: chain verification failed");
      return;
    }
    const std::size_t before = report_.mismatches.size();
    load_inputs();
    const auto aggs = recompute(by_minute_, in_.rules);
    compare_manifest(aggs);
    compare_batches(aggs);
    compare_quarantine(aggs);
    compare_credit(aggs);
    report_.replay_matches = report_.mismatches.size() == before;
  }

 private:
  void mismatch(std::string_view st, std::string key, std::string expected, std::string found, std::string detail) {
    report_.mismatches.push_back({std::string(st), std::move(key), std::move(expected), std::move(found), std::move(detail)});
  }

  std::optional<std::string> state(const std::string& key) const {
    auto it = state_.find(key);
    if (it == state_.end()) return std::nullopt;
    return it->second.value;
  }

  bool check_chain() {
    const ChainCheck check = verify_chain_dir(in_.ledger_dir);
    if (!check.ok) {
      mismatch(stage::kChain, check.first_bad_height ? "block/" + std::to_string(*check.first_bad_height) : "membership",
               "valid", "invalid", check.detail);
      return false;
    }
    std::vector<Block> blocks;
    for (std::uint64_t h = 0;; ++h) {
      const fs::path p = in_.ledger_dir / "blocks" / (std::to_string(h) + ".json");
      if (!fs::exists(p)) break;
      blocks.push_back(parse_block(read_file(p)));
    }
    state_ = fold_state(blocks);
    try {
      CreditChaincode chaincode(in_.chaincode);
      LedgerOptions options;
      options.directory = in_.ledger_dir;
      Ledger ledger(chaincode, options);
      const ChainCheck replay = ledger.replay_check();
      if (!replay.ok) {
        mismatch(stage::kChain, replay.first_bad_height ? "block/" + std::to_string(*replay.first_bad_height) : "replay",
                 "re-executed", "diverged", replay.detail);
        return false;
      }
    } catch (const Error& e) {
      mismatch(stage::kChain, "replay", "re-executed", "error", e.what());
      return false;
    }
    report_.chain_ok = true;
    return true;
  }

  void load_inputs() {
    for (const auto& [id, meters] : in_.collectors) {
      for (int m : meters) {
        const std::string rel = id + "/" + date_.to_string() + "/SEM" + std::to_string(m) + ".csv";
        const fs::path path = in_.collectors_root / rel;
        std::string text;
        try {
          text = read_file(path);
        } catch (const Error&) {
          report_.notices.push_back("MissingData: " + date_.to_string() + " " + rel);
          continue;
        }
        file_digests_[rel] = sha256_hex(text);
        std::vector<Row> rows;
        const std::string err = parse_csv(text, rows);
        if (!err.empty()) {
          mismatch(stage::kInput, rel, "parseable", "malformed", err);
          continue;
        }
        for (const Row& r : rows) {
          if (r.meter != m) {
            mismatch(stage::kInput, rel, "meter " + std::to_string(m), "meter " + std::to_string(r.meter), "foreign row");
            continue;
          }
          if (Date::of(Timestamp{r.minute}) != date_) {
            mismatch(stage::kInput, rel, date_.to_string(), Timestamp{r.minute}.to_string(), "row outside the day");
            continue;
          }
          auto& slot = by_minute_[r.minute];
          const bool dup = std::any_of(slot.begin(), slot.end(),
                                       [&](const Row& o) { return o.meter == r.meter && o.phase == r.phase; });
          if (dup) {
            mismatch(stage::kInput, rel, "one row", "repeated", "meter/phase repeated at " + Timestamp{r.minute}.to_string());
            continue;
          }
          slot.push_back(r);
        }
      }
    }
    for (auto& [minute, rows] : by_minute_) {
      std::sort(rows.begin(), rows.end(),
                [](const Row& a, const Row& b) { return std::tie(a.meter, a.phase) < std::tie(b.meter, b.phase); });
    }
  }

  void compare_manifest(const std::vector<MinuteAgg>& aggs) {
    const std::string key = "manifest/" + in_.producer + "/" + date_.to_string();
    const auto stored = state(key);
    if (!stored) {
      mismatch(stage::kInput, key, "anchored", kAbsent, "day has no on-chain manifest");
      return;
    }
    json doc;
    try {
      doc = json::parse(*stored);
    } catch (const json::exception&) {
      mismatch(stage::kInput, key, "manifest", "unparseable", "");
      return;
    }
    std::map<std::string, std::string> anchored;
    for (auto it = doc.at("files").begin(); it != doc.at("files").end(); ++it) anchored[it.key()] = it.value();
    for (const auto& [rel, want] : anchored) {
      auto it = file_digests_.find(rel);
      if (it == file_digests_.end()) {
        mismatch(stage::kInput, rel, want, kAbsent, "anchored file missing");
      } else if (it->second != want) {
        mismatch(stage::kInput, rel, want, it->second, "file content differs from anchored digest");
      }
    }
    for (const auto& [rel, have] : file_digests_) {
      if (!anchored.count(rel)) mismatch(stage::kInput, rel, kAbsent, have, "file not anchored");
    }

    std::set<int> covered;
    for (const auto& a : aggs) covered.insert(static_cast<int>((a.minute - date_.midnight().seconds) / 300));
    std::vector<int> expected_missing;
    for (int w = 0; w < kWindowsPerDay; ++w) {
      if (!covered.count(w)) expected_missing.push_back(w);
    }
    const auto found_missing = doc.at("missing_windows").get<std::vector<int>>();
    if (found_missing != expected_missing) {
      mismatch(stage::kBatch, key, sha256_hex(json(expected_missing).dump()), sha256_hex(json(found_missing).dump()),
               "missing window list differs");
    }
  }

  std::string batch_id(int w) const {
    std::ostringstream out;
    out << in_.producer << '-' << date_.compact() << '-' << std::setw(3) << std::setfill('0') << w;
    return out.str();
  }

  void compare_batches(const std::vector<MinuteAgg>& aggs) {
    std::map<int, std::vector<const MinuteAgg*>> windows;
    for (const auto& a : aggs) windows[static_cast<int>((a.minute - date_.midnight().seconds) / 300)].push_back(&a);
    const std::string prefix = "batch/" + in_.producer + "/" + in_.producer + "-" + date_.compact() + "-";
    std::set<std::string> expected_keys;
    for (const auto& [w, list] : windows) {
      const std::string id = batch_id(w);
      const std::string key = "batch/" + in_.producer + "/" + id;
      expected_keys.insert(key);
      const Timestamp start = date_.midnight() + static_cast<std::int64_t>(w) * 300;
      const std::string bytes = serialize(in_.producer, id, start, list);
      const std::string want = sha256_hex(bytes);
      const auto found = state(key);
      if (!found) {
        mismatch(stage::kBatch, key, want, kAbsent, "batch not on-chain");
        continue;
      }
      const std::string have = sha256_hex(*found);
      if (have != want) {
        mismatch(classify_batch_difference(*found, list), key, want, have, "recomputed batch differs from chain");
      }
    }
    for (auto it = state_.lower_bound(prefix); it != state_.end() && it->first.rfind(prefix, 0) == 0; ++it) {
      if (!expected_keys.count(it->first)) {
        mismatch(stage::kBatch, it->first, kAbsent, sha256_hex(it->second.value), "batch without source rows");
      }
    }
  }

  void compare_quarantine(const std::vector<MinuteAgg>& aggs) {
    const std::string prefix = "quarantine/" + date_.to_string() + "/";
    std::set<std::string> expected_keys;
    for (const auto& a : aggs) {
      if (a.flags.empty()) continue;
      ++report_.quarantine.flagged_minutes;
      for (const auto& f : a.flags) ++report_.quarantine.by_code[std::string(anomaly_name(f.kind))];
      const std::int64_t sod = a.minute - date_.midnight().seconds;
      std::ostringstream label;
      label << std::setfill('0') << std::setw(2) << sod / 3600 << ':' << std::setw(2) << (sod % 3600) / 60;
      const std::string key = prefix + label.str();
      expected_keys.insert(key);
      const std::string want = sha256_hex(quarantine_entry(in_.producer, batch_id(static_cast<int>(sod / 300)), a));
      const auto found = state(key);
      if (!found) {
        mismatch(stage::kQuarantine, key, want, kAbsent, "flagged minute not quarantined");
      } else if (sha256_hex(*found) != want) {
        mismatch(stage::kQuarantine, key, want, sha256_hex(*found), "quarantine entry differs");
      }
    }
    for (auto it = state_.lower_bound(prefix); it != state_.end() && it->first.rfind(prefix, 0) == 0; ++it) {
      if (!expected_keys.count(it->first)) {
        mismatch(stage::kQuarantine, it->first, kAbsent, sha256_hex(it->second.value), "unexpected quarantine entry");
      }
    }
  }

  void compare_credit(const std::vector<MinuteAgg>& aggs) {
    const auto accrual = state("accrual/" + in_.producer + "/" + date_.to_string());
    if (!accrual) {
      report_.notices.push_back("no credit accrued for " + date_.to_string());
      return;
    }
    CreditSummary summary;
    std::string key = "credit/?";
    try {
      summary.serial = json::parse(*accrual).at("serial").get<std::string>();
      key = "credit/" + summary.serial;
      const auto stored = state(key);
      if (!stored) {
        mismatch(stage::kCredit, key, "present", kAbsent, "accrual points at a missing credit");
        return;
      }
      const json c = json::parse(*stored);
      const json& e = c.at("energy");
      summary.state = c.at("state").get<std::string>();
      summary.energy_kwh = e.at("energy_kwh").get<double>();
      summary.co2_kg = e.at("co2_kg").get<double>();

      double power = 0;
      int minutes = 0;
      std::vector<std::string> excluded;
      for (const auto& a : aggs) {
        if (!a.flags.empty()) {
          excluded.push_back(Timestamp{a.minute}.to_string());
          continue;
        }
        power += a.total;
        ++minutes;
      }
      summary.excluded_minutes = excluded.size();
      summary.recomputed_energy_kwh = minutes > 0 ? power / 60000.0 : 0.0;
      const double factor = e.at("factor_used").get<double>();

      std::vector<std::string> found_excluded;
      for (const json& x : c.at("exclusions")) found_excluded.push_back(x.at("minute_start").get<std::string>());

      auto check = [&](const char* what, double want, double have) {
        if (!close(want, have)) mismatch(stage::kCredit, key, value_text(want), value_text(have), what);
      };
      check("energy_kwh", summary.recomputed_energy_kwh, summary.energy_kwh);
      check("duration_min", minutes, e.at("duration_min").get<double>());
      check("co2_kg", summary.recomputed_energy_kwh * factor, summary.co2_kg);
      check("energy formula", e.at("p_avg").get<double>() * e.at("duration_min").get<double>() / 60000.0,
            summary.energy_kwh);
      if (found_excluded != excluded) {
        mismatch(stage::kCredit, key, sha256_hex(json(excluded).dump()), sha256_hex(json(found_excluded).dump()),
                 "exclusion annex differs");
      }
    } catch (const json::exception& ex) {
      mismatch(stage::kCredit, key, "credit record", "unparseable", ex.what());
    }
    report_.credits.push_back(summary);
  }

  const AuditInputs& in_;
  Date date_;
  AuditReport& report_;
  WorldState state_;
  std::map<std::string, std::string> file_digests_;
  std::map<std::int64_t, std::vector<Row>> by_minute_;
};

}  // namespace

AuditReport replay_verify(const AuditInputs& inputs, const Date& date) {
  AuditReport report;
  report.first = date;
  report.last = date;
  report.producer = inputs.producer;
  Auditor(inputs, date, report).run();
  return report;
}

std::string render_report_json(const AuditReport& r) {
  json mismatches = json::array();
  for (const auto& m : r.mismatches) {
    mismatches.push_back({{"detail", m.detail},
                          {"expected_digest", m.expected_digest},
                          {"found_digest", m.found_digest},
                          {"key", m.key},
                          {"stage", m.stage}});
  }
  json credits = json::array();
  for (const auto& c : r.credits) {
    credits.push_back({{"co2_kg", c.co2_kg},
                       {"energy_kwh", c.energy_kwh},
                       {"excluded_minutes", c.excluded_minutes},
                       {"recomputed_energy_kwh", c.recomputed_energy_kwh},
                       {"serial", c.serial},
                       {"state", c.state}});
  }
  const json doc{{"chain_ok", r.chain_ok},
                 {"credits", std::move(credits)},
                 {"date_range", {{"first", r.first.to_string()}, {"last", r.last.to_string()}}},
                 {"mismatches", std::move(mismatches)},
                 {"notices", r.notices},
                 {"producer", r.producer},
                 {"quarantine", {{"by_code", r.quarantine.by_code}, {"flagged_minutes", r.quarantine.flagged_minutes}}},
                 {"replay_matches", r.replay_matches},
                 {"result", r.pass() ? "PASS" : "FAIL"}};
  return doc.dump(2) + "\n";
}

std::string render_report_text(const AuditReport& r) {
  std::ostringstream out;
  out << (r.pass() ? "AUDIT PASS" : "AUDIT FAIL") << '\n';
  for (const auto& m : r.mismatches) {
    out << "MISMATCH stage=" << m.stage << " key=" << m.key << " expected=" << m.expected_digest
        << " found=" << m.found_digest;
    if (!m.detail.empty()) out << " (" << m.detail << ')';
    out << '\n';
  }
  out << "producer " << r.producer << ", " << r.first.to_string();
  if (r.last != r.first) out << " to " << r.last.to_string();
  out << ", chain_ok=" << (r.chain_ok ? "true" : "false") << " replay_matches=" << (r.replay_matches ? "true" : "false")
      << '\n';
  out << "quarantine: " << r.quarantine.flagged_minutes << " flagged minutes";
  for (const auto& [code, n] : r.quarantine.by_code) out << ' ' << code << '=' << n;
  out << '\n';
  for (const auto& c : r.credits) {
    out << "credit " << c.serial << ' ' << c.state << " energy_kwh=" << fixed(c.energy_kwh) << " co2_kg=" << fixed(c.co2_kg)
        << " excluded_minutes=" << c.excluded_minutes << '\n';
  }
  for (const auto& n : r.notices) out << "notice: " << n << '\n';
  return out.str();
}

fs::path emit_report(const AuditReport& report, const fs::path& dir) {
  const std::string stem = "audit-" + report.first.to_string();
  write_file_atomic(dir / (stem + ".txt"), render_report_text(report));
  const fs::path json_path = dir / (stem + ".json");
  write_file_atomic(json_path, render_report_json(report));
  return json_path;
}

}  // namespace carbon
