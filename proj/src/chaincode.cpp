#include "carbon/chaincode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "carbon/canonical.hpp"
#include "carbon/errors.hpp"

namespace carbon {
namespace {

using nlohmann::json;

std::string invalid_reason(std::string_view check, std::string_view detail) {
  return std::string(check) + ": " + std::string(detail);
}

Execution reject(std::string_view check, std::string_view detail, std::vector<std::string> keys = {}) {
  return Execution{TxStatus::invalid(invalid_reason(check, detail)), std::move(keys), {}};
}

std::string fixed3(double v) { return format_fixed3(v); }

json parse_object(std::string_view payload) {
  json j;
  try {
    j = json::parse(payload.begin(), payload.end());
  } catch (const json::exception&) {
    throw Error(Errc::kParse, "payload is not JSON");
  }
  if (!j.is_object()) throw Error(Errc::kParse, "payload must be a JSON object");
  if (j.dump() != payload) throw Error(Errc::kParse, "payload is not in canonical form");
  return j;
}

std::string string_member(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_string()) throw Error(Errc::kParse, std::string("missing string field '") + name + "'");
  return it->get<std::string>();
}

void require_only(const json& j, std::initializer_list<const char*> names) {
  if (j.size() != names.size()) throw Error(Errc::kParse, "unexpected fields in payload");
  for (const char* n : names) {
    if (!j.contains(n)) throw Error(Errc::kParse, std::string("missing field '") + n + "'");
  }
}

bool is_lower_hex64(const std::string& s) {
  return s.size() == 64 && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

struct BatchCheck {
  TxStatus status;
  std::optional<Batch> batch;
  std::vector<std::string> keys;
};

BatchCheck check_batch(std::string_view payload, const Identity& submitter, const StateView& state,
                       const ChaincodeConfig& config) {
  BatchCheck out;
  auto fail = [&](std::string_view check, std::string_view detail) {
    out.status = TxStatus::invalid(invalid_reason(check, detail));
    return out;
  };

  if (submitter.role != Role::kProducer) return fail(reason::kUnauthorized, "only producers submit batches");

  Batch batch;
  try {
    batch = parse_canonical_batch(payload);
  } catch (const Error& e) {
    return fail(reason::kSchema, e.what());
  }
  out.keys.push_back(batch_key(batch.producer_id, batch.batch_id));

  if (batch.producer_id != submitter.name) return fail(reason::kUnauthorized, "producer_id does not match submitter");
  if (batch.schema_version != kBatchSchemaVersion) return fail(reason::kSchema, "unsupported schema_version");
  if (batch.aggregates.empty() || batch.aggregates.size() > static_cast<std::size_t>(kWindowMinutes)) {
    return fail(reason::kSchema, "a batch carries 1 to 5 aggregates");
  }
  const std::string prefix = batch.producer_id + "-";
  const std::string_view id = batch.batch_id;
  if (id.size() != prefix.size() + 12 || id.substr(0, prefix.size()) != prefix || id[prefix.size() + 8] != '-') {
    return fail(reason::kSchema, "batch_id must be <producer>-<YYYYMMDD>-<NNN>");
  }
  for (const auto& agg : batch.aggregates) {
    if (agg.phase_count < 1 || agg.phase_count > kPlantPhases) return fail(reason::kSchema, "phase_count out of 1..24");
    if (classify_quality(agg.phase_count, agg.flagged()) != agg.quality) {
      return fail(reason::kSchema, "quality inconsistent with flags and phase_count");
    }
  }

  if (state.get(out.keys.front())) {
    return fail(reason::kDuplicate, "batch_id " + batch.batch_id + " already recorded");
  }

  const Timestamp start = batch.window_start;
  if (start.second_of_day() % (kWindowMinutes * kSecondsPerMinute) != 0) {
    return fail(reason::kTimestamps, "window_start not on a five-minute boundary");
  }
  if (batch.window_end != start + kWindowMinutes * kSecondsPerMinute) {
    return fail(reason::kTimestamps, "window_end must be window_start + 5 min");
  }
  if (make_batch_id(batch.producer_id, Date::of(start), window_index(start)) != batch.batch_id) {
    return fail(reason::kTimestamps, "batch_id does not match window_start");
  }
  for (std::size_t i = 0; i < batch.aggregates.size(); ++i) {
    const Timestamp m = batch.aggregates[i].minute_start;
    if (m.second_of_minute() != 0) return fail(reason::kTimestamps, "minute_start not minute-aligned");
    if (m < start || m >= batch.window_end) return fail(reason::kTimestamps, "aggregate outside its window");
    if (i > 0 && !(batch.aggregates[i - 1].minute_start < m)) {
      return fail(reason::kTimestamps, "aggregates not strictly increasing");
    }
  }
  if (auto last = state.last_with_prefix("batch/" + batch.producer_id + "/")) {
    const Batch prev = parse_canonical_batch(last->second);
    if (start < prev.window_end) {
      return fail(reason::kTimestamps, "window_start " + start.to_string() + " precedes last committed window_end " +
                                           prev.window_end.to_string());
    }
  }

  const double max_power = config.plant_capacity_watts * config.capacity_margin;
  for (const auto& agg : batch.aggregates) {
    if (agg.flagged()) continue;
    const std::string at = " at " + agg.minute_start.to_string();
    if (agg.total_power < 0.0 || agg.total_power > max_power) {
      return fail(reason::kRange, "total_power " + fixed3(agg.total_power) + at);
    }
    if (agg.avg_voltage < config.voltage_min || agg.avg_voltage > config.voltage_max) {
      return fail(reason::kRange, "avg_voltage " + fixed3(agg.avg_voltage) + at);
    }
    if (agg.avg_frequency < config.frequency_min || agg.avg_frequency > config.frequency_max) {
      return fail(reason::kRange, "avg_frequency " + fixed3(agg.avg_frequency) + at);
    }
  }

  out.batch = std::move(batch);
  return out;
}

std::optional<CreditState> action_target(std::string_view function, const json& payload) {
  if (function == fn::kVerifyCredit) return CreditState::kVerified;
  if (function == fn::kIssueCredit) return CreditState::kIssued;
  auto it = payload.find("target");
  if (it == payload.end() || !it->is_string()) return std::nullopt;
  const CreditState t = parse_credit_state(it->get<std::string>());
  if (t != CreditState::kSold && t != CreditState::kRetired) return std::nullopt;
  return t;
}

CreditState required_source(CreditState target) {
  switch (target) {
    case CreditState::kVerified: return CreditState::kPending;
    case CreditState::kIssued: return CreditState::kVerified;
    default: return CreditState::kIssued;
  }
}

}  // namespace

std::string batch_key(std::string_view producer, std::string_view batch_id) {
  return "batch/" + std::string(producer) + "/" + std::string(batch_id);
}
std::string credit_key(std::string_view serial) { return "credit/" + std::string(serial); }
std::string accrual_key(std::string_view producer, const Date& date) {
  return "accrual/" + std::string(producer) + "/" + date.to_string();
}
std::string quarantine_prefix(const Date& date) { return "quarantine/" + date.to_string() + "/"; }
std::string quarantine_key(const Date& date, Timestamp minute_start) {
  return quarantine_prefix(date) + minute_label(minute_start);
}
std::string manifest_key(std::string_view producer, const Date& date) {
  return "manifest/" + std::string(producer) + "/" + date.to_string();
}

double compute_energy(double p_avg_watts, double duration_min) {
  if (!(p_avg_watts >= 0.0)) throw Error(Errc::kNegativePower, "average power must be non-negative");
  if (!(duration_min > 0.0)) throw Error(Errc::kNonPositiveDuration, "duration must be positive");
  return p_avg_watts * duration_min / (60.0 * 1000.0);
}

double compute_co2(double energy_kwh, const EmissionConfig& config) {
  if (!(config.factor_kg_per_kwh >= kMinEmissionFactor && config.factor_kg_per_kwh <= kMaxEmissionFactor)) {
    throw Error(Errc::kFactorOutOfRange, "emission factor must lie in [0.25, 1.06] kg/kWh");
  }
  if (!(energy_kwh >= 0.0)) throw Error(Errc::kInvalidArgument, "energy must be non-negative");
  return energy_kwh * config.factor_kg_per_kwh;
}

std::string_view credit_state_name(CreditState s) {
  switch (s) {
    case CreditState::kPending: return "PENDING";
    case CreditState::kVerified: return "VERIFIED";
    case CreditState::kIssued: return "ISSUED";
    case CreditState::kSold: return "SOLD";
    case CreditState::kRetired: return "RETIRED";
  }
  return "";
}

CreditState parse_credit_state(std::string_view name) {
  for (auto s : {CreditState::kPending, CreditState::kVerified, CreditState::kIssued, CreditState::kSold,
                 CreditState::kRetired}) {
    if (credit_state_name(s) == name) return s;
  }
  throw Error(Errc::kParse, "unknown credit state '" + std::string(name) + "'");
}

std::string credit_to_json(const CarbonCredit& c) {
  json exclusions = json::array();
  for (const auto& e : c.exclusions) {
    exclusions.push_back(json{{"codes", e.codes}, {"minute_start", e.minute_start.to_string()}});
  }
  json partial = json::array();
  for (const auto& p : c.partial_minutes) {
    partial.push_back(json{{"minute_start", p.minute_start.to_string()}, {"phase_count", p.phase_count}});
  }
  const json energy{{"co2_kg", c.energy.co2_kg},
                    {"duration_min", c.energy.duration_min},
                    {"energy_kwh", c.energy.energy_kwh},
                    {"factor_used", c.energy.factor_used},
                    {"p_avg", c.energy.p_avg},
                    {"period_end", c.energy.period_end.to_string()},
                    {"period_start", c.energy.period_start.to_string()}};
  return json{{"amount_kg", format_fixed3(c.energy.co2_kg)},
              {"certifier", c.certifier},
              {"energy", energy},
              {"exclusions", std::move(exclusions)},
              {"partial_minutes", std::move(partial)},
              {"period", c.period.to_string()},
              {"producer", c.producer},
              {"serial", c.serial},
              {"state", credit_state_name(c.state)}}
      .dump();
}

CarbonCredit credit_from_json(std::string_view text) {
  try {
    const json j = json::parse(text.begin(), text.end());
    CarbonCredit c;
    c.serial = j.at("serial").get<std::string>();
    c.producer = j.at("producer").get<std::string>();
    c.period = Date::parse(j.at("period").get<std::string>());
    c.state = parse_credit_state(j.at("state").get<std::string>());
    c.certifier = j.at("certifier").get<std::string>();
    const json& e = j.at("energy");
    c.energy.period_start = Timestamp::parse(e.at("period_start").get<std::string>());
    c.energy.period_end = Timestamp::parse(e.at("period_end").get<std::string>());
    c.energy.p_avg = e.at("p_avg").get<double>();
    c.energy.duration_min = e.at("duration_min").get<double>();
    c.energy.energy_kwh = e.at("energy_kwh").get<double>();
    c.energy.co2_kg = e.at("co2_kg").get<double>();
    c.energy.factor_used = e.at("factor_used").get<double>();
    for (const json& x : j.at("exclusions")) {
      c.exclusions.push_back({Timestamp::parse(x.at("minute_start").get<std::string>()),
                              x.at("codes").get<std::vector<std::string>>()});
    }
    for (const json& p : j.at("partial_minutes")) {
      c.partial_minutes.push_back({Timestamp::parse(p.at("minute_start").get<std::string>()),
                                   p.at("phase_count").get<int>()});
    }
    return c;
  } catch (const json::exception& e) {
    throw Error(Errc::kParse, std::string("malformed credit record: ") + e.what());
  }
}

std::string anchor_day_payload(std::string_view producer, const Date& date,
                               const std::vector<std::pair<std::string, Hash256>>& files,
                               const std::vector<int>& missing_windows) {
  json f = json::object();
  for (const auto& [name, h] : files) f[name] = h.to_hex();
  std::vector<int> missing = missing_windows;
  std::sort(missing.begin(), missing.end());
  return json{{"date", date.to_string()},
              {"files", std::move(f)},
              {"missing_windows", missing},
              {"producer_id", producer}}
      .dump();
}

std::string accrue_day_payload(std::string_view producer, const Date& date, double factor_kg_per_kwh) {
  return json{{"date", date.to_string()}, {"factor_kg_per_kwh", factor_kg_per_kwh}, {"producer_id", producer}}.dump();
}

std::string credit_action_payload(std::string_view serial, std::optional<CreditState> target) {
  json j{{"serial", serial}};
  if (target) j["target"] = credit_state_name(*target);
  return j.dump();
}

TxStatus validate_batch(std::string_view payload, const Identity& submitter, const StateView& state,
                        const ChaincodeConfig& config) {
  return check_batch(payload, submitter, state, config).status;
}

std::vector<std::pair<std::string, std::string>> quarantine(const Batch& batch) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& agg : batch.aggregates) {
    if (!agg.flagged()) continue;
    json flags = json::array();
    for (const auto& f : agg.flags) flags.push_back(json{{"code", anomaly_name(f.kind)}, {"detail", f.detail}});
    const json entry{{"avg_frequency", agg.avg_frequency},
                     {"avg_voltage", agg.avg_voltage},
                     {"batch_id", batch.batch_id},
                     {"flags", std::move(flags)},
                     {"minute_start", agg.minute_start.to_string()},
                     {"phase_count", agg.phase_count},
                     {"producer_id", batch.producer_id},
                     {"total_power", agg.total_power}};
    out.emplace_back(quarantine_key(Date::of(agg.minute_start), agg.minute_start), entry.dump());
  }
  return out;
}

Execution CreditChaincode::execute(const Invocation& call, const StateView& state) const {
  if (call.function == fn::kSubmitBatch) return submit_batch(call, state);
  if (call.function == fn::kAnchorDay) return anchor_day(call, state);
  if (call.function == fn::kAccrueDay) return accrue_day(call, state);
  if (call.function == fn::kVerifyCredit || call.function == fn::kIssueCredit ||
      call.function == fn::kTransitionCredit) {
    return advance_credit(call, state);
  }
  return reject(reason::kSchema, "unknown function '" + std::string(call.function) + "'");
}

Execution CreditChaincode::submit_batch(const Invocation& call, const StateView& state) const {
  BatchCheck check = check_batch(call.payload, call.submitter, state, config_);
  Execution ex{check.status, check.keys, {}};
  if (!check.status.valid) return ex;
  ex.writes[check.keys.front()] = std::string(call.payload);
  for (auto& [k, v] : quarantine(*check.batch)) ex.writes[k] = std::move(v);
  return ex;
}

Execution CreditChaincode::anchor_day(const Invocation& call, const StateView& state) const {
  if (call.submitter.role != Role::kProducer) return reject(reason::kUnauthorized, "only producers anchor days");
  json j;
  Date date;
  std::string producer;
  std::set<int> missing;
  try {
    j = parse_object(call.payload);
    require_only(j, {"date", "files", "missing_windows", "producer_id"});
    date = Date::parse(string_member(j, "date"));
    producer = string_member(j, "producer_id");
    const json& files = j.at("files");
    if (!files.is_object()) throw Error(Errc::kParse, "files must be an object");
    for (auto it = files.begin(); it != files.end(); ++it) {
      if (!it.value().is_string() || !is_lower_hex64(it.value().get<std::string>())) {
        throw Error(Errc::kParse, "file digests must be 64 lowercase hex characters");
      }
    }
    for (const json& w : j.at("missing_windows")) {
      if (!w.is_number_integer()) throw Error(Errc::kParse, "missing_windows must hold integers");
      const int idx = w.get<int>();
      if (idx < 0 || idx >= kWindowsPerDay || !missing.insert(idx).second) {
        throw Error(Errc::kParse, "missing window index invalid or repeated");
      }
    }
  } catch (const Error& e) {
    return reject(reason::kSchema, e.what());
  }
  const std::string key = manifest_key(producer, date);
  if (producer != call.submitter.name) return reject(reason::kUnauthorized, "producer_id does not match submitter", {key});
  if (state.get(key)) return reject(reason::kDuplicate, "day " + date.to_string() + " already anchored", {key});
  for (int w = 0; w < kWindowsPerDay; ++w) {
    const bool committed = state.get(batch_key(producer, make_batch_id(producer, date, w))).has_value();
    const bool listed = missing.count(w) > 0;
    if (committed == listed) {
      return reject(reason::kUnresolved,
                    "window " + std::to_string(w) + (committed ? " committed but listed missing" : " neither committed nor listed missing"),
                    {key});
    }
  }
  Execution ex{TxStatus::ok(), {key}, {}};
  ex.writes[key] = std::string(call.payload);
  return ex;
}

Execution CreditChaincode::accrue_day(const Invocation& call, const StateView& state) const {
  if (call.submitter.role != Role::kProducer) return reject(reason::kUnauthorized, "only producers accrue credits");
  Date date;
  std::string producer;
  double factor = 0.0;
  try {
    const json j = parse_object(call.payload);
    require_only(j, {"date", "factor_kg_per_kwh", "producer_id"});
    date = Date::parse(string_member(j, "date"));
    producer = string_member(j, "producer_id");
    if (!j.at("factor_kg_per_kwh").is_number()) throw Error(Errc::kParse, "factor must be numeric");
    factor = j.at("factor_kg_per_kwh").get<double>();
  } catch (const Error& e) {
    return reject(reason::kSchema, e.what());
  }
  const std::string akey = accrual_key(producer, date);
  if (producer != call.submitter.name) return reject(reason::kUnauthorized, "producer_id does not match submitter", {akey});
  if (!(factor >= kMinEmissionFactor && factor <= kMaxEmissionFactor)) {
    return reject(reason::kFactorOutOfRange, "factor must lie in [0.25, 1.06]", {akey});
  }
  if (state.get(akey)) return reject(reason::kAlreadyAccrued, date.to_string(), {akey});
  if (!state.get(manifest_key(producer, date))) {
    return reject(reason::kUnresolved, "day " + date.to_string() + " has no anchored manifest", {akey});
  }

  CarbonCredit credit;
  credit.producer = producer;
  credit.period = date;
  double power_sum = 0.0;
  double energy_sum = 0.0;
  int minutes = 0;
  const std::string prefix = "batch/" + producer + "/" + producer + "-" + date.compact() + "-";
  for (const auto& [key, value] : state.scan_prefix(prefix)) {
    const Batch batch = parse_canonical_batch(value);
    for (const auto& agg : batch.aggregates) {
      if (agg.flagged()) {
        ExcludedMinute ex{agg.minute_start, {}};
        for (const auto& f : agg.flags) ex.codes.emplace_back(anomaly_name(f.kind));
        ex.codes.erase(std::unique(ex.codes.begin(), ex.codes.end()), ex.codes.end());
        credit.exclusions.push_back(std::move(ex));
        continue;
      }
      if (agg.quality == Quality::kPartial) credit.partial_minutes.push_back({agg.minute_start, agg.phase_count});
      power_sum += agg.total_power;
      energy_sum += compute_energy(agg.total_power, 1.0);
      ++minutes;
    }
  }
  if (minutes == 0 || !(energy_sum > 0.0)) {
    return reject(reason::kNoValidEnergy, "no unflagged energy on " + date.to_string(), {akey});
  }

  const int seq = static_cast<int>(state.scan_prefix("accrual/" + producer + "/").size()) + 1;
  char seq_text[16];
  std::snprintf(seq_text, sizeof(seq_text), "%04d", seq);
  credit.serial = "CC-" + producer + "-" + date.compact() + "-" + seq_text;
  credit.state = CreditState::kPending;
  credit.energy.period_start = date.midnight();
  credit.energy.period_end = date.next().midnight();
  credit.energy.duration_min = minutes;
  credit.energy.p_avg = power_sum / minutes;
  credit.energy.energy_kwh = compute_energy(credit.energy.p_avg, credit.energy.duration_min);
  credit.energy.factor_used = factor;
  credit.energy.co2_kg = compute_co2(credit.energy.energy_kwh, EmissionConfig{factor, config_.plant_capacity_watts});

  const std::string ckey = credit_key(credit.serial);
  Execution ex{TxStatus::ok(), {akey, ckey}, {}};
  ex.writes[akey] = json{{"serial", credit.serial}}.dump();
  ex.writes[ckey] = credit_to_json(credit);
  return ex;
}

Execution CreditChaincode::advance_credit(const Invocation& call, const StateView& state) const {
  std::string serial;
  std::optional<CreditState> target;
  try {
    const json j = parse_object(call.payload);
    serial = string_member(j, "serial");
    if (call.function == fn::kTransitionCredit) {
      require_only(j, {"serial", "target"});
    } else {
      require_only(j, {"serial"});
    }
    target = action_target(call.function, j);
  } catch (const Error& e) {
    return reject(reason::kSchema, e.what());
  }
  const std::string key = credit_key(serial);
  if (!target) return reject(reason::kSchema, "transition target must be SOLD or RETIRED", {key});

  const auto stored = state.get(key);
  if (!stored) return reject(reason::kNotFound, "credit " + serial, {key});
  CarbonCredit credit = credit_from_json(*stored);

  const bool certifier_step = *target == CreditState::kVerified || *target == CreditState::kIssued;
  if (certifier_step && call.submitter.role != Role::kCertifier) {
    return reject(reason::kUnauthorized, std::string(role_name(call.submitter.role)) + " cannot certify credits", {key});
  }
  if (!certifier_step && (call.submitter.role != Role::kProducer || call.submitter.name != credit.producer)) {
    return reject(reason::kUnauthorized, "only the owning producer may sell or retire", {key});
  }
  if (credit.state != required_source(*target)) {
    return reject(reason::kIllegalTransition,
                  std::string(credit_state_name(credit.state)) + " -> " + std::string(credit_state_name(*target)), {key});
  }

  credit.state = *target;
  if (*target == CreditState::kVerified) credit.certifier = call.submitter.name;
  Execution ex{TxStatus::ok(), {key}, {}};
  ex.writes[key] = credit_to_json(credit);
  return ex;
}

// ---------------------------------------------------------------------------
// CreditsClient

CarbonCredit CreditsClient::submit(std::string_view function, std::string payload, const std::string& actor,
                                   const std::string& result_key_hint) {
  const Hash256 id = ledger_.submit_tx(function, std::move(payload), actor);
  const auto tx = ledger_.lookup_tx(id);
  if (!tx) throw Error(Errc::kNotFound, "transaction vanished before commit");
  if (!tx->status.valid) {
    const std::string_view check = tx->status.check();
    Errc code = Errc::kRejected;
    if (check == reason::kUnauthorized) code = Errc::kUnauthorized;
    else if (check == reason::kIllegalTransition) code = Errc::kIllegalTransition;
    else if (check == reason::kAlreadyAccrued) code = Errc::kAlreadyAccrued;
    else if (check == reason::kNoValidEnergy) code = Errc::kNoValidEnergy;
    else if (check == reason::kFactorOutOfRange) code = Errc::kFactorOutOfRange;
    else if (check == reason::kNotFound) code = Errc::kNotFound;
    throw Error(code, tx->status.reason);
  }
  for (const auto& [k, v] : tx->writes) {
    if (k.rfind(result_key_hint, 0) == 0) return credit_from_json(v);
  }
  throw Error(Errc::kNotFound, "transaction wrote no credit record");
}

CarbonCredit CreditsClient::accrue_day(const std::string& producer, const Date& date, const EmissionConfig& emission) {
  return submit(fn::kAccrueDay, accrue_day_payload(producer, date, emission.factor_kg_per_kwh), producer, "credit/");
}

CarbonCredit CreditsClient::verify_credit(const std::string& serial, const std::string& certifier) {
  return submit(fn::kVerifyCredit, credit_action_payload(serial), certifier, credit_key(serial));
}

CarbonCredit CreditsClient::issue_credit(const std::string& serial, const std::string& actor) {
  return submit(fn::kIssueCredit, credit_action_payload(serial), actor, credit_key(serial));
}

CarbonCredit CreditsClient::transition(const std::string& serial, CreditState target, const std::string& actor) {
  return submit(fn::kTransitionCredit, credit_action_payload(serial, target), actor, credit_key(serial));
}

std::optional<CarbonCredit> CreditsClient::find(const std::string& serial) const {
  const auto value = ledger_.query_state(credit_key(serial));
  if (!value) return std::nullopt;
  return credit_from_json(*value);
}

}  // namespace carbon
