#include "carbon/config.hpp"

#include <set>

#include <json.hpp>

#include "carbon/errors.hpp"
#include "carbon/io.hpp"

namespace carbon {
namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) fail(it.key(), "unknown field");
    }
  }

  const json* find(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(key, "expected a number");
      out = v->get<double>();
    }
  }

  template <typename Int>
  void integer(const std::string& key, Int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(key, "expected an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_unsigned() || v->get<std::int64_t>() >= 0) {
          out = v->get<Int>();
          return;
        }
        fail(key, "expected a non-negative integer");
      } else {
        out = v->get<Int>();
      }
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }

  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw Error(Errc::kParse, "config field '" + (key.empty() ? path_ : sub(key)) + "': " + what);
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Date parse_date_field(const json& v, const std::string& field) {
  if (!v.is_string()) throw Error(Errc::kParse, "config field '" + field + "': expected YYYY-MM-DD");
  try {
    return Date::parse(v.get<std::string>());
  } catch (const Error&) {
    throw Error(Errc::kParse, "config field '" + field + "': malformed date '" + v.get<std::string>() + "'");
  }
}

void read_fleet(const json& j, FleetConfig& f) {
  Reader r(j, "fleet");
  r.number("peak_plant_power", f.profile.peak_plant_power);
  r.number("noise_stddev_fraction", f.profile.noise_stddev_fraction);
  r.integer("sunrise_second", f.profile.sunrise);
  r.integer("sunset_second", f.profile.sunset);
  r.number("plant_capacity_watts", f.plant_capacity_watts);
  r.number("accuracy_fraction", f.accuracy_fraction);
  r.number("nominal_voltage", f.nominal_voltage);
  r.number("voltage_stddev", f.voltage_stddev);
  r.number("nominal_frequency", f.nominal_frequency);
  r.number("frequency_stddev", f.frequency_stddev);
  r.number("nominal_power_factor", f.nominal_power_factor);
  r.number("power_factor_stddev", f.power_factor_stddev);
  r.integer("begin_second", f.begin_second);
  r.integer("end_second", f.end_second);
  if (const json* c = r.find("collectors")) {
    if (!c->is_object()) r.fail("collectors", "expected an object of meter lists");
    f.collectors.clear();
    for (auto it = c->begin(); it != c->end(); ++it) {
      if (!it.value().is_array()) r.fail("collectors", "expected meter id arrays");
      std::vector<int> meters;
      for (const json& m : it.value()) {
        if (!m.is_number_integer()) r.fail("collectors", "meter ids must be integers");
        meters.push_back(m.get<int>());
      }
      f.collectors[it.key()] = std::move(meters);
    }
  }
  if (const json* s = r.find("spikes")) {
    if (!s->is_array()) r.fail("spikes", "expected an array");
    f.spikes.clear();
    for (const json& item : *s) {
      InjectedSpike spike;
      Reader sr(item, "fleet.spikes[]");
      sr.integer("meter_id", spike.meter_id);
      sr.integer("phase", spike.phase);
      sr.integer("minute_of_day", spike.minute_of_day);
      sr.number("active_power", spike.active_power);
      f.spikes.push_back(spike);
    }
  }
}

json fleet_json(const FleetConfig& f) {
  json spikes = json::array();
  for (const auto& s : f.spikes) {
    spikes.push_back({{"active_power", s.active_power},
                      {"meter_id", s.meter_id},
                      {"minute_of_day", s.minute_of_day},
                      {"phase", s.phase}});
  }
  return json{{"accuracy_fraction", f.accuracy_fraction},
              {"begin_second", f.begin_second},
              {"collectors", f.collectors},
              {"end_second", f.end_second},
              {"frequency_stddev", f.frequency_stddev},
              {"noise_stddev_fraction", f.profile.noise_stddev_fraction},
              {"nominal_frequency", f.nominal_frequency},
              {"nominal_power_factor", f.nominal_power_factor},
              {"nominal_voltage", f.nominal_voltage},
              {"peak_plant_power", f.profile.peak_plant_power},
              {"plant_capacity_watts", f.plant_capacity_watts},
              {"power_factor_stddev", f.power_factor_stddev},
              {"spikes", std::move(spikes)},
              {"sunrise_second", f.profile.sunrise},
              {"sunset_second", f.profile.sunset},
              {"voltage_stddev", f.voltage_stddev}};
}

}  // namespace

void RunConfig::apply_seed(std::uint64_t s) {
  seed = s;
  fleet.seed = s;
  faults.rng_seed = s;
}

void RunConfig::validate() const {
  if (producer_id.empty() || producer_id.find('/') != std::string::npos) {
    throw Error(Errc::kInvalidArgument, "producer_id must be non-empty and contain no '/'");
  }
  if (certifier.empty() || auditor.empty()) throw Error(Errc::kInvalidArgument, "identity names must be non-empty");
  std::set<std::string> names{producer_id, certifier, auditor};
  if (names.size() != 3) throw Error(Errc::kInvalidArgument, "producer, certifier and auditor need distinct names");
  if (dates.empty()) throw Error(Errc::kInvalidArgument, "at least one date is required");
  fleet.validate();
  faults.validate();
  rules.validate();
  emission.validate();
  if (watermark_seconds < faults.reorder_jitter_max) {
    throw Error(Errc::kInvalidArgument, "watermark must cover the reorder jitter");
  }
  if (block_size == 0) throw Error(Errc::kInvalidArgument, "block_size must be positive");
}

ChaincodeConfig RunConfig::chaincode_config() const {
  ChaincodeConfig c;
  c.plant_capacity_watts = emission.plant_capacity_watts;
  c.voltage_min = rules.voltage_min;
  c.voltage_max = rules.voltage_max;
  c.frequency_min = rules.frequency_min;
  c.frequency_max = rules.frequency_max;
  return c;
}

RunConfig parse_run_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw Error(Errc::kParse, std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  Reader r(j, "");
  r.string("producer_id", c.producer_id);
  if (const json* ids = r.find("identities")) {
    Reader ir(*ids, "identities");
    ir.string("certifier", c.certifier);
    ir.string("auditor", c.auditor);
  }
  if (const json* d = r.find("date")) c.dates = {parse_date_field(*d, "date")};
  if (const json* ds = r.find("dates")) {
    if (!ds->is_array() || ds->empty()) r.fail("dates", "expected a non-empty array");
    c.dates.clear();
    for (const json& d : *ds) c.dates.push_back(parse_date_field(d, "dates"));
  }
  std::uint64_t seed = c.seed;
  r.integer("seed", seed);
  c.apply_seed(seed);
  r.integer("network_seed", c.network_seed);
  if (const json* f = r.find("fleet")) read_fleet(*f, c.fleet);
  if (const json* f = r.find("faults")) {
    Reader fr(*f, "faults");
    fr.number("duplicate_probability", c.faults.duplicate_probability);
    fr.number("drop_then_retry_probability", c.faults.drop_then_retry_probability);
    fr.integer("reorder_jitter_max", c.faults.reorder_jitter_max);
    fr.integer("rng_seed", c.faults.rng_seed);
  }
  if (const json* f = r.find("rules")) {
    Reader rr(*f, "rules");
    rr.number("phase_power_min", c.rules.phase_power_min);
    rr.number("phase_power_max", c.rules.phase_power_max);
    rr.number("voltage_min", c.rules.voltage_min);
    rr.number("voltage_max", c.rules.voltage_max);
    rr.number("frequency_min", c.rules.frequency_min);
    rr.number("frequency_max", c.rules.frequency_max);
    rr.number("max_ramp_watts_per_minute", c.rules.max_ramp_watts_per_minute);
  }
  if (const json* f = r.find("emission")) {
    Reader er(*f, "emission");
    er.number("factor_kg_per_kwh", c.emission.factor_kg_per_kwh);
    er.number("plant_capacity_watts", c.emission.plant_capacity_watts);
  }
  r.integer("watermark_seconds", c.watermark_seconds);
  r.integer("block_size", c.block_size);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) { return parse_run_config(read_file(path)); }

std::string serialize_run_config(const RunConfig& c) {
  json dates = json::array();
  for (const auto& d : c.dates) dates.push_back(d.to_string());
  const json j{{"block_size", c.block_size},
               {"dates", std::move(dates)},
               {"emission",
                {{"factor_kg_per_kwh", c.emission.factor_kg_per_kwh},
                 {"plant_capacity_watts", c.emission.plant_capacity_watts}}},
               {"faults",
                {{"drop_then_retry_probability", c.faults.drop_then_retry_probability},
                 {"duplicate_probability", c.faults.duplicate_probability},
                 {"reorder_jitter_max", c.faults.reorder_jitter_max},
                 {"rng_seed", c.faults.rng_seed}}},
               {"fleet", fleet_json(c.fleet)},
               {"identities", {{"auditor", c.auditor}, {"certifier", c.certifier}}},
               {"network_seed", c.network_seed},
               {"producer_id", c.producer_id},
               {"rules",
                {{"frequency_max", c.rules.frequency_max},
                 {"frequency_min", c.rules.frequency_min},
                 {"max_ramp_watts_per_minute", c.rules.max_ramp_watts_per_minute},
                 {"phase_power_max", c.rules.phase_power_max},
                 {"phase_power_min", c.rules.phase_power_min},
                 {"voltage_max", c.rules.voltage_max},
                 {"voltage_min", c.rules.voltage_min}}},
               {"seed", c.seed},
               {"watermark_seconds", c.watermark_seconds}};
  return j.dump(2) + "\n";
}

}  // namespace carbon
