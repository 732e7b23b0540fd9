#include "carbon/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

#include <json.hpp>

#include "carbon/errors.hpp"

namespace carbon {
namespace {

using nlohmann::json;

void append_field_name(std::string& out, std::string_view name) {
  out += '"';
  out += name;
  out += "\":";
}

void append_flag(std::string& out, const AnomalyCode& code) {
  out += '{';
  append_field_name(out, "code");
  append_json_string(out, anomaly_name(code.kind));
  out += ',';
  append_field_name(out, "detail");
  append_json_string(out, code.detail);
  out += '}';
}

void append_aggregate(std::string& out, const PlantMinuteAggregate& agg) {
  std::vector<AnomalyCode> flags = agg.flags;
  std::sort(flags.begin(), flags.end());

  out += '{';
  append_field_name(out, "avg_frequency");
  out += format_fixed3(agg.avg_frequency);
  out += ',';
  append_field_name(out, "avg_voltage");
  out += format_fixed3(agg.avg_voltage);
  out += ',';
  append_field_name(out, "flags");
  out += '[';
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (i > 0) out += ',';
    append_flag(out, flags[i]);
  }
  out += "],";
  append_field_name(out, "minute_start");
  append_json_string(out, agg.minute_start.to_string());
  out += ',';
  append_field_name(out, "phase_count");
  out += std::to_string(agg.phase_count);
  out += ',';
  append_field_name(out, "quality");
  append_json_string(out, quality_name(agg.quality));
  out += ',';
  append_field_name(out, "total_power");
  out += format_fixed3(agg.total_power);
  out += '}';
}

const json& require(const json& obj, const char* field, std::string_view where) {
  auto it = obj.find(field);
  if (it == obj.end()) {
    throw Error(Errc::kParse, "missing field '" + std::string(field) + "' in " + std::string(where));
  }
  return *it;
}

void require_exact_keys(const json& obj, const std::set<std::string>& expected, std::string_view where) {
  if (!obj.is_object()) throw Error(Errc::kParse, std::string(where) + " must be an object");
  for (const auto& name : expected) require(obj, name.c_str(), where);
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!expected.count(it.key())) {
      throw Error(Errc::kParse, "unexpected field '" + it.key() + "' in " + std::string(where));
    }
  }
}

double require_number(const json& obj, const char* field, std::string_view where) {
  const json& v = require(obj, field, where);
  if (!v.is_number()) throw Error(Errc::kParse, "field '" + std::string(field) + "' must be numeric");
  return v.get<double>();
}

long long require_integer(const json& obj, const char* field, std::string_view where) {
  const json& v = require(obj, field, where);
  if (!v.is_number_integer()) throw Error(Errc::kParse, "field '" + std::string(field) + "' must be an integer");
  return v.get<long long>();
}

std::string require_string(const json& obj, const char* field, std::string_view where) {
  const json& v = require(obj, field, where);
  if (!v.is_string()) throw Error(Errc::kParse, "field '" + std::string(field) + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

std::string format_fixed3(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", value);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

double round3(double value) { return std::strtod(format_fixed3(value).c_str(), nullptr); }

void append_json_string(std::string& out, std::string_view text) {
  out += '"';
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char esc[8];
          std::snprintf(esc, sizeof(esc), "\\u%04x", c);
          out += esc;
        } else {
          out += ch;
        }
    }
  }
  out += '"';
}

std::string canonical_serialize(const Batch& batch) {
  std::vector<const PlantMinuteAggregate*> ordered;
  ordered.reserve(batch.aggregates.size());
  for (const auto& agg : batch.aggregates) ordered.push_back(&agg);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto* a, const auto* b) { return a->minute_start < b->minute_start; });

  std::string out;
  out.reserve(256 + 320 * ordered.size());
  out += '{';
  append_field_name(out, "aggregates");
  out += '[';
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    if (i > 0) out += ',';
    append_aggregate(out, *ordered[i]);
  }
  out += "],";
  append_field_name(out, "batch_id");
  append_json_string(out, batch.batch_id);
  out += ',';
  append_field_name(out, "producer_id");
  append_json_string(out, batch.producer_id);
  out += ',';
  append_field_name(out, "schema_version");
  out += std::to_string(batch.schema_version);
  out += ',';
  append_field_name(out, "window_end");
  append_json_string(out, batch.window_end.to_string());
  out += ',';
  append_field_name(out, "window_start");
  append_json_string(out, batch.window_start.to_string());
  out += '}';
  return out;
}

Batch parse_canonical_batch(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw Error(Errc::kParse, std::string("payload is not JSON: ") + e.what());
  }

  static const std::set<std::string> kBatchKeys = {"aggregates", "batch_id", "producer_id",
                                                   "schema_version", "window_end", "window_start"};
  static const std::set<std::string> kAggregateKeys = {"avg_frequency", "avg_voltage", "flags", "minute_start",
                                                       "phase_count", "quality", "total_power"};
  static const std::set<std::string> kFlagKeys = {"code", "detail"};

  require_exact_keys(doc, kBatchKeys, "batch");
  Batch batch;
  batch.batch_id = require_string(doc, "batch_id", "batch");
  batch.producer_id = require_string(doc, "producer_id", "batch");
  batch.schema_version = static_cast<int>(require_integer(doc, "schema_version", "batch"));
  batch.window_start = Timestamp::parse(require_string(doc, "window_start", "batch"));
  batch.window_end = Timestamp::parse(require_string(doc, "window_end", "batch"));

  const json& aggs = require(doc, "aggregates", "batch");
  if (!aggs.is_array()) throw Error(Errc::kParse, "field 'aggregates' must be an array");
  for (const json& a : aggs) {
    require_exact_keys(a, kAggregateKeys, "aggregate");
    PlantMinuteAggregate agg;
    agg.minute_start = Timestamp::parse(require_string(a, "minute_start", "aggregate"));
    agg.total_power = require_number(a, "total_power", "aggregate");
    agg.avg_voltage = require_number(a, "avg_voltage", "aggregate");
    agg.avg_frequency = require_number(a, "avg_frequency", "aggregate");
    agg.phase_count = static_cast<int>(require_integer(a, "phase_count", "aggregate"));
    agg.quality = parse_quality(require_string(a, "quality", "aggregate"));
    const json& flags = require(a, "flags", "aggregate");
    if (!flags.is_array()) throw Error(Errc::kParse, "field 'flags' must be an array");
    for (const json& f : flags) {
      require_exact_keys(f, kFlagKeys, "flag");
      agg.flags.push_back({parse_anomaly(require_string(f, "code", "flag")), require_string(f, "detail", "flag")});
    }
    batch.aggregates.push_back(std::move(agg));
  }

  if (canonical_serialize(batch) != bytes) {
    throw Error(Errc::kParse, "payload is not in canonical form");
  }
  return batch;
}

}  // namespace carbon
