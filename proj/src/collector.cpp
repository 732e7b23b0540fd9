#include "carbon/collector.hpp"

#include <algorithm>
#include <charconv>

#include "carbon/canonical.hpp"
#include "carbon/errors.hpp"
#include "carbon/io.hpp"

namespace carbon {
namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

template <typename T>
T parse_number(std::string_view field, std::string_view origin, std::size_t line_no, const char* name) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw Error(Errc::kParse, std::string(origin) + ":" + std::to_string(line_no) + ": bad " + name + " '" +
                                  std::string(field) + "'");
  }
  return value;
}

}  // namespace

bool CollectorConfig::owns(int meter_id) const {
  return std::find(assigned_meters.begin(), assigned_meters.end(), meter_id) != assigned_meters.end();
}

CollectorConfig reference_collector(const std::string& collector_id, const std::filesystem::path& output_root) {
  CollectorConfig c;
  c.collector_id = collector_id;
  c.output_root = output_root;
  if (collector_id == "A") {
    c.assigned_meters = {1, 2, 3, 4};
  } else if (collector_id == "B") {
    c.assigned_meters = {5, 6, 7, 8};
  } else {
    throw Error(Errc::kInvalidArgument, "reference collectors are A and B, got '" + collector_id + "'");
  }
  return c;
}

Collector::Collector(CollectorConfig config, Date date, bool retain_raw)
    : config_(std::move(config)), date_(date), retain_raw_(retain_raw) {
  std::sort(config_.assigned_meters.begin(), config_.assigned_meters.end());
  if (config_.watermark_seconds < 0) throw Error(Errc::kInvalidArgument, "watermark must be non-negative");
  records_.reserve(static_cast<std::size_t>(kMinutesPerDay) * config_.assigned_meters.size() * kPhasesPerMeter);
}

std::uint64_t Collector::sample_key(const PhaseReading& r) {
  return (static_cast<std::uint64_t>(r.ts.seconds) << 6) | (static_cast<std::uint64_t>(r.meter_id) << 2) |
         static_cast<std::uint64_t>(r.phase);
}

IngestOutcome Collector::ingest(const TransportMessage& msg) {
  advance_clock(msg.delivered_at);
  const PhaseReading& r = msg.reading;
  const Timestamp midnight = date_.midnight();
  const bool valid_shape = config_.owns(r.meter_id) && r.phase >= 1 && r.phase <= kPhasesPerMeter &&
                           r.ts >= midnight && r.ts < midnight + kSecondsPerDay && reading_is_consistent(r);
  if (!valid_shape) {
    ++counters_.rejected;
    return IngestOutcome::kRejected;
  }
  const int minute = static_cast<int>((r.ts - midnight) / kSecondsPerMinute);
  if (minute < next_open_minute_) {
    // Past the watermark; no backfill.
    ++counters_.rejected;
    return IngestOutcome::kRejected;
  }
  if (!seen_.insert(sample_key(r)).second) {
    ++counters_.duplicates;
    return IngestOutcome::kDuplicate;
  }
  buffer_[RawKey{align_to_minute(r.ts).seconds, r.meter_id, r.phase}].push_back(r);
  ++counters_.accepted;
  return IngestOutcome::kAccepted;
}

void Collector::advance_clock(Timestamp now) {
  const Timestamp midnight = date_.midnight();
  while (next_open_minute_ < kMinutesPerDay &&
         midnight + (static_cast<std::int64_t>(next_open_minute_) + 1) * kSecondsPerMinute +
                 config_.watermark_seconds <=
             now) {
    close_minute_index(next_open_minute_);
    ++next_open_minute_;
  }
}

void Collector::close_minute_index(int minute_index) {
  const Timestamp start = date_.midnight() + static_cast<std::int64_t>(minute_index) * kSecondsPerMinute;
  for (int meter : config_.assigned_meters) {
    for (int phase = 1; phase <= kPhasesPerMeter; ++phase) {
      records_.push_back(close_minute(meter, phase, start));
    }
  }
}

MinuteRecord Collector::close_minute(int meter_id, int phase, Timestamp minute_start) {
  MinuteRecord rec;
  rec.meter_id = meter_id;
  rec.phase = phase;
  rec.minute_start = minute_start;

  auto it = buffer_.find(RawKey{minute_start.seconds, meter_id, phase});
  if (it == buffer_.end()) return rec;

  std::vector<PhaseReading> samples = std::move(it->second);
  buffer_.erase(it);
  // Summation order is fixed by timestamp so arrival order cannot change the result.
  std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.ts < b.ts; });

  PhaseAverages sum;
  for (const auto& s : samples) {
    sum.active_power += s.active_power;
    sum.voltage += s.voltage;
    sum.current += s.current;
    sum.power_factor += s.power_factor;
    sum.frequency += s.frequency;
    sum.apparent_power += s.apparent_power;
    seen_.erase(sample_key(s));
  }
  const auto n = static_cast<double>(samples.size());
  rec.averages = PhaseAverages{sum.active_power / n,  sum.voltage / n,   sum.current / n,
                               sum.power_factor / n,  sum.frequency / n, sum.apparent_power / n};
  rec.sample_count = static_cast<int>(samples.size());
  if (retain_raw_) raw_[RawKey{minute_start.seconds, meter_id, phase}] = std::move(samples);
  return rec;
}

std::vector<MinuteRecord> Collector::finish_day() {
  while (next_open_minute_ < kMinutesPerDay) {
    close_minute_index(next_open_minute_);
    ++next_open_minute_;
  }
  std::vector<MinuteRecord> out = records_;
  std::sort(out.begin(), out.end(), [](const MinuteRecord& a, const MinuteRecord& b) {
    return std::tie(a.minute_start, a.meter_id, a.phase) < std::tie(b.minute_start, b.meter_id, b.phase);
  });
  return out;
}

std::filesystem::path day_directory(const std::filesystem::path& output_root, std::string_view collector_id,
                                    const Date& date) {
  return output_root / std::string(collector_id) / date.to_string();
}

std::string render_day_csv(std::span<const MinuteRecord> rows) {
  std::vector<const MinuteRecord*> sorted;
  sorted.reserve(rows.size());
  for (const auto& r : rows) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](const MinuteRecord* a, const MinuteRecord* b) {
    return std::tie(a->minute_start, a->phase, a->meter_id) < std::tie(b->minute_start, b->phase, b->meter_id);
  });

  std::string out;
  out.reserve(kCsvHeader.size() + 1 + rows.size() * 96);
  out += kCsvHeader;
  out += '\n';
  for (const MinuteRecord* r : sorted) {
    out += r->minute_start.to_string();
    out += ',';
    out += std::to_string(r->meter_id);
    out += ',';
    out += std::to_string(r->phase);
    if (r->present()) {
      const PhaseAverages& a = *r->averages;
      for (double v : {a.active_power, a.voltage, a.current, a.power_factor, a.frequency, a.apparent_power}) {
        out += ',';
        out += format_fixed3(v);
      }
    } else {
      out += ",,,,,,";
    }
    out += ',';
    out += std::to_string(r->sample_count);
    out += '\n';
  }
  return out;
}

std::vector<std::filesystem::path> write_day_csv(const CollectorConfig& config, const Date& date,
                                                 std::span<const MinuteRecord> records) {
  std::map<int, std::vector<MinuteRecord>> by_meter;
  for (int meter : config.assigned_meters) by_meter[meter];
  for (const auto& r : records) {
    if (!config.owns(r.meter_id)) {
      throw Error(Errc::kInvalidArgument, "record for meter " + std::to_string(r.meter_id) +
                                              " does not belong to collector " + config.collector_id);
    }
    by_meter[r.meter_id].push_back(r);
  }
  const auto dir = day_directory(config.output_root, config.collector_id, date);
  std::vector<std::filesystem::path> written;
  for (const auto& [meter, rows] : by_meter) {
    const auto path = dir / ("SEM" + std::to_string(meter) + ".csv");
    write_file_atomic(path, render_day_csv(rows));
    written.push_back(path);
  }
  return written;
}

std::vector<MinuteRecord> parse_day_csv(std::string_view text, std::string_view origin) {
  std::vector<MinuteRecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) {
      throw Error(Errc::kParse, std::string(origin) + ": missing final line feed");
    }
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line_no == 1) {
      if (line != kCsvHeader) throw Error(Errc::kParse, std::string(origin) + ": unexpected header");
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 10) {
      throw Error(Errc::kParse, std::string(origin) + ":" + std::to_string(line_no) + ": expected 10 fields");
    }
    MinuteRecord rec;
    try {
      rec.minute_start = Timestamp::parse(fields[0]);
    } catch (const Error&) {
      throw Error(Errc::kParse, std::string(origin) + ":" + std::to_string(line_no) + ": bad timestamp");
    }
    if (rec.minute_start.second_of_minute() != 0) {
      throw Error(Errc::kParse, std::string(origin) + ":" + std::to_string(line_no) + ": timestamp not minute-aligned");
    }
    rec.meter_id = parse_number<int>(fields[1], origin, line_no, "meter_id");
    rec.phase = parse_number<int>(fields[2], origin, line_no, "phase");
    rec.sample_count = parse_number<int>(fields[9], origin, line_no, "sample_count");
    if (rec.meter_id < 1 || rec.meter_id > kMeterCount || rec.phase < 1 || rec.phase > kPhasesPerMeter ||
        rec.sample_count < 0) {
      throw Error(Errc::kParse, std::string(origin) + ":" + std::to_string(line_no) + ": field out of range");
    }
    const bool all_empty = std::all_of(fields.begin() + 3, fields.begin() + 9, [](auto f) { return f.empty(); });
    if (rec.sample_count == 0) {
      if (!all_empty) {
        throw Error(Errc::kParse, std::string(origin) + ":" + std::to_string(line_no) + ": averages without samples");
      }
    } else {
      PhaseAverages a;
      a.active_power = parse_number<double>(fields[3], origin, line_no, "active_power_w");
      a.voltage = parse_number<double>(fields[4], origin, line_no, "voltage_v");
      a.current = parse_number<double>(fields[5], origin, line_no, "current_a");
      a.power_factor = parse_number<double>(fields[6], origin, line_no, "power_factor");
      a.frequency = parse_number<double>(fields[7], origin, line_no, "frequency_hz");
      a.apparent_power = parse_number<double>(fields[8], origin, line_no, "apparent_power_va");
      rec.averages = a;
    }
    out.push_back(std::move(rec));
  }
  if (line_no == 0) throw Error(Errc::kParse, std::string(origin) + ": empty file");
  return out;
}

std::vector<MinuteRecord> read_day_csv(const std::filesystem::path& path) {
  return parse_day_csv(read_file(path), path.string());
}

CollectorMinuteSummary collector_minute_power(std::string_view collector_id, std::span<const MinuteRecord> records) {
  CollectorMinuteSummary s;
  s.collector_id = std::string(collector_id);
  s.total_phases = static_cast<int>(records.size());
  if (!records.empty()) s.minute_start = records.front().minute_start;
  for (const auto& r : records) {
    if (r.minute_start != s.minute_start) {
      throw Error(Errc::kInvalidArgument, "records span more than one minute");
    }
    if (r.present()) {
      s.collector_power += r.averages->active_power;
      ++s.present_phases;
    }
  }
  return s;
}

}  // namespace carbon
