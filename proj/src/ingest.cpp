#include "omab/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <tuple>
#include <unordered_set>

#include "omab/errors.hpp"

namespace omab {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's
// civil-days algorithm).
std::int64_t days_from_civil(std::int64_t y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<std::uint64_t>(y - era * 400);
  const auto doy = static_cast<std::uint64_t>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
  const std::uint64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool valid_civil(int y, int m, int d) {
  if (m < 1 || m > 12 || d < 1) return false;
  static constexpr int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  int len = lengths[m - 1];
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  if (m == 2 && leap) len = 29;
  return d <= len;
}

}  // namespace

std::int64_t parse_iso8601(std::string_view text) {
  std::string s(text);
  if (!s.empty() && s.back() == 'Z') s.pop_back();
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  char sep = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d", &y, &mo, &d, &sep, &h, &mi, &sec) != 7 ||
      (sep != 'T' && sep != ' '))
    throw DataError("parse_iso8601: expected YYYY-MM-DDTHH:MM:SS, got '" + std::string(text) + "'");
  if (!valid_civil(y, mo, d) || h < 0 || h > 23 || mi < 0 || mi > 59 || sec < 0 || sec > 60)
    throw DataError("parse_iso8601: out-of-range date/time in '" + std::string(text) + "'");
  return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + sec;
}

std::int64_t utc_day(std::int64_t timestamp) {
  std::int64_t day = timestamp / 86400;
  if (timestamp % 86400 != 0 && timestamp < 0) --day;
  return day;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

bool parse_raw_row(std::string_view line, RawRecord& rec) {
  const auto fields = split_fields(line);
  if (fields.size() != 6) return false;
  try {
    rec.timestamp = parse_iso8601(fields[0]);
  } catch (const DataError&) {
    return false;
  }
  rec.customer_id = std::string(fields[1]);
  if (rec.customer_id.empty()) return false;
  auto parse_number = [](std::string_view s, auto& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
  };
  if (fields[2].empty()) {
    rec.purchasing_power = missing_load();
  } else if (!parse_number(fields[2], rec.purchasing_power) || !(rec.purchasing_power >= 0.0)) {
    return false;
  }
  if (fields[3] == "display")
    rec.action = RawRecord::Action::Display;
  else if (fields[3] == "click")
    rec.action = RawRecord::Action::Click;
  else
    return false;
  long arm = 0;
  if (!parse_number(fields[4], arm) || arm < 0 || arm > 1000000) return false;
  rec.arm = static_cast<ArmId>(arm);
  long hit = 0;
  if (!parse_number(fields[5], hit) || hit < 1) return false;
  rec.session_hit = static_cast<int>(hit);
  rec.date = utc_day(rec.timestamp);
  return true;
}

}  // namespace

std::vector<RawRecord> read_raw_records(std::istream& in, IngestCounters& counters,
                                        const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(origin + ": empty raw log (missing header)");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRawHeader)
    throw DataError(origin + ": unexpected header '" + line + "', expected '" + kRawHeader + "'");

  std::vector<RawRecord> records;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++counters.rows_read;
    RawRecord rec;
    if (parse_raw_row(line, rec))
      records.push_back(std::move(rec));
    else
      ++counters.rows_unparseable;
  }
  return records;
}

std::vector<RawRecord> read_raw_records(const std::filesystem::path& path, IngestCounters& counters) {
  std::ifstream in(path);
  if (!in) throw DataError("read_raw_records: cannot open " + path.string());
  return read_raw_records(in, counters, path.string());
}

namespace {

std::string dedupe_key(const RawRecord& r) {
  // NaN purchasing power must compare equal to itself here, so the key uses
  // the printed form ("nan" == "nan").
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%lld|%.17g|%d|%d|%d|", static_cast<long long>(r.timestamp),
                r.purchasing_power, static_cast<int>(r.action), r.arm, r.session_hit);
  return std::string(buf) + r.customer_id;
}

}  // namespace

std::vector<RawRecord> dedupe(std::vector<RawRecord> records, IngestCounters* counters) {
  std::unordered_set<std::string> seen;
  seen.reserve(records.size() * 2);
  std::vector<RawRecord> out;
  out.reserve(records.size());
  for (auto& r : records) {
    if (seen.insert(dedupe_key(r)).second)
      out.push_back(std::move(r));
    else if (counters != nullptr)
      ++counters->duplicates_removed;
  }
  return out;
}

std::vector<LoggedEvent> join_clicks(std::span<const RawRecord> records, IngestCounters* counters) {
  using GroupKey = std::tuple<std::string, ArmId, std::int64_t>;  // customer, arm, date
  struct Group {
    std::vector<std::size_t> displays;  // indices into `records`
    std::vector<std::size_t> clicks;
  };

  std::map<GroupKey, Group> groups;
  std::vector<std::size_t> display_order;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    auto& g = groups[GroupKey{r.customer_id, r.arm, r.date}];
    if (r.action == RawRecord::Action::Display) {
      g.displays.push_back(i);
      display_order.push_back(i);
      if (counters != nullptr) ++counters->displays;
    } else {
      g.clicks.push_back(i);
      if (counters != nullptr) ++counters->clicks;
    }
  }

  // reward[display index] for displays only
  std::map<std::size_t, int> reward;
  for (auto& [key, g] : groups) {
    auto by_hit = [&records](std::size_t a, std::size_t b) {
      if (records[a].session_hit != records[b].session_hit)
        return records[a].session_hit < records[b].session_hit;
      return a < b;  // stable on equal hits: input order
    };
    std::sort(g.displays.begin(), g.displays.end(), by_hit);
    std::sort(g.clicks.begin(), g.clicks.end(), by_hit);

    std::vector<bool> taken(g.displays.size(), false);
    for (std::size_t click_idx : g.clicks) {
      const int click_hit = records[click_idx].session_hit;
      // Greatest display session_hit <= the click's.
      std::ptrdiff_t last = -1;
      for (std::size_t d = 0; d < g.displays.size(); ++d) {
        if (records[g.displays[d]].session_hit <= click_hit) last = static_cast<std::ptrdiff_t>(d);
        else break;
      }
      if (last < 0) {
        if (counters != nullptr) ++counters->clicks_unmatched;
        continue;
      }
      const int nearest_hit = records[g.displays[static_cast<std::size_t>(last)]].session_hit;
      // Among displays sharing the nearest hit, credit the first untaken one.
      std::ptrdiff_t chosen = -1;
      for (std::ptrdiff_t d = last;
           d >= 0 && records[g.displays[static_cast<std::size_t>(d)]].session_hit == nearest_hit; --d)
        if (!taken[static_cast<std::size_t>(d)]) chosen = d;
      if (chosen < 0) {
        if (counters != nullptr) ++counters->clicks_duplicate;  // re-click of a credited display
        continue;
      }
      taken[static_cast<std::size_t>(chosen)] = true;
      reward[g.displays[static_cast<std::size_t>(chosen)]] = 1;
      if (counters != nullptr) ++counters->clicks_matched;
    }
  }

  std::vector<LoggedEvent> events;
  events.reserve(display_order.size());
  for (std::size_t idx : display_order) {
    const auto& r = records[idx];
    LoggedEvent e;
    e.timestamp = r.timestamp;
    e.customer_id = r.customer_id;
    e.load = r.purchasing_power;  // may be missing; attach_load imputes
    e.normalized_load = missing_load();
    e.arm = r.arm;
    const auto it = reward.find(idx);
    e.reward = it != reward.end() ? it->second : 0;
    events.push_back(std::move(e));
  }
  return events;
}

LoadNormalizer attach_load(std::vector<LoggedEvent>& events, double rho) {
  std::vector<double> loads;
  loads.reserve(events.size());
  for (const auto& e : events) loads.push_back(e.load);
  const std::vector<double> imputed = impute_missing(loads);
  const LoadNormalizer norm = fit_thresholds(imputed, rho);
  for (std::size_t i = 0; i < events.size(); ++i) {
    events[i].load = imputed[i];
    events[i].normalized_load = normalize(norm, imputed[i]);
  }
  return norm;
}

std::vector<LoggedEvent> ingest_pipeline(const std::filesystem::path& path, double rho,
                                         IngestCounters& counters) {
  auto records = dedupe(read_raw_records(path, counters), &counters);
  auto events = join_clicks(records, &counters);
  if (!events.empty()) attach_load(events, rho);
  return events;
}

}  // namespace omab
