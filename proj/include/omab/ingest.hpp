#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "omab/event_log.hpp"
#include "omab/load.hpp"

namespace omab {

/// One row of the raw A/B-testing log.
struct RawRecord {
  std::int64_t timestamp = 0;     // epoch seconds, parsed from ISO-8601
  std::string customer_id;
  double purchasing_power = 0.0;  // missing_load() when the field is empty
  enum class Action { Display, Click } action = Action::Display;
  ArmId arm = 0;
  int session_hit = 1;            // sequential page index within a session, >= 1
  std::int64_t date = 0;          // UTC day number, derived from timestamp
};

/// Header of the raw input file. `date` is derived, not a column.
inline constexpr const char* kRawHeader = "timestamp,customer_id,purchasing_power,action,arm,session_hit";

/// Pipeline diagnostics. Drops are counted, never fatal.
struct IngestCounters {
  std::uint64_t rows_read = 0;
  std::uint64_t rows_unparseable = 0;
  std::uint64_t duplicates_removed = 0;
  std::uint64_t displays = 0;
  std::uint64_t clicks = 0;
  std::uint64_t clicks_matched = 0;
  std::uint64_t clicks_unmatched = 0;   // no display with session_hit <= click's
  std::uint64_t clicks_duplicate = 0;   // nearest display already credited
};

/// Parses "YYYY-MM-DDTHH:MM:SS" (optional trailing 'Z') to epoch seconds.
std::int64_t parse_iso8601(std::string_view text);

/// UTC calendar day number of an epoch timestamp.
std::int64_t utc_day(std::int64_t timestamp);

/// Reads raw records; malformed rows are skipped and counted.
std::vector<RawRecord> read_raw_records(std::istream& in, IngestCounters& counters,
                                        const std::string& origin = "<stream>");
std::vector<RawRecord> read_raw_records(const std::filesystem::path& path, IngestCounters& counters);

/// Removes exact-duplicate rows (all fields equal), keeping the first
/// occurrence and the original order.
std::vector<RawRecord> dedupe(std::vector<RawRecord> records, IngestCounters* counters = nullptr);

/// Joins clicks to displays on (customer_id, arm, date) under the rule
/// "session hit of display <= session hit of click". Every display becomes
/// one event, in input order; a click credits only the display with the
/// greatest session_hit <= its own, and each display takes at most one
/// click. Unmatched and re-click entries are dropped with a count. The
/// produced events carry the display's purchasing power as the load
/// (missing_load() when absent) and no normalized load yet.
std::vector<LoggedEvent> join_clicks(std::span<const RawRecord> records, IngestCounters* counters = nullptr);

/// Imputes missing loads with the mean over all events and computes the
/// normalized load from thresholds fitted on the imputed loads. Returns the
/// fitted normalizer.
LoadNormalizer attach_load(std::vector<LoggedEvent>& events, double rho);

/// Full pipeline: read -> dedupe -> join -> attach_load.
std::vector<LoggedEvent> ingest_pipeline(const std::filesystem::path& path, double rho,
                                         IngestCounters& counters);

}  // namespace omab
