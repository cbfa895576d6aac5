#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "omab/bandit.hpp"

namespace omab {

/// One record of a uniformly-logged interaction stream.
struct LoggedEvent {
  std::int64_t timestamp = 0;   // seconds since epoch
  std::string customer_id;      // opaque, may be empty
  double load = 0.0;            // real load L
  double normalized_load = 0.0; // L~, in [0,1]
  ArmId arm = 0;
  int reward = 0;               // 0 or 1
};

/// Header of the canonical event-log file. The column order is part of the
/// format and is consumed verbatim by replay.
inline constexpr const char* kEventLogHeader = "timestamp,customer_id,load,normalized_load,arm,reward";

/// Canonical decimal formatting used by every exported file: 10 significant
/// digits, so that serialize -> parse -> serialize is byte-stable.
std::string format_sig10(double value);

void write_event_log(std::ostream& out, std::span<const LoggedEvent> events);
void write_event_log(const std::filesystem::path& path, std::span<const LoggedEvent> events);

/// Reads and validates a canonical event log. Throws DataError with the
/// offending line on any malformed row or violated invariant
/// (reward not in {0,1}, normalized load outside [0,1], negative arm).
std::vector<LoggedEvent> read_event_log(std::istream& in, const std::string& origin = "<stream>");
std::vector<LoggedEvent> read_event_log(const std::filesystem::path& path);

/// Largest arm index + 1.
int infer_num_arms(std::span<const LoggedEvent> events);

/// Per-arm empirical CTR over the full log; the stand-in ground truth for
/// real logs whose true CTRs are unobservable.
GroundTruth empirical_ground_truth(std::span<const LoggedEvent> events, int num_arms);

}  // namespace omab
