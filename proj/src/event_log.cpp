#include "omab/event_log.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "omab/errors.hpp"

namespace omab {

std::string format_sig10(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

namespace {

void require(bool ok, const std::string& origin, std::size_t line_no, const std::string& what) {
  if (!ok)
    throw DataError(origin + ":" + std::to_string(line_no) + ": " + what);
}

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

bool parse_i64(std::string_view s, std::int64_t& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_f64(std::string_view s, double& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

void write_event_log(std::ostream& out, std::span<const LoggedEvent> events) {
  out << kEventLogHeader << '\n';
  for (const auto& e : events) {
    if (!std::isfinite(e.load) || !std::isfinite(e.normalized_load) || e.load < 0.0)
      throw DataError("write_event_log: load must be finite and non-negative; impute and normalize first");
    if (e.customer_id.find_first_of(",\n\r") != std::string::npos)
      throw DataError("write_event_log: customer_id must not contain ',' or newlines");
    out << e.timestamp << ',' << e.customer_id << ',' << format_sig10(e.load) << ','
        << format_sig10(e.normalized_load) << ',' << e.arm << ',' << e.reward << '\n';
  }
  if (!out) throw DataError("write_event_log: stream write failed");
}

void write_event_log(const std::filesystem::path& path, std::span<const LoggedEvent> events) {
  std::ofstream out(path);
  if (!out) throw DataError("write_event_log: cannot open " + path.string());
  write_event_log(out, events);
}

std::vector<LoggedEvent> read_event_log(std::istream& in, const std::string& origin) {
  std::vector<LoggedEvent> events;
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw DataError(origin + ": empty event log (missing header)");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == kEventLogHeader, origin, line_no,
          "unexpected header '" + line + "', expected '" + kEventLogHeader + "'");

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    require(fields.size() == 6, origin, line_no, "expected 6 fields, got " + std::to_string(fields.size()));

    LoggedEvent e;
    std::int64_t arm = 0;
    std::int64_t reward = 0;
    require(parse_i64(fields[0], e.timestamp), origin, line_no, "bad timestamp");
    e.customer_id = std::string(fields[1]);
    require(parse_f64(fields[2], e.load), origin, line_no, "bad load");
    require(parse_f64(fields[3], e.normalized_load), origin, line_no, "bad normalized_load");
    require(parse_i64(fields[4], arm), origin, line_no, "bad arm");
    require(parse_i64(fields[5], reward), origin, line_no, "bad reward");
    require(std::isfinite(e.load) && e.load >= 0.0, origin, line_no, "load must be finite and non-negative");
    require(e.normalized_load >= 0.0 && e.normalized_load <= 1.0, origin, line_no,
            "normalized_load outside [0,1]");
    require(arm >= 0 && arm <= std::numeric_limits<ArmId>::max(), origin, line_no, "arm out of range");
    require(reward == 0 || reward == 1, origin, line_no, "reward must be 0 or 1");
    e.arm = static_cast<ArmId>(arm);
    e.reward = static_cast<int>(reward);
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<LoggedEvent> read_event_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("read_event_log: cannot open " + path.string());
  return read_event_log(in, path.string());
}

int infer_num_arms(std::span<const LoggedEvent> events) {
  int max_arm = -1;
  for (const auto& e : events) max_arm = std::max(max_arm, e.arm);
  return max_arm + 1;
}

GroundTruth empirical_ground_truth(std::span<const LoggedEvent> events, int num_arms) {
  if (num_arms < 1) throw std::invalid_argument("empirical_ground_truth: num_arms must be >= 1");
  std::vector<double> clicks(static_cast<std::size_t>(num_arms), 0.0);
  std::vector<double> shows(static_cast<std::size_t>(num_arms), 0.0);
  for (const auto& e : events) {
    if (e.arm >= num_arms) throw DataError("empirical_ground_truth: arm index exceeds num_arms");
    shows[static_cast<std::size_t>(e.arm)] += 1.0;
    clicks[static_cast<std::size_t>(e.arm)] += static_cast<double>(e.reward);
  }
  std::vector<double> ctr(static_cast<std::size_t>(num_arms), 0.0);
  for (std::size_t k = 0; k < ctr.size(); ++k)
    ctr[k] = shows[k] > 0.0 ? clicks[k] / shows[k] : 0.0;
  return GroundTruth::from_ctr(std::move(ctr));
}

}  // namespace omab
