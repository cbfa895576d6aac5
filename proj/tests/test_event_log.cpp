#include <doctest.h>

#include <fstream>
#include <sstream>

#include "omab/errors.hpp"
#include "omab/event_log.hpp"
#include "support/temp_dir.hpp"

using namespace omab;

namespace {

std::vector<LoggedEvent> sample_events() {
  return {
      {1704067200, "c1", 12.5, 0.25, 0, 1},
      {1704067201, "", 0.3333333333333333, 1.0, 2, 0},
      {1704067202, "c3", 1e-7, 0.0, 1, 0},
  };
}

}  // namespace

TEST_CASE("event log round-trips and re-serializes byte-identically") {
  std::ostringstream first;
  write_event_log(first, sample_events());

  std::istringstream in(first.str());
  const auto parsed = read_event_log(in);
  REQUIRE(parsed.size() == 3);
  CHECK(parsed[0].timestamp == 1704067200);
  CHECK(parsed[0].customer_id == "c1");
  CHECK(parsed[1].customer_id.empty());
  CHECK(parsed[1].normalized_load == 1.0);
  CHECK(parsed[2].arm == 1);

  // serialize(parse(serialize(x))) is a fixed point: 10 significant digits
  // survive the decimal round trip.
  std::ostringstream second;
  write_event_log(second, parsed);
  CHECK(first.str() == second.str());
}

TEST_CASE("format_sig10 is parse-stable") {
  for (double v : {0.1234567890123, 1.0 / 3.0, 1e-12, 98765.4321, 5.0, 0.0}) {
    const std::string s1 = format_sig10(v);
    const double parsed = std::stod(s1);
    CHECK(format_sig10(parsed) == s1);
  }
}

TEST_CASE("read_event_log rejects malformed rows with line context") {
  auto expect_reject = [](const std::string& body, const char* label) {
    std::istringstream in(std::string(kEventLogHeader) + "\n" + body + "\n");
    INFO(label);
    CHECK_THROWS_AS(read_event_log(in), DataError);
  };
  expect_reject("1,c,1.0,0.5,0", "missing field");
  expect_reject("1,c,1.0,0.5,0,2", "reward outside {0,1}");
  expect_reject("1,c,1.0,1.5,0,1", "normalized load above 1");
  expect_reject("1,c,1.0,-0.5,0,1", "normalized load below 0");
  expect_reject("1,c,1.0,0.5,-1,1", "negative arm");
  expect_reject("x,c,1.0,0.5,0,1", "bad timestamp");
  expect_reject("1,c,abc,0.5,0,1", "bad load");
  expect_reject("1,c,-1.0,0.5,0,1", "negative load");

  std::istringstream wrong_header("a,b,c\n");
  CHECK_THROWS_AS(read_event_log(wrong_header), DataError);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_event_log(empty), DataError);
}

TEST_CASE("write_event_log rejects unserializable events") {
  std::ostringstream out;
  std::vector<LoggedEvent> bad_load{{1, "c", std::nan(""), 0.5, 0, 0}};
  CHECK_THROWS_AS(write_event_log(out, bad_load), DataError);
  std::vector<LoggedEvent> bad_id{{1, "a,b", 1.0, 0.5, 0, 0}};
  CHECK_THROWS_AS(write_event_log(out, bad_id), DataError);
}

TEST_CASE("event log file IO") {
  test::TempDir dir("eventlog");
  const auto path = dir.path() / "events.csv";
  write_event_log(path, sample_events());
  const auto parsed = read_event_log(path);
  CHECK(parsed.size() == 3);
  CHECK_THROWS_AS(read_event_log(dir.path() / "absent.csv"), DataError);
}

TEST_CASE("infer_num_arms and empirical ground truth") {
  std::vector<LoggedEvent> events;
  // arm 0: 4 shows 1 click; arm 1: 2 shows 2 clicks; arm 2: 1 show 0 clicks
  for (int i = 0; i < 4; ++i) events.push_back({i, "", 1.0, 0.5, 0, i == 0 ? 1 : 0});
  for (int i = 0; i < 2; ++i) events.push_back({i, "", 1.0, 0.5, 1, 1});
  events.push_back({9, "", 1.0, 0.5, 2, 0});

  CHECK(infer_num_arms(events) == 3);
  const auto gt = empirical_ground_truth(events, 3);
  CHECK(gt.ctr[0] == 0.25);
  CHECK(gt.ctr[1] == 1.0);
  CHECK(gt.ctr[2] == 0.0);
  CHECK(gt.best_arm == 1);

  const auto padded = empirical_ground_truth(events, 4);
  CHECK(padded.ctr[3] == 0.0);  // unseen arm
  CHECK_THROWS_AS(empirical_ground_truth(events, 2), DataError);
}
