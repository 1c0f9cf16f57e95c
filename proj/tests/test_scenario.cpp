#include "doctest.h"
#include "mref/scenario.hpp"
#include "support/tempdir.hpp"

using namespace mref;
using testfs::fixtures;

namespace {

ScenarioErrc parse_code(const std::string& text) {
  try {
    parse_scenario(text, fixtures());
  } catch (const ScenarioError& e) {
    return e.code();
  }
  FAIL("scenario accepted: " << text);
  return ScenarioErrc::Io;
}

const std::string kHead = "link delay=1.3 rate=4000\ncatalog catalog.txt\nchannels channels.txt\n";

}  // namespace

TEST_CASE("scenario parsing") {
  const auto s = parse_scenario(kHead +
                                    "# comment\n"
                                    "window 10\n"
                                    "target mmsev_rover\n"
                                    "at 1 uplink tire_change.csv\n"
                                    "at 2.5 voice \"Open  Instructions\"\n"
                                    "at 3 telemetry o2_time_remaining_s 1200\n",
                                fixtures());
  CHECK(s.link.one_way_delay == 1.3);
  CHECK(s.link.data_rate == 4000);
  CHECK(s.report_window == 10);
  CHECK(s.catalog_path == fixtures() / "catalog.txt");
  REQUIRE(s.events.size() == 3);
  CHECK(s.events[0].kind == EventKind::Uplink);
  CHECK(s.events[1].phrase == "Open  Instructions");
  CHECK(s.events[2].channel == "o2_time_remaining_s");
  CHECK(s.events[2].value == 1200);
  CHECK(s.events[2].line == 9);

  const auto preset = parse_scenario("link preset=mars\ncatalog catalog.txt\nchannels channels.txt\n", fixtures());
  CHECK(preset.link.one_way_delay == 660);

  CHECK(parse_code("catalog catalog.txt\nchannels channels.txt\n") == ScenarioErrc::Parse);
  CHECK(parse_code(kHead + "at 5 voice \"a\"\nat 4 voice \"b\"\n") == ScenarioErrc::Parse);
  CHECK(parse_code(kHead + "at x voice \"a\"\n") == ScenarioErrc::Parse);
  CHECK(parse_code(kHead + "at 1 dance\n") == ScenarioErrc::Parse);
  CHECK(parse_code(kHead + "window 0\n") == ScenarioErrc::Parse);
  CHECK(parse_code(kHead + "launch now\n") == ScenarioErrc::Parse);
  CHECK(parse_code("link delay=-1 rate=4000\ncatalog catalog.txt\nchannels channels.txt\n") == ScenarioErrc::Parse);
  CHECK(parse_code(kHead + "at 1 uplink missing.mri\n") == ScenarioErrc::Io);
  CHECK_THROWS_AS(load_scenario("/nonexistent/demo.scenario"), ScenarioError);
}

TEST_CASE("demo scenario end to end") {
  testfs::TempDir a, b;
  const auto script = load_scenario(fixtures() / "demo.scenario");
  const auto report = run_scenario(script, a.path());
  run_scenario(script, b.path());
  CHECK(testfs::snapshot(a.path()) == testfs::snapshot(b.path()));

  // Rerunning into the same directory leaves identical contents.
  const auto before = testfs::snapshot(a.path());
  run_scenario(script, a.path());
  CHECK(testfs::snapshot(a.path()) == before);

  CHECK(testfs::slurp(a / "session/env_1/sample_1/notes.txt") == testfs::slurp(fixtures() / "expected_notes.txt"));

  int critical_enter = 0;
  for (const auto& line : report.alert_log) {
    if (line.find("kind=ENTER severity=CRITICAL") != std::string::npos) ++critical_enter;
  }
  CHECK(critical_enter == 1);
  bool flashed = false;
  for (const auto& line : report.hud_log) flashed |= line.find("flash_red=1") != std::string::npos;
  CHECK(flashed);
  CHECK(report.hud_log.front().find("flash_red=0 warnings=env_pressure_kpa") != std::string::npos);

  bool note_sent = false;
  for (const auto& line : report.effect_log) note_sent |= line.find("SEND_DOWNLINK kind=NOTE_FILE") != std::string::npos;
  CHECK(note_sent);

  REQUIRE(report.uplinked_sets.size() == 1);
  CHECK(report.uplinked_sets[0].first == "tire_change");
  CHECK(report.uplinked_sets[0].second.reduction_ratio >= 1000);
  for (const auto& row : report.bandwidth) {
    REQUIRE(row.stats);
    CHECK(row.stats->peak_window_bps <= row.rate * (1 + 1e-12));
    CHECK(row.stats->average_bps <= row.stats->peak_window_bps);
  }

  const auto photos = testfs::slurp(a / "session/env_1/sample_1/photos.log");
  CHECK(photos.rfind("photo seq=1 t=25.500000\n", 0) == 0);
  CHECK(photos.find("t=41.500000") == std::string::npos);
}

TEST_CASE("delivery log alone reproduces the bandwidth table") {
  testfs::TempDir out;
  const auto report = run_scenario(load_scenario(fixtures() / "demo.scenario"), out.path());
  const auto rebuilt = bandwidth_from_log(testfs::slurp(out / "deliveries.log"), 1.0);
  CHECK(format_bandwidth(rebuilt) == format_bandwidth(report.bandwidth));
}

TEST_CASE("telemetry-only scenario") {
  testfs::TempDir out;
  const auto report = run_scenario(load_scenario(fixtures() / "telemetry_only.scenario"), out.path());
  CHECK(report.alert_log.size() == 3);
  CHECK(report.effect_log.empty());
  CHECK(report.delivery_log.empty());
  CHECK(testfs::slurp(out / "effects.log").empty());
  CHECK(format_bandwidth(report.bandwidth) ==
        std::vector<std::string>{"direction=uplink NO_TRAFFIC", "direction=downlink NO_TRAFFIC"});
}

TEST_CASE("uplinks that fail validation stop the run") {
  testfs::TempDir dir;
  testfs::spit(dir / "bad.csv", std::string("step_index,step_text,key_phrase_hint,cue_index,asset_id,highlight,t_offset_s,"
                                            "px,py,pz,qx,qy,qz,qw,sx,sy,sz\n") +
                                    "0,Fetch the hammer,next,0,hammer,0,0,0,0,0,0,0,0,1,1,1,1\n");
  const auto cat = testfs::fixtures() / "catalog.txt";
  const auto ch = testfs::fixtures() / "channels.txt";
  testfs::spit(dir / "s.scenario", "link preset=lunar\ncatalog " + cat.string() + "\nchannels " + ch.string() +
                                       "\nat 1 uplink bad.csv\n");
  try {
    run_scenario(load_scenario(dir / "s.scenario"), dir / "out");
    FAIL("expected a validation error");
  } catch (const ScenarioError& e) {
    CHECK(e.code() == ScenarioErrc::Validation);
  }

  testfs::spit(dir / "u.scenario", "link preset=lunar\ncatalog " + cat.string() + "\nchannels " + ch.string() +
                                       "\nat 1 telemetry flux 3\n");
  CHECK_THROWS_AS(run_scenario(load_scenario(dir / "u.scenario"), dir / "out2"), ScenarioError);
}

TEST_CASE("bandwidth_from_log") {
  const auto rows = bandwidth_from_log(
      "# link direction=downlink delay=0.000000 rate=4000.000000\n"
      "deliver t=0.071500 id=1 kind=NOTE_FILE bytes=286\n",
      1.0);
  REQUIRE(rows.size() == 2);
  CHECK(!rows[0].stats);
  REQUIRE(rows[1].stats);
  CHECK(rows[1].stats->peak_window_bps == doctest::Approx(286.0));

  const auto bare = bandwidth_from_log("deliver t=3.000000 id=1 kind=NOTE_FILE bytes=286\n", 1.0);
  CHECK(bare[1].stats->peak_window_bps == doctest::Approx(286.0));

  const auto empty = bandwidth_from_log("", 1.0);
  CHECK(!empty[0].stats);
  CHECK(!empty[1].stats);
  CHECK_THROWS_AS(bandwidth_from_log("deliver t=x id=1\n", 1.0), ScenarioError);
}
