#include <sstream>

#include "doctest.h"
#include "mref/commands.hpp"
#include "support/tempdir.hpp"

using namespace mref;
using namespace mref::cli;
using testfs::fixtures;

namespace {

struct Captured {
  int code;
  std::string out;
  std::string err;
};

template <typename F>
Captured capture(F f) {
  std::ostringstream out, err;
  const int code = f(out, err);
  return {code, out.str(), err.str()};
}

Captured compile(const std::filesystem::path& csv, const std::filesystem::path& catalog,
                 const std::filesystem::path& out) {
  CompileOptions o;
  o.csv = csv;
  o.catalog = catalog;
  o.out = out;
  return capture([&](std::ostream& a, std::ostream& b) { return cmd_compile(o, a, b); });
}

Captured send(const std::filesystem::path& mri, std::optional<std::string> preset, std::optional<double> delay = {},
              std::optional<double> rate = {}) {
  SendOptions o{mri, std::move(preset), delay, rate};
  return capture([&](std::ostream& a, std::ostream& b) { return cmd_send(o, a, b); });
}

double field(const std::string& text, const std::string& key) {
  const auto pos = text.find(key + "=");
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + key.size() + 1));
}

}  // namespace

TEST_CASE("compile the demo set") {
  testfs::TempDir dir;
  const auto r = compile(fixtures() / "tire_change.csv", fixtures() / "catalog.txt", dir / "tire.mri");
  CHECK(r.code == kOk);
  CHECK(r.err.empty());
  CHECK(field(r.out, "reduction_ratio") >= 100);
  CHECK(std::filesystem::file_size(dir / "tire.mri") == field(r.out, "wire_bytes"));
  CHECK(r.out.find("set tire_change\n") != std::string::npos);
}

TEST_CASE("compile failures") {
  testfs::TempDir dir;
  testfs::spit(dir / "bad.csv", "step,text\n0,x\n");
  auto r = compile(dir / "bad.csv", fixtures() / "catalog.txt", dir / "bad.mri");
  CHECK(r.code == kParse);
  CHECK(r.err.find("BAD_HEADER") != std::string::npos);
  CHECK(r.err.find("line 1") != std::string::npos);
  CHECK(!std::filesystem::exists(dir / "bad.mri"));

  r = compile(fixtures() / "tire_change.csv", dir / "missing_catalog.txt", dir / "x.mri");
  CHECK(r.code == kIo);
  CHECK(!std::filesystem::exists(dir / "x.mri"));

  testfs::spit(dir / "unknown.csv", std::string("step_index,step_text,key_phrase_hint,cue_index,asset_id,highlight,"
                                                "t_offset_s,px,py,pz,qx,qy,qz,qw,sx,sy,sz\n") +
                                        "0,Grab the hammer,next,0,hammer,0,0,0,0,0,0,0,0,1,1,1,1\n");
  r = compile(dir / "unknown.csv", fixtures() / "catalog.txt", dir / "u.mri");
  CHECK(r.code == kValidation);
  CHECK(r.err.find("MISSING_ASSET") != std::string::npos);

  r = compile("", fixtures() / "catalog.txt", dir / "u.mri");
  CHECK(r.code == kUsage);
}

TEST_CASE("simulate_send examples") {
  const auto low = simulate_send(11800, LinkConfig{"low", 0.0, 62.5});
  CHECK(low.transmission_s == doctest::Approx(188.8));
  CHECK(low.within_window);

  const auto lunar = simulate_send(12000, LinkConfig::preset("lunar"));
  CHECK(lunar.tx.t_delivered == doctest::Approx(4.3).epsilon(1e-12));
  CHECK(lunar.propagation_s == doctest::Approx(1.3));

  CHECK(simulate_send(12000, LinkConfig::preset("mars")).propagation_s == doctest::Approx(660.0));
  CHECK(!simulate_send(20000, LinkConfig{"low", 0.0, 62.5}).within_window);
}

TEST_CASE("send a compiled file") {
  testfs::TempDir dir;
  REQUIRE(compile(fixtures() / "tire_change.csv", fixtures() / "catalog.txt", dir / "t.mri").code == kOk);

  const auto lunar = send(dir / "t.mri", "lunar");
  CHECK(lunar.code == kOk);
  CHECK(lunar.out.find("propagation=1.300000 s\n") != std::string::npos);
  CHECK(lunar.out.find("window=WITHIN") != std::string::npos);
  const auto tx = field(lunar.out, "transmission");
  CHECK(field(lunar.out, "deliver t") == doctest::Approx(tx + 1.3).epsilon(1e-9));

  const auto mars = send(dir / "t.mri", "mars");
  CHECK(mars.out.find("propagation=660.000000 s\n") != std::string::npos);

  const auto custom = send(dir / "t.mri", std::nullopt, 2.0, 62.5);
  CHECK(custom.code == kOk);
  CHECK(field(custom.out, "transmission") <= kTransferWindowLimit);

  CHECK(send(dir / "t.mri", std::nullopt).code == kUsage);
  CHECK(send(dir / "t.mri", "lunar", 1.0, 10.0).code == kUsage);
  CHECK(send(dir / "t.mri", std::nullopt, 1.0).code == kUsage);
  CHECK(send(dir / "t.mri", "venus").code == kUsage);
  CHECK(send(dir / "none.mri", "lunar").code == kIo);

  auto bytes = testfs::slurp(dir / "t.mri");
  bytes[25] ^= 0x5A;  // inside the target asset id
  testfs::spit(dir / "bad.mri", bytes);
  const auto bad = send(dir / "bad.mri", "lunar");
  CHECK(bad.code == kParse);
  CHECK(bad.err.find("CRC_MISMATCH") != std::string::npos);
}

TEST_CASE("run and report") {
  testfs::TempDir dir;
  const auto run = capture(
      [&](std::ostream& a, std::ostream& b) { return cmd_run(fixtures() / "demo.scenario", dir / "out", a, b); });
  CHECK(run.code == kOk);
  for (const char* f : {"deliveries.log", "alerts.log", "effects.log", "hud.log", "report.txt"}) {
    CHECK(std::filesystem::exists(dir / "out" / f));
  }

  const auto rep = capture([&](std::ostream& a, std::ostream& b) { return cmd_report(dir / "out", 1.0, a, b); });
  CHECK(rep.code == kOk);
  CHECK(rep.out.find("direction=uplink") != std::string::npos);
  CHECK(field(rep.out, "peak_window_bps") <= 4000.0);

  const auto missing = capture([&](std::ostream& a, std::ostream& b) { return cmd_report(dir / "nope", 1.0, a, b); });
  CHECK(missing.code == kIo);

  testfs::spit(dir / "empty/deliveries.log", "");
  const auto empty = capture([&](std::ostream& a, std::ostream& b) { return cmd_report(dir / "empty", 1.0, a, b); });
  CHECK(empty.code == kOk);
  CHECK(empty.out.find("NO_TRAFFIC") != std::string::npos);

  testfs::spit(dir / "one/deliveries.log", "# link direction=downlink delay=0.000000 rate=4000.000000\n"
                                           "deliver t=0.071500 id=1 kind=NOTE_FILE bytes=286\n");
  const auto one = capture([&](std::ostream& a, std::ostream& b) { return cmd_report(dir / "one", 1.0, a, b); });
  CHECK(one.out.find("peak_window_bps=286.000000") != std::string::npos);

  const auto bad = capture(
      [&](std::ostream& a, std::ostream& b) { return cmd_run(dir / "missing.scenario", dir / "o", a, b); });
  CHECK(bad.code == kIo);
  testfs::spit(dir / "broken.scenario", "link warp=9\n");
  const auto broken = capture(
      [&](std::ostream& a, std::ostream& b) { return cmd_run(dir / "broken.scenario", dir / "o", a, b); });
  CHECK(broken.code == kParse);
}

TEST_CASE("inputs resolve under MREF_FIXTURES") {
  setenv("MREF_FIXTURES", fixtures().c_str(), 1);
  CHECK(resolve_input("catalog.txt") == fixtures() / "catalog.txt");
  CHECK(resolve_input("no_such_file.txt") == "no_such_file.txt");
  unsetenv("MREF_FIXTURES");
  CHECK(resolve_input("catalog.txt") == "catalog.txt");
}
