#include "doctest.h"
#include "mref/authoring.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace mref;

namespace {

const std::string kHeader = std::string(kCsvHeader) + "\n";

std::vector<CompileError> errors_of(const CompileResult& r) {
  const auto* e = std::get_if<std::vector<CompileError>>(&r);
  return e ? *e : std::vector<CompileError>{};
}

bool has_code(const std::vector<CompileError>& errors, CompileErrc code, std::size_t line) {
  for (const auto& e : errors)
    if (e.code == code && e.line == line) return true;
  return false;
}

CompileResult compile_text(const std::string& body) { return compile_document(kHeader + body, "tire", AssetRef("mmsev_rover")); }

}  // namespace

TEST_CASE("parse_csv examples") {
  const auto empty = parse_csv(kHeader);
  REQUIRE(std::holds_alternative<std::vector<CsvRow>>(empty));
  CHECK(std::get<std::vector<CsvRow>>(empty).empty());

  const auto short_row = parse_csv(kHeader + "0,x,next,0,a,0,0,0,0,0,0,0,0,1,1,1\n");
  REQUIRE(std::holds_alternative<std::vector<CompileError>>(short_row));
  const auto& errs = std::get<std::vector<CompileError>>(short_row);
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].code == CompileErrc::BadFieldCount);
  CHECK(errs[0].line == 2);

  const auto quoted = parse_csv(kHeader + "0,\"Turn the wrench, counterclockwise\",next,0,a,0,0,0,0,0,0,0,0,1,1,1,1\n");
  REQUIRE(std::holds_alternative<std::vector<CsvRow>>(quoted));
  const auto& row = std::get<std::vector<CsvRow>>(quoted).at(0);
  CHECK(row.fields[1] == "Turn the wrench, counterclockwise");
  CHECK(row.fields[16] == "1");
  CHECK(row.line == 2);
}

TEST_CASE("parse_csv header, quoting and line endings") {
  const auto bad = parse_csv("step,text\n");
  REQUIRE(std::holds_alternative<std::vector<CompileError>>(bad));
  CHECK(std::get<std::vector<CompileError>>(bad)[0].code == CompileErrc::BadHeader);
  CHECK(std::get<std::vector<CompileError>>(parse_csv(""))[0].code == CompileErrc::BadHeader);

  const auto crlf = parse_csv(std::string(kCsvHeader) + "\r\n0,\"say \"\"next\"\"\",next,,,,,,,,,,,,,,\r\n");
  REQUIRE(std::holds_alternative<std::vector<CsvRow>>(crlf));
  CHECK(std::get<std::vector<CsvRow>>(crlf)[0].fields[1] == "say \"next\"");

  const auto unterminated = parse_csv(kHeader + "0,\"open,next,,,,,,,,,,,,,,\n");
  CHECK(std::get<std::vector<CompileError>>(unterminated)[0].code == CompileErrc::BadFieldCount);

  // All-or-nothing: one bad row hides the good ones.
  const auto mixed = parse_csv(kHeader + "0,x,next,,,,,,,,,,,,,,\n0,x\n");
  REQUIRE(std::holds_alternative<std::vector<CompileError>>(mixed));
  CHECK(std::get<std::vector<CompileError>>(mixed).size() == 1);
}

TEST_CASE("compile examples") {
  const auto one = compile_text("0,Remove the tire,next,0,tire_v1,0,0,0,0,0,0,0,0,1,1,1,1\n");
  REQUIRE(std::holds_alternative<InstructionSet>(one));
  const auto& set = std::get<InstructionSet>(one);
  REQUIRE(set.steps.size() == 1);
  CHECK(set.set_id == "tire");
  CHECK(set.steps[0].text == "Remove the tire");
  REQUIRE(set.steps[0].cues.size() == 1);
  CHECK(set.steps[0].cues[0].asset.id() == "tire_v1");
  CHECK(set.steps[0].cues[0].keyframes.size() == 1);
  CHECK(set.steps[0].cues[0].keyframes[0] == CueKeyframe{0, {0, 0, 0}, {0, 0, 0, 1}, {1, 1, 1}});

  const auto gap = compile_text("0,a,next,,,,,,,,,,,,,,\n2,b,next,,,,,,,,,,,,,,\n");
  CHECK(has_code(errors_of(gap), CompileErrc::BadStepOrder, 3));

  const auto renorm = compile_text("0,x,next,0,tire_v1,1,0,0,0,0,0,0,0,0.9995,1,1,1\n");
  REQUIRE(std::holds_alternative<InstructionSet>(renorm));
  const auto q = std::get<InstructionSet>(renorm).steps[0].cues[0].keyframes[0].rotation;
  CHECK(q.w == 1.0);
  CHECK(std::abs(q.norm() - 1.0) < 1e-12);
}

TEST_CASE("compile diagnostics") {
  CHECK(has_code(errors_of(compile_text("1,a,next,,,,,,,,,,,,,,\n")), CompileErrc::BadStepOrder, 2));
  CHECK(has_code(errors_of(compile_text("0,,next,,,,,,,,,,,,,,\n")), CompileErrc::EmptyText, 2));
  CHECK(has_code(errors_of(compile_text("0,x,next,0,tire_v1,0,abc,0,0,0,0,0,0,1,1,1,1\n")), CompileErrc::BadNumber, 2));
  CHECK(has_code(errors_of(compile_text("0,x,next,0,tire_v1,0,0,inf,0,0,0,0,0,1,1,1,1\n")), CompileErrc::BadNumber, 2));
  CHECK(has_code(errors_of(compile_text("0,x,next,0,tire_v1,0,0,0,0,0,0,0,0,1,0,1,1\n")), CompileErrc::BadNumber, 2));
  CHECK(has_code(errors_of(compile_text("0,x,next,0,tire_v1,2,0,0,0,0,0,0,0,1,1,1,1\n")), CompileErrc::BadNumber, 2));
  CHECK(has_code(errors_of(compile_text("0,x,next,0,tire_v1,0,0,0,0,0,0,0,0,0.5,1,1,1\n")),
                 CompileErrc::NonUnitQuaternion, 2));
  CHECK(has_code(errors_of(compile_text("0,x,next,1,tire_v1,0,0,0,0,0,0,0,0,1,1,1,1\n")), CompileErrc::BadCueOrder, 2));
  CHECK(has_code(errors_of(compile_text("0,x,next,0,tire_v1,0,1,0,0,0,0,0,0,1,1,1,1\n"
                                        "0,x,next,0,tire_v1,0,0.5,0,0,0,0,0,0,1,1,1,1\n")),
                 CompileErrc::BadTrack, 3));
  CHECK(has_code(errors_of(compile_text("0,x,next,0,tire_v1,1,0,0,0,0,0,0,0,1,1,1,1\n"
                                        "0,x,next,0,tire_v1,1,1,0,0,0,0,0,0,1,1,1,1\n")),
                 CompileErrc::BadTrack, 3));
  CHECK(has_code(errors_of(compile_text("0,x,next,0,tire_v1,0,0,0,0,0,0,0,0,1,1,1,1\n"
                                        "0,y,next,0,tire_v1,0,1,0,0,0,0,0,0,1,1,1,1\n")),
                 CompileErrc::InconsistentRow, 3));
  CHECK(has_code(errors_of(compile_text("0,x,next,0,tire_v1,0,0,0,0,0,0,0,0,1,1,1,1\n"
                                        "0,x,next,0,jack,0,1,0,0,0,0,0,0,1,1,1,1\n")),
                 CompileErrc::InconsistentRow, 3));
  CHECK(has_code(errors_of(compile_text("0,x,next,0,,0,0,0,0,0,0,0,0,1,1,1,1\n")), CompileErrc::BadAsset, 2));
  CHECK(has_code(errors_of(compile_text("0,x,next,,,0,,,,,,,,,,,\n")), CompileErrc::BadNumber, 2));
  CHECK(!errors_of(compile_text("")).empty());
}

TEST_CASE("compile reports every independently malformed row") {
  gen::Rng rng(30);
  for (int trial = 0; trial < 50; ++trial) {
    std::string body;
    std::size_t bad = 0;
    for (std::size_t step = 0; step < 20; ++step) {
      const bool corrupt = gen::index(rng, 0, 2) == 0;
      bad += corrupt;
      body += std::to_string(step) + ",text,next,0,tire_v1,0,0," + (corrupt ? "x" : "0") + ",0,0,0,0,0,1,1,1,1\n";
    }
    const auto errors = errors_of(compile_text(body));
    CHECK(errors.size() >= bad);
  }
}

TEST_CASE("CSV round trip through the canonical emitter") {
  gen::Rng rng(31);
  const auto cat = gen::catalog_with_all_ids();
  for (int i = 0; i < 300; ++i) {
    const auto set = gen::random_set(rng);
    const auto csv = oracle::emit_csv(set);
    const auto back = compile_document(csv, set.set_id, set.target_asset);
    REQUIRE_MESSAGE(std::holds_alternative<InstructionSet>(back), csv);
    CHECK(std::get<InstructionSet>(back) == set);
    CHECK(validate(std::get<InstructionSet>(back), cat).ok());
  }
}
