#include <algorithm>
#include <set>

#include "doctest.h"
#include "mref/console.hpp"
#include "support/generators.hpp"

using namespace mref;

namespace {

PhraseToken tok(std::string_view s, double t = 0.0) { return *PhraseToken::make(s, t); }

InstructionSet demo_set(std::size_t steps) {
  InstructionSet set{"tire", AssetRef("mmsev_rover"), {}};
  for (std::size_t i = 0; i < steps; ++i) {
    set.steps.push_back({i, "step text " + std::to_string(i), i % 2 ? "next" : "", {}});
  }
  return set;
}

template <typename A>
std::vector<A> actions(const std::vector<Effect>& effects) {
  std::vector<A> out;
  for (const auto& e : effects)
    if (const auto* a = std::get_if<A>(&e.action)) out.push_back(*a);
  return out;
}

std::string display_of(const std::vector<Effect>& effects) {
  const auto d = actions<effect::Display>(effects);
  return d.empty() ? "" : d.back().text;
}

const std::vector<std::string> kFuzzWords{"open instructions", "close", "next", "back", "begin sampling",
                                          "collect sample", "stop", "exit", "take note", "end note",
                                          "gray", "about fist sized", "banana", "open", "instructions please",
                                          "nextt", "begin", "sampling", "rocky", "hello mission control"};

}  // namespace

TEST_CASE("phrase normalization") {
  CHECK(tok("  Open   Instructions\t").text == "open instructions");
  CHECK(!PhraseToken::make("   ", 1.0));
  CHECK(tok("NEXT", 2.5).t == 2.5);
}

TEST_CASE("vocabulary") {
  const auto& v = keyword_vocabulary();
  CHECK(v.size() <= 25);
  CHECK(std::set<std::string>(v.begin(), v.end()).size() == v.size());
  for (const auto& k : v) {
    CHECK(is_keyword(k));
    CHECK(tok(k).text == k);
  }
  CHECK(!is_keyword("gray"));
}

TEST_CASE("instruction navigation") {
  Console c;
  CHECK(display_of(c.handle(tok("open instructions"))) == "no instruction set loaded");
  CHECK(c.state().mode == ConsoleMode::Idle);

  const auto loaded = c.load(demo_set(5), 1.0);
  CHECK(display_of(loaded) == "instruction set tire received (5 steps)");

  const auto open = c.handle(tok("open instructions", 2));
  CHECK(c.state().mode == ConsoleMode::Instructions);
  CHECK(c.state().step == 0);
  REQUIRE(open.size() == 1);
  CHECK(display_of(open) == "step 1/5: step text 0");
  CHECK(open[0].t == 2);

  for (int i = 0; i < 3; ++i) c.handle(tok("next"));
  CHECK(c.state().step == 3);
  CHECK(display_of(c.handle(tok("back"))) == "step 3/5: step text 2");
  CHECK(display_of(c.handle(tok("next"))) == "step 4/5: step text 3 [say: next]");
  CHECK(display_of(c.handle(tok("next"))) == "step 5/5: step text 4");
  CHECK(c.state().step == 4);
  CHECK(display_of(c.handle(tok("next"))) == "step 5/5: step text 4");
  CHECK(c.state().step == 4);
  c.handle(tok("back"));
  CHECK(c.state().step == 3);

  c.handle(tok("close"));
  CHECK(c.state().mode == ConsoleMode::Idle);
  c.handle(tok("open instructions"));
  CHECK(c.state().step == 0);
  CHECK(c.handle(tok("back")).size() == 1);
  CHECK(c.state().step == 0);
}

TEST_CASE("reloading a set replaces it and clamps the open step") {
  Console c;
  c.load(demo_set(5), 0);
  c.handle(tok("open instructions"));
  for (int i = 0; i < 4; ++i) c.handle(tok("next"));
  c.load(demo_set(2), 1);
  CHECK(c.state().loaded_sets.size() == 1);
  CHECK(c.state().step == 1);
}

TEST_CASE("sampling dialogue") {
  Console c;
  const auto begin = c.handle(tok("begin sampling", 10));
  CHECK(c.state().mode == ConsoleMode::Sampling);
  REQUIRE(begin.size() == 5);
  CHECK(std::get<effect::OpenFolder>(begin[0].action).path == "session/env_1");
  CHECK(std::get<effect::OpenFolder>(begin[1].action).path == "session/env_1/sample_1");
  CHECK(std::get<effect::AppendNote>(begin[2].action).line == "sample sample_1 t=10.000000");
  CHECK(std::get<effect::SchedulePhotos>(begin[3].action).interval == 0.5);
  CHECK(display_of(begin) == "What color is the sample?");

  const auto gray = c.handle(tok("Gray", 12.5));
  REQUIRE(gray.size() == 1);
  const auto& note = std::get<effect::AppendNote>(gray[0].action);
  CHECK(note.path == "session/env_1/sample_1/notes.txt");
  CHECK(note.line == "t=12.500000 What color is the sample? :: gray");
  CHECK(c.state().question == 0);

  CHECK(display_of(c.handle(tok("next", 13))) == "What is the approximate size?");
  c.handle(tok("fist sized", 14));
  for (int i = 0; i < 5; ++i) c.handle(tok("next", 15));
  CHECK(c.state().question == 3);

  const auto sample = *c.state().sample;
  const auto exit = c.handle(tok("exit", 20));
  CHECK(c.state().mode == ConsoleMode::Idle);
  const auto sends = actions<effect::SendDownlink>(exit);
  const auto notes = std::count_if(sends.begin(), sends.end(), [](const effect::SendDownlink& s) {
    return s.kind == MessageKind::NoteFile;
  });
  CHECK(notes == 1);
  CHECK(sends[0].content == export_notes(sample));
  CHECK(sends[0].payload_bytes == export_notes(sample).size());
  CHECK(export_notes(sample) ==
        "sample sample_1 t=10.000000\n"
        "t=12.500000 What color is the sample? :: gray\n"
        "t=14.000000 What is the approximate size? :: fist sized\n");
  CHECK(actions<effect::CancelPhotos>(exit).size() == 1);
}

TEST_CASE("collect sample finalizes and starts a new record") {
  Console c;
  c.handle(tok("begin sampling", 1));
  c.handle(tok("gray", 2));
  const auto collect = c.handle(tok("collect sample", 3));
  const auto sends = actions<effect::SendDownlink>(collect);
  REQUIRE(sends.size() == 1);
  CHECK(sends[0].path == "session/env_1/sample_1/notes.txt");
  CHECK(c.state().sample->sample_id == "sample_2");
  CHECK(c.state().sample->folder == "session/env_1/sample_2");
  CHECK(c.state().question == 0);
  CHECK(c.state().photos.active);

  c.handle(tok("exit", 4));
  c.handle(tok("begin sampling", 5));
  CHECK(c.state().sample->folder == "session/env_2/sample_3");
}

TEST_CASE("photo schedule") {
  Console c;
  CHECK(c.tick(100).empty());
  c.handle(tok("begin sampling", 10.0));
  CHECK(c.tick(10.0).empty());
  const auto two = c.tick(11.0);
  REQUIRE(two.size() == 2);
  CHECK(two[0].t == 10.5);
  CHECK(two[1].t == 11.0);
  CHECK(std::get<effect::CapturePhoto>(two[1].action).seq == 2);
  CHECK(c.next_photo() == 11.5);
  CHECK(c.tick(11.2).empty());

  const auto stop = c.handle(tok("stop", 11.3));
  CHECK(actions<effect::CancelPhotos>(stop).size() == 1);
  CHECK(c.tick(20).empty());
  CHECK(!c.next_photo());
  CHECK(c.handle(tok("stop", 21)).empty());

  const auto exit = c.handle(tok("exit", 22));
  const auto sends = actions<effect::SendDownlink>(exit);
  REQUIRE(sends.size() == 2);
  CHECK(sends[1].kind == MessageKind::PhotoMeta);
  CHECK(sends[1].payload_bytes ==
        photo_log_line({"", 1}, 10.5).size() + 1 + photo_log_line({"", 2}, 11.0).size() + 1);
  CHECK(photo_log_line({"", 2}, 11.0) == "photo seq=2 t=11.000000");
}

TEST_CASE("note taking") {
  Console c;
  c.handle(tok("take note", 1));
  CHECK(c.state().mode == ConsoleMode::NoteTaking);
  c.handle(tok("ridge to the north", 2));
  c.handle(tok("next", 2.5));
  const auto end = c.handle(tok("end note", 3));
  const auto sends = actions<effect::SendDownlink>(end);
  REQUIRE(sends.size() == 1);
  CHECK(sends[0].path == "session/notes/note_1.txt");
  CHECK(sends[0].content == "note note_1 t=1.000000\nt=2.000000 ridge to the north\n");
  CHECK(c.state().mode == ConsoleMode::Idle);
}

TEST_CASE("format_effect") {
  CHECK(format_effect({1.5, effect::Display{"say \"next\""}}) == "effect t=1.500000 DISPLAY text=\"say \\\"next\\\"\"");
  CHECK(format_effect({2, effect::CapturePhoto{"session/env_1/sample_1/photos.log", 3}}) ==
        "effect t=2.000000 CAPTURE_PHOTO path=session/env_1/sample_1/photos.log seq=3");
  CHECK(format_effect({3, effect::SendDownlink{MessageKind::NoteFile, 42, "a/notes.txt", "x"}}) ==
        "effect t=3.000000 SEND_DOWNLINK kind=NOTE_FILE bytes=42 path=a/notes.txt");
}

TEST_CASE("unknown tokens are absorbed in every mode") {
  gen::Rng rng(70);
  const ConsoleConfig config;
  for (int trial = 0; trial < 300; ++trial) {
    Console c(config);
    c.load(demo_set(gen::index(rng, 1, 6)), 0);
    double t = 0;
    for (int i = 0; i < 40; ++i) {
      t += gen::uniform(rng, 0, 2);
      const std::string junk = "zz " + gen::random_text(rng, 6);
      const auto phrase = PhraseToken::make(junk, t);
      if (phrase && !is_keyword(phrase->text) && c.state().mode != ConsoleMode::Sampling &&
          c.state().mode != ConsoleMode::NoteTaking) {
        const auto [state, effects] = handle_token(config, c.state(), *phrase);
        CHECK(state == c.state());
        CHECK(effects.empty());
      }
      c.tick(t);
      c.handle(tok(kFuzzWords[gen::index(rng, 0, kFuzzWords.size() - 1)], t));
      if (c.state().mode == ConsoleMode::Instructions) {
        CHECK(c.state().step < c.state().loaded_sets[c.state().set_index].step_texts.size());
      }
      if (c.state().mode == ConsoleMode::Sampling) {
        CHECK(c.state().question < config.questions.size());
      }
    }
  }
}

TEST_CASE("replay determinism and note-file accounting") {
  gen::Rng rng(71);
  const ConsoleConfig config;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<PhraseToken> tokens;
    double t = 0;
    for (int i = 0; i < 60; ++i) {
      t += gen::uniform(rng, 0, 1.5);
      tokens.push_back(tok(kFuzzWords[gen::index(rng, 0, kFuzzWords.size() - 1)], t));
    }
    const auto run = [&] {
      Console c(config);
      c.load(demo_set(4), 0);
      std::vector<std::string> trace;
      for (const auto& p : tokens) {
        for (const auto& e : c.tick(p.t)) trace.push_back(format_effect(e));
        const auto before = c.state();
        const auto effects = c.handle(p);
        for (const auto& e : effects) trace.push_back(format_effect(e));
        if (before.mode == ConsoleMode::Sampling && p.text == "exit") {
          const auto sends = actions<effect::SendDownlink>(effects);
          REQUIRE(!sends.empty());
          CHECK(std::count_if(sends.begin(), sends.end(),
                              [](const effect::SendDownlink& s) { return s.kind == MessageKind::NoteFile; }) == 1);
          CHECK(sends[0].content == export_notes(*before.sample));
        }
      }
      return std::make_pair(trace, c.state());
    };
    const auto a = run();
    const auto b = run();
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
  }
}
