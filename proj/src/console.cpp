#include "mref/console.hpp"

#include <algorithm>
#include <cmath>

#include "mref/text.hpp"

namespace mref {

namespace {

namespace kw {
constexpr std::string_view kOpenInstructions = "open instructions";
constexpr std::string_view kClose = "close";
constexpr std::string_view kNext = "next";
constexpr std::string_view kBack = "back";
constexpr std::string_view kBeginSampling = "begin sampling";
constexpr std::string_view kCollectSample = "collect sample";
constexpr std::string_view kStop = "stop";
constexpr std::string_view kExit = "exit";
constexpr std::string_view kTakeNote = "take note";
constexpr std::string_view kEndNote = "end note";
}  // namespace kw

struct Builder {
  double t;
  std::vector<Effect> effects;

  template <typename Action>
  void emit(Action action) {
    effects.push_back(Effect{t, std::move(action)});
  }
};

std::string step_display(const LoadedSet& set, std::size_t step) {
  std::string out = "step " + std::to_string(step + 1) + "/" + std::to_string(set.step_texts.size()) + ": " +
                    set.step_texts[step];
  if (!set.hints[step].empty()) {
    out += " [say: " + set.hints[step] + "]";
  }
  return out;
}

std::string notes_path(const SampleRecord& record) { return record.folder + "/notes.txt"; }

std::string answer_line(const Answer& a) { return "t=" + text::fixed6(a.t) + " " + a.question + " :: " + a.answer; }

std::string sample_header(const SampleRecord& record) {
  return "sample " + record.sample_id + " t=" + text::fixed6(record.created_at);
}

void start_sample(const ConsoleConfig& config, ConsoleState& s, Builder& out) {
  ++s.sample_counter;
  SampleRecord record;
  record.sample_id = "sample_" + std::to_string(s.sample_counter);
  record.folder = config.session_root + "/" + s.env_id + "/" + record.sample_id;
  record.created_at = out.t;
  out.emit(effect::OpenFolder{record.folder});
  out.emit(effect::AppendNote{notes_path(record), sample_header(record)});
  s.photos = PhotoSchedule{true, out.t, 0, 0, 0, record.folder + "/photos.log"};
  out.emit(effect::SchedulePhotos{s.photos.log_path, config.photo_interval});
  s.sample = std::move(record);
  s.question = 0;
  out.emit(effect::Display{config.questions.front()});
}

void cancel_photos(ConsoleState& s, Builder& out) {
  if (s.photos.active) {
    s.photos.active = false;
    out.emit(effect::CancelPhotos{s.photos.log_path});
  }
}

// Closes the current record and hands its files to the downlink.
void finish_sample(ConsoleState& s, Builder& out) {
  cancel_photos(s, out);
  const std::string notes = export_notes(*s.sample);
  out.emit(effect::SendDownlink{MessageKind::NoteFile, notes.size(), notes_path(*s.sample), notes});
  if (s.photos.seq > 0) {
    out.emit(effect::SendDownlink{MessageKind::PhotoMeta, s.photos.log_bytes, s.photos.log_path, {}});
  }
  s.sample.reset();
  s.photos = PhotoSchedule{};
}

void on_idle(const ConsoleConfig& config, ConsoleState& s, const std::string& phrase, Builder& out) {
  if (phrase == kw::kOpenInstructions) {
    if (s.loaded_sets.empty()) {
      out.emit(effect::Display{"no instruction set loaded"});
      return;
    }
    s.mode = ConsoleMode::Instructions;
    s.set_index = s.loaded_sets.size() - 1;
    s.step = 0;
    out.emit(effect::Display{step_display(s.loaded_sets[s.set_index], 0)});
  } else if (phrase == kw::kBeginSampling) {
    ++s.env_counter;
    s.env_id = "env_" + std::to_string(s.env_counter);
    s.mode = ConsoleMode::Sampling;
    out.emit(effect::OpenFolder{config.session_root + "/" + s.env_id});
    start_sample(config, s, out);
  } else if (phrase == kw::kTakeNote) {
    ++s.note_counter;
    s.mode = ConsoleMode::NoteTaking;
    const std::string folder = config.session_root + "/notes";
    s.note_path = folder + "/note_" + std::to_string(s.note_counter) + ".txt";
    const std::string header = "note note_" + std::to_string(s.note_counter) + " t=" + text::fixed6(out.t);
    s.note_content = header + "\n";
    out.emit(effect::OpenFolder{folder});
    out.emit(effect::AppendNote{s.note_path, header});
    out.emit(effect::Display{"note taking: speak, then say \"end note\""});
  }
}

void on_instructions(ConsoleState& s, const std::string& phrase, Builder& out) {
  const LoadedSet& set = s.loaded_sets[s.set_index];
  if (phrase == kw::kNext) {
    s.step = std::min(s.step + 1, set.step_texts.size() - 1);
    out.emit(effect::Display{step_display(set, s.step)});
  } else if (phrase == kw::kBack) {
    s.step = s.step == 0 ? 0 : s.step - 1;
    out.emit(effect::Display{step_display(set, s.step)});
  } else if (phrase == kw::kClose) {
    s.mode = ConsoleMode::Idle;
    s.step = 0;
    out.emit(effect::Display{"instructions closed"});
  }
}

void on_sampling(const ConsoleConfig& config, ConsoleState& s, const std::string& phrase, Builder& out) {
  const std::size_t last_question = config.questions.size() - 1;
  if (phrase == kw::kNext) {
    s.question = std::min(s.question + 1, last_question);
    out.emit(effect::Display{config.questions[s.question]});
  } else if (phrase == kw::kBack) {
    s.question = s.question == 0 ? 0 : s.question - 1;
    out.emit(effect::Display{config.questions[s.question]});
  } else if (phrase == kw::kCollectSample) {
    finish_sample(s, out);
    start_sample(config, s, out);
  } else if (phrase == kw::kStop) {
    cancel_photos(s, out);
  } else if (phrase == kw::kExit) {
    finish_sample(s, out);
    s.mode = ConsoleMode::Idle;
    s.question = 0;
    s.env_id.clear();
    out.emit(effect::Display{"sampling closed"});
  } else if (!is_keyword(phrase)) {
    Answer answer{config.questions[s.question], phrase, out.t};
    out.emit(effect::AppendNote{notes_path(*s.sample), answer_line(answer)});
    s.sample->answers.push_back(std::move(answer));
  }
}

void on_note(ConsoleState& s, const std::string& phrase, Builder& out) {
  if (phrase == kw::kEndNote) {
    out.emit(effect::SendDownlink{MessageKind::NoteFile, s.note_content.size(), s.note_path, s.note_content});
    s.mode = ConsoleMode::Idle;
    s.note_path.clear();
    s.note_content.clear();
    out.emit(effect::Display{"note saved"});
  } else if (!is_keyword(phrase)) {
    const std::string line = "t=" + text::fixed6(out.t) + " " + phrase;
    s.note_content += line + "\n";
    out.emit(effect::AppendNote{s.note_path, line});
  }
}

}  // namespace

std::optional<PhraseToken> PhraseToken::make(std::string_view raw, double t) {
  std::string normalized;
  for (char c : text::to_lower(text::trim(raw))) {
    const bool space = c == ' ' || c == '\t' || c == '\r' || c == '\n';
    if (space) {
      if (!normalized.empty() && normalized.back() != ' ') normalized.push_back(' ');
    } else {
      normalized.push_back(c);
    }
  }
  if (normalized.empty()) {
    return std::nullopt;
  }
  return PhraseToken{std::move(normalized), t};
}

const std::vector<std::string>& keyword_vocabulary() {
  static const std::vector<std::string> vocabulary{
      std::string(kw::kOpenInstructions), std::string(kw::kClose),    std::string(kw::kNext),
      std::string(kw::kBack),             std::string(kw::kBeginSampling), std::string(kw::kCollectSample),
      std::string(kw::kStop),             std::string(kw::kExit),     std::string(kw::kTakeNote),
      std::string(kw::kEndNote),
  };
  return vocabulary;
}

bool is_keyword(std::string_view phrase) {
  const auto& v = keyword_vocabulary();
  return std::find(v.begin(), v.end(), phrase) != v.end();
}

std::string_view to_string(ConsoleMode mode) {
  switch (mode) {
    case ConsoleMode::Idle: return "IDLE";
    case ConsoleMode::Instructions: return "INSTRUCTIONS";
    case ConsoleMode::Sampling: return "SAMPLING";
    case ConsoleMode::NoteTaking: return "NOTE_TAKING";
  }
  return "UNKNOWN";
}

std::string export_notes(const SampleRecord& record) {
  std::string out = sample_header(record) + "\n";
  for (const auto& answer : record.answers) {
    out += answer_line(answer) + "\n";
  }
  return out;
}

Transition handle_token(const ConsoleConfig& config, ConsoleState state, const PhraseToken& token) {
  Builder out{token.t, {}};
  switch (state.mode) {
    case ConsoleMode::Idle: on_idle(config, state, token.text, out); break;
    case ConsoleMode::Instructions: on_instructions(state, token.text, out); break;
    case ConsoleMode::Sampling: on_sampling(config, state, token.text, out); break;
    case ConsoleMode::NoteTaking: on_note(state, token.text, out); break;
  }
  return {std::move(state), std::move(out.effects)};
}

std::optional<double> next_photo_time(const ConsoleConfig& config, const ConsoleState& state) {
  if (!state.photos.active) return std::nullopt;
  return state.photos.start + static_cast<double>(state.photos.ticks + 1) * config.photo_interval;
}

Transition photo_tick(const ConsoleConfig& config, ConsoleState state, double t) {
  std::vector<Effect> effects;
  while (true) {
    const auto next = next_photo_time(config, state);
    if (!next || *next > t) break;
    ++state.photos.ticks;
    ++state.photos.seq;
    effect::CapturePhoto capture{state.photos.log_path, state.photos.seq};
    state.photos.log_bytes += photo_log_line(capture, *next).size() + 1;
    effects.push_back(Effect{*next, std::move(capture)});
  }
  return {std::move(state), std::move(effects)};
}

Transition load_set(ConsoleState state, const InstructionSet& set, double t) {
  LoadedSet loaded{set.set_id, {}, {}};
  for (const auto& step : set.steps) {
    loaded.step_texts.push_back(step.text);
    loaded.hints.push_back(step.key_phrase_hint);
  }
  auto& sets = state.loaded_sets;
  const auto existing =
      std::find_if(sets.begin(), sets.end(), [&](const LoadedSet& s) { return s.set_id == set.set_id; });
  if (existing != sets.end()) {
    const auto pos = static_cast<std::size_t>(existing - sets.begin());
    // An open set keeps its position; clamp in case the new copy is shorter.
    *existing = std::move(loaded);
    if (state.mode == ConsoleMode::Instructions && state.set_index == pos) {
      state.step = std::min(state.step, existing->step_texts.size() - 1);
    }
  } else {
    sets.push_back(std::move(loaded));
  }
  std::vector<Effect> effects;
  effects.push_back(Effect{t, effect::Display{"instruction set " + set.set_id + " received (" +
                                              std::to_string(set.steps.size()) + " steps)"}});
  return {std::move(state), std::move(effects)};
}

std::string photo_log_line(const effect::CapturePhoto& capture, double t) {
  return "photo seq=" + std::to_string(capture.seq) + " t=" + text::fixed6(t);
}

std::string format_effect(const Effect& e) {
  std::string out = "effect t=" + text::fixed6(e.t) + " ";
  std::visit(
      [&](const auto& a) {
        using A = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<A, effect::Display>) {
          out += "DISPLAY text=" + text::quote(a.text);
        } else if constexpr (std::is_same_v<A, effect::OpenFolder>) {
          out += "OPEN_FOLDER path=" + a.path;
        } else if constexpr (std::is_same_v<A, effect::AppendNote>) {
          out += "APPEND_NOTE path=" + a.path + " line=" + text::quote(a.line);
        } else if constexpr (std::is_same_v<A, effect::SchedulePhotos>) {
          out += "SCHEDULE_PHOTOS path=" + a.path + " interval=" + text::fixed6(a.interval);
        } else if constexpr (std::is_same_v<A, effect::CancelPhotos>) {
          out += "CANCEL_PHOTOS path=" + a.path;
        } else if constexpr (std::is_same_v<A, effect::CapturePhoto>) {
          out += "CAPTURE_PHOTO path=" + a.path + " seq=" + std::to_string(a.seq);
        } else {
          out += "SEND_DOWNLINK kind=" + std::string(to_string(a.kind)) + " bytes=" + std::to_string(a.payload_bytes) +
                 " path=" + a.path;
        }
      },
      e.action);
  return out;
}

}  // namespace mref
