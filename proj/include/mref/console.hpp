#pragma once

// Astronaut-side control logic driven by recognized key phrases: instruction
// navigation, the sampling dialogue with note files, free-form note taking and
// the periodic photo-capture schedule. Effects are returned as values; nothing
// here touches the filesystem or the link.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mref/instruction.hpp"
#include "mref/link_sim.hpp"

namespace mref {

/// Lower-cased, trimmed recognized phrase with internal whitespace collapsed.
struct PhraseToken {
  std::string text;
  double t = 0.0;

  /// nullopt when the phrase is empty after normalization.
  static std::optional<PhraseToken> make(std::string_view raw, double t);
};

/// Every phrase with a fixed meaning somewhere in the grammar.
const std::vector<std::string>& keyword_vocabulary();
bool is_keyword(std::string_view phrase);

struct ConsoleConfig {
  std::vector<std::string> questions{
      "What color is the sample?",
      "What is the approximate size?",
      "Describe the texture.",
      "Where was it collected?",
  };
  double photo_interval = 0.5;
  std::string session_root = "session";
};

enum class ConsoleMode { Idle, Instructions, Sampling, NoteTaking };
std::string_view to_string(ConsoleMode mode);

struct Answer {
  std::string question;
  std::string answer;
  double t = 0.0;

  friend bool operator==(const Answer&, const Answer&) = default;
};

struct SampleRecord {
  std::string sample_id;  // sample_<counter>
  std::string folder;     // <session_root>/<env_id>/<sample_id>
  std::vector<Answer> answers;
  double created_at = 0.0;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

/// `sample <id> t=<created_at>` followed by `t=<s> <question> :: <answer>` per answer.
std::string export_notes(const SampleRecord& record);

struct LoadedSet {
  std::string set_id;
  std::vector<std::string> step_texts;
  std::vector<std::string> hints;

  friend bool operator==(const LoadedSet&, const LoadedSet&) = default;
};

struct PhotoSchedule {
  bool active = false;
  double start = 0.0;
  std::uint64_t ticks = 0;  // boundaries already emitted since start
  std::uint64_t seq = 0;    // captures in the current sample folder
  std::uint64_t log_bytes = 0;
  std::string log_path;

  friend bool operator==(const PhotoSchedule&, const PhotoSchedule&) = default;
};

struct ConsoleState {
  ConsoleMode mode = ConsoleMode::Idle;
  std::vector<LoadedSet> loaded_sets;
  std::size_t set_index = 0;
  std::size_t step = 0;
  std::size_t question = 0;
  std::uint32_t sample_counter = 0;
  std::uint32_t env_counter = 0;
  std::uint32_t note_counter = 0;
  std::optional<SampleRecord> sample;
  std::string env_id;
  std::string note_path;
  std::string note_content;
  PhotoSchedule photos;

  friend bool operator==(const ConsoleState&, const ConsoleState&) = default;
};

namespace effect {
struct Display { std::string text; };
struct OpenFolder { std::string path; };
struct AppendNote { std::string path; std::string line; };
struct SchedulePhotos { std::string path; double interval = 0.5; };
struct CancelPhotos { std::string path; };
struct CapturePhoto { std::string path; std::uint64_t seq = 0; };
struct SendDownlink { MessageKind kind = MessageKind::NoteFile; std::uint64_t payload_bytes = 0; std::string path; std::string content; };
}  // namespace effect

struct Effect {
  double t = 0.0;
  std::variant<effect::Display, effect::OpenFolder, effect::AppendNote, effect::SchedulePhotos, effect::CancelPhotos,
               effect::CapturePhoto, effect::SendDownlink>
      action;
};

/// `effect t=<s> <KIND> <args>`
std::string format_effect(const Effect& e);

/// Line a CapturePhoto effect appends to the sample's photos.log.
std::string photo_log_line(const effect::CapturePhoto& capture, double t);

using Transition = std::pair<ConsoleState, std::vector<Effect>>;

Transition handle_token(const ConsoleConfig& config, ConsoleState state, const PhraseToken& token);

/// Emits one capture per schedule boundary in (last tick, t].
Transition photo_tick(const ConsoleConfig& config, ConsoleState state, double t);

/// Time of the next capture boundary, if capture is scheduled.
std::optional<double> next_photo_time(const ConsoleConfig& config, const ConsoleState& state);

/// Makes a delivered set available to "open instructions". A set with the
/// same id replaces the earlier copy.
Transition load_set(ConsoleState state, const InstructionSet& set, double t);

/// Owning wrapper that threads the state through the pure transitions.
class Console {
 public:
  explicit Console(ConsoleConfig config = {}) : config_(std::move(config)) {}

  std::vector<Effect> handle(const PhraseToken& token) { return apply(handle_token(config_, state_, token)); }
  std::vector<Effect> tick(double t) { return apply(photo_tick(config_, state_, t)); }
  std::vector<Effect> load(const InstructionSet& set, double t) { return apply(load_set(state_, set, t)); }
  std::optional<double> next_photo() const { return next_photo_time(config_, state_); }

  const ConsoleState& state() const { return state_; }
  const ConsoleConfig& config() const { return config_; }

 private:
  std::vector<Effect> apply(Transition tr) {
    state_ = std::move(tr.first);
    return std::move(tr.second);
  }

  ConsoleConfig config_;
  ConsoleState state_;
};

}  // namespace mref
