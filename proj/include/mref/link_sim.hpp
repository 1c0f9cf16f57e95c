#pragma once

// Deterministic discrete-event model of a one-way deep-space link: serial
// FIFO transmission at a fixed data rate followed by a fixed propagation delay.
// Time is virtual; nothing here sleeps or reads a clock.

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "mref/error.hpp"

namespace mref {

enum class LinkErrc { BadConfig, NonMonotonicSubmit, DuplicateId, TimeRegression, NoTraffic, BadWindow, UnknownPreset };
std::string_view to_string(LinkErrc code);
using LinkError = CodedError<LinkErrc>;

struct LinkConfig {
  std::string name;
  double one_way_delay = 0.0;  // seconds
  double data_rate = 1.0;      // bytes per second

  /// Throws LinkError(BadConfig) unless delay is finite and >= 0 and rate is finite and > 0.
  void check() const;

  /// `lunar`: 1.3 s, 4000 B/s. `mars`: 660 s, 4000 B/s. `mars-low`/`lunar-low` use 62.5 B/s.
  static LinkConfig preset(std::string_view name);
};

enum class MessageKind { InstructionSet, NoteFile, PhotoMeta, TelemetryBatch };
std::string_view to_string(MessageKind kind);
std::optional<MessageKind> parse_message_kind(std::string_view s);

/// Earth-to-spacecraft for instruction sets, spacecraft-to-Earth otherwise.
bool is_uplink(MessageKind kind);

struct Message {
  std::uint64_t id = 0;
  std::uint64_t payload_bytes = 0;
  MessageKind kind = MessageKind::InstructionSet;
};

struct Transmission {
  Message message;
  double t_submit = 0.0;
  double t_tx_start = 0.0;
  double t_tx_end = 0.0;
  double t_delivered = 0.0;
};

/// Single-owner link state driven along one virtual timeline.
class Link {
 public:
  explicit Link(LinkConfig config);

  const LinkConfig& config() const { return config_; }
  double now() const { return now_; }

  /// Queues `message` behind everything already submitted. Returns the message id.
  std::uint64_t submit(const Message& message, double t_submit);

  /// Delivers every transmission with t_delivered <= t not yet reported,
  /// ordered by (t_delivered, id), and advances the clock to t.
  std::vector<Transmission> run_until(double t);

  /// Earliest delivery time still pending, if any.
  std::optional<double> next_delivery() const;

  std::size_t pending() const { return queue_.size(); }

 private:
  LinkConfig config_;
  double now_ = 0.0;
  double last_submit_ = 0.0;
  double channel_free_at_ = 0.0;
  std::deque<Transmission> queue_;
  std::unordered_set<std::uint64_t> ids_;
};

struct BandwidthStats {
  double window = 0.0;
  double average_bps = 0.0;
  double peak_window_bps = 0.0;
  std::uint64_t total_bytes = 0;
};

/// Receive-side usage of a single link. Each transmission's bytes arrive
/// uniformly over [t_tx_start, t_tx_end] shifted by the propagation delay;
/// `events` must come from one link. Windows are consecutive and aligned at the
/// first reception start. The average spreads the total over the windows
/// spanned, so it never exceeds the peak.
/// Throws LinkError(NoTraffic) for an empty list, LinkError(BadWindow) for window <= 0.
BandwidthStats bandwidth_stats(const std::vector<Transmission>& events, double window);

/// `deliver t=<s> id=<u64> kind=<KIND> bytes=<u64>`
std::string format_delivery(const Transmission& tx);

}  // namespace mref
