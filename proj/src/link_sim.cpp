#include "mref/link_sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mref/text.hpp"

namespace mref {

std::string_view to_string(LinkErrc code) {
  switch (code) {
    case LinkErrc::BadConfig: return "BAD_CONFIG";
    case LinkErrc::NonMonotonicSubmit: return "NON_MONOTONIC_SUBMIT";
    case LinkErrc::DuplicateId: return "DUPLICATE_ID";
    case LinkErrc::TimeRegression: return "TIME_REGRESSION";
    case LinkErrc::NoTraffic: return "NO_TRAFFIC";
    case LinkErrc::BadWindow: return "BAD_WINDOW";
    case LinkErrc::UnknownPreset: return "UNKNOWN_PRESET";
  }
  return "UNKNOWN";
}

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::InstructionSet: return "INSTRUCTION_SET";
    case MessageKind::NoteFile: return "NOTE_FILE";
    case MessageKind::PhotoMeta: return "PHOTO_META";
    case MessageKind::TelemetryBatch: return "TELEMETRY_BATCH";
  }
  return "UNKNOWN";
}

std::optional<MessageKind> parse_message_kind(std::string_view s) {
  for (auto kind : {MessageKind::InstructionSet, MessageKind::NoteFile, MessageKind::PhotoMeta,
                    MessageKind::TelemetryBatch}) {
    if (s == to_string(kind)) return kind;
  }
  return std::nullopt;
}

bool is_uplink(MessageKind kind) { return kind == MessageKind::InstructionSet; }

void LinkConfig::check() const {
  if (!std::isfinite(one_way_delay) || one_way_delay < 0.0) {
    throw LinkError(LinkErrc::BadConfig, "one-way delay must be finite and >= 0");
  }
  if (!std::isfinite(data_rate) || !(data_rate > 0.0)) {
    throw LinkError(LinkErrc::BadConfig, "data rate must be finite and > 0");
  }
}

LinkConfig LinkConfig::preset(std::string_view name) {
  // Propagation is half the quoted round trip: 2.6 s lunar, 22 min Mars.
  if (name == "lunar") return {"lunar", 1.3, 4000.0};
  if (name == "lunar-low") return {"lunar-low", 1.3, 62.5};
  if (name == "mars") return {"mars", 660.0, 4000.0};
  if (name == "mars-low") return {"mars-low", 660.0, 62.5};
  throw LinkError(LinkErrc::UnknownPreset, "unknown link preset " + std::string(name));
}

Link::Link(LinkConfig config) : config_(std::move(config)) { config_.check(); }

std::uint64_t Link::submit(const Message& message, double t_submit) {
  if (!std::isfinite(t_submit) || t_submit < now_ || t_submit < last_submit_) {
    throw LinkError(LinkErrc::NonMonotonicSubmit, "submit at t=" + text::fixed6(t_submit) + " precedes t=" +
                                                      text::fixed6(std::max(now_, last_submit_)));
  }
  if (!ids_.insert(message.id).second) {
    throw LinkError(LinkErrc::DuplicateId, "message id " + std::to_string(message.id) + " already submitted");
  }
  Transmission tx;
  tx.message = message;
  tx.t_submit = t_submit;
  tx.t_tx_start = std::max(t_submit, channel_free_at_);
  tx.t_tx_end = tx.t_tx_start + static_cast<double>(message.payload_bytes) / config_.data_rate;
  tx.t_delivered = tx.t_tx_end + config_.one_way_delay;
  channel_free_at_ = tx.t_tx_end;
  last_submit_ = t_submit;
  queue_.push_back(tx);
  return message.id;
}

std::vector<Transmission> Link::run_until(double t) {
  if (!(t >= now_)) {
    throw LinkError(LinkErrc::TimeRegression, "run_until t=" + text::fixed6(t) + " precedes t=" + text::fixed6(now_));
  }
  // FIFO with a constant delay: delivery times are nondecreasing in queue order.
  std::vector<Transmission> out;
  while (!queue_.empty() && queue_.front().t_delivered <= t) {
    out.push_back(queue_.front());
    queue_.pop_front();
  }
  std::stable_sort(out.begin(), out.end(), [](const Transmission& a, const Transmission& b) {
    if (a.t_delivered != b.t_delivered) return a.t_delivered < b.t_delivered;
    return a.message.id < b.message.id;
  });
  now_ = t;
  return out;
}

std::optional<double> Link::next_delivery() const {
  if (queue_.empty()) return std::nullopt;
  return queue_.front().t_delivered;
}

BandwidthStats bandwidth_stats(const std::vector<Transmission>& events, double window) {
  if (!std::isfinite(window) || !(window > 0.0)) {
    throw LinkError(LinkErrc::BadWindow, "window must be finite and > 0");
  }
  if (events.empty()) {
    throw LinkError(LinkErrc::NoTraffic, "no deliveries to account");
  }
  const auto reception_start = [](const Transmission& tx) {
    return tx.t_tx_start + (tx.t_delivered - tx.t_tx_end);
  };
  double origin = reception_start(events.front());
  double last = events.front().t_delivered;
  std::uint64_t total = 0;
  for (const auto& tx : events) {
    origin = std::min(origin, reception_start(tx));
    last = std::max(last, tx.t_delivered);
    total += tx.message.payload_bytes;
  }
  const auto windows = static_cast<std::int64_t>(std::max(1.0, std::ceil((last - origin) / window)));
  const auto bucket_of = [&](double t) {
    const auto k = static_cast<std::int64_t>(std::floor((t - origin) / window));
    return std::clamp<std::int64_t>(k, 0, windows - 1);
  };

  std::map<std::int64_t, double> buckets;
  for (const auto& tx : events) {
    const double bytes = static_cast<double>(tx.message.payload_bytes);
    if (bytes == 0.0) continue;
    const double a = reception_start(tx);
    const double b = tx.t_delivered;
    if (!(b > a)) {
      buckets[bucket_of(a)] += bytes;
      continue;
    }
    for (std::int64_t k = bucket_of(a); k <= bucket_of(b); ++k) {
      const double lo = std::max(a, origin + static_cast<double>(k) * window);
      const double hi = k == windows - 1 ? b : std::min(b, origin + static_cast<double>(k + 1) * window);
      if (hi > lo) {
        buckets[k] += bytes * ((hi - lo) / (b - a));
      }
    }
  }

  BandwidthStats stats;
  stats.window = window;
  stats.total_bytes = total;
  stats.average_bps = static_cast<double>(total) / (static_cast<double>(windows) * window);
  for (const auto& [k, bytes] : buckets) {
    stats.peak_window_bps = std::max(stats.peak_window_bps, bytes / window);
  }
  // The mean of the windows cannot exceed their maximum; absorb rounding.
  stats.average_bps = std::min(stats.average_bps, stats.peak_window_bps);
  return stats;
}

std::string format_delivery(const Transmission& tx) {
  return "deliver t=" + text::fixed6(tx.t_delivered) + " id=" + std::to_string(tx.message.id) +
         " kind=" + std::string(to_string(tx.message.kind)) + " bytes=" + std::to_string(tx.message.payload_bytes);
}

}  // namespace mref
