#pragma once

// Telemetry classification against nominal ranges, edge-triggered alerting
// and the always-on consumables display.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mref/error.hpp"

namespace mref {

enum class TelemetryErrc { UnknownChannel, TimeRegression, NonFinite, ConfigParse, Io };
std::string_view to_string(TelemetryErrc code);
using TelemetryError = CodedError<TelemetryErrc>;

enum class Severity { Critical, Caution };
std::string_view to_string(Severity s);

enum class Classification { Nominal, Alarm };

struct ChannelSpec {
  std::string name;
  std::string unit;
  double nominal_min = 0.0;
  double nominal_max = 0.0;
  Severity severity = Severity::Caution;
  bool always_display = false;
};

/// Parses `channel <name> unit=<u> min=<real> max=<real> severity=<critical|caution> display=<0|1>` lines.
std::vector<ChannelSpec> parse_channel_config(std::string_view text);
std::vector<ChannelSpec> load_channel_config(const std::string& path);

/// Suit consumables and cabin pressure with operator-editable placeholder ranges.
std::vector<ChannelSpec> default_channels();

struct TelemetrySample {
  double t = 0.0;
  std::string channel;
  double value = 0.0;
};

enum class AlertKind { EnterAlarm, ExitAlarm };
std::string_view to_string(AlertKind k);

struct AlertEvent {
  double t = 0.0;
  std::string channel;
  AlertKind kind = AlertKind::EnterAlarm;
  Severity severity = Severity::Caution;
  double value = 0.0;

  friend bool operator==(const AlertEvent&, const AlertEvent&) = default;
};

struct HudState {
  std::map<std::string, double> displayed;   // always_display channels, latest value
  std::vector<std::string> active_warnings;  // channels in alarm, in order of entry
  bool flash_red = false;                    // some CRITICAL channel is in alarm

  friend bool operator==(const HudState&, const HudState&) = default;
};

/// Inclusive range: a value equal to a bound is nominal.
Classification classify(const ChannelSpec& spec, double value);

/// Single-writer fold over a sample stream.
class TelemetryMonitor {
 public:
  explicit TelemetryMonitor(std::vector<ChannelSpec> channels);

  std::vector<AlertEvent> ingest(const TelemetrySample& sample);
  HudState hud_state() const { return hud_; }
  const std::vector<ChannelSpec>& channels() const { return channels_; }

 private:
  struct ChannelState {
    bool seen = false;
    double last_t = 0.0;
    bool in_alarm = false;
  };

  std::vector<ChannelSpec> channels_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<ChannelState> state_;
  HudState hud_;
};

/// `alert t=<s> channel=<name> kind=<ENTER|EXIT> severity=<CRITICAL|CAUTION> value=<real>`
std::string format_alert(const AlertEvent& event);

}  // namespace mref
