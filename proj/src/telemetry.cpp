#include "mref/telemetry.hpp"

#include <algorithm>
#include <cmath>

#include "mref/text.hpp"

namespace mref {

std::string_view to_string(TelemetryErrc code) {
  switch (code) {
    case TelemetryErrc::UnknownChannel: return "UNKNOWN_CHANNEL";
    case TelemetryErrc::TimeRegression: return "TIME_REGRESSION";
    case TelemetryErrc::NonFinite: return "NON_FINITE";
    case TelemetryErrc::ConfigParse: return "CONFIG_PARSE";
    case TelemetryErrc::Io: return "IO";
  }
  return "UNKNOWN";
}

std::string_view to_string(Severity s) { return s == Severity::Critical ? "CRITICAL" : "CAUTION"; }
std::string_view to_string(AlertKind k) { return k == AlertKind::EnterAlarm ? "ENTER" : "EXIT"; }

Classification classify(const ChannelSpec& spec, double value) {
  return value < spec.nominal_min || value > spec.nominal_max ? Classification::Alarm : Classification::Nominal;
}

std::vector<ChannelSpec> default_channels() {
  // Floors on time remaining are placeholders; the operator supplies real limits.
  return {
      {"o2_time_remaining_s", "s", 1800.0, 36000.0, Severity::Critical, true},
      {"battery_time_remaining_s", "s", 1800.0, 36000.0, Severity::Critical, true},
      {"h2o_time_remaining_s", "s", 1800.0, 36000.0, Severity::Critical, true},
      {"env_pressure_kpa", "kPa", 28.0, 31.0, Severity::Caution, false},
  };
}

std::vector<ChannelSpec> parse_channel_config(std::string_view text) {
  std::vector<ChannelSpec> channels;
  const auto lines = text::split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto body = text::trim(lines[n]);
    if (body.empty() || body.front() == '#') continue;
    const std::string where = "line " + std::to_string(n + 1) + ": ";
    const auto fail = [&](const std::string& msg) { throw TelemetryError(TelemetryErrc::ConfigParse, where + msg); };
    const auto tokens = text::tokenize(body);
    if (!tokens || tokens->size() != 7 || (*tokens)[0] != "channel" || (*tokens)[1].empty()) {
      fail("expected `channel <name> unit=<u> min=<real> max=<real> severity=<critical|caution> display=<0|1>`");
    }
    ChannelSpec spec;
    spec.name = (*tokens)[1];
    int seen = 0;
    for (std::size_t i = 2; i < tokens->size(); ++i) {
      const auto kv = text::key_value((*tokens)[i]);
      if (!kv) fail("expected key=value, got " + (*tokens)[i]);
      const auto [key, value] = *kv;
      const auto real = [&]() {
        const auto v = text::parse_double(value);
        if (!v || !std::isfinite(*v)) fail(std::string(key) + " must be a finite number");
        return *v;
      };
      if (key == "unit") {
        spec.unit = std::string(value);
        seen |= 1;
      } else if (key == "min") {
        spec.nominal_min = real();
        seen |= 2;
      } else if (key == "max") {
        spec.nominal_max = real();
        seen |= 4;
      } else if (key == "severity") {
        if (value == "critical") spec.severity = Severity::Critical;
        else if (value == "caution") spec.severity = Severity::Caution;
        else fail("severity must be critical or caution");
        seen |= 8;
      } else if (key == "display") {
        if (value != "0" && value != "1") fail("display must be 0 or 1");
        spec.always_display = value == "1";
        seen |= 16;
      } else {
        fail("unexpected field " + std::string(key));
      }
    }
    if (seen != 31) fail("every field must appear exactly once");
    if (spec.nominal_min > spec.nominal_max) fail("min exceeds max");
    if (std::any_of(channels.begin(), channels.end(), [&](const ChannelSpec& c) { return c.name == spec.name; })) {
      fail("duplicate channel " + spec.name);
    }
    channels.push_back(std::move(spec));
  }
  return channels;
}

std::vector<ChannelSpec> load_channel_config(const std::string& path) {
  std::string content;
  try {
    content = text::read_file(path);
  } catch (const std::exception& e) {
    throw TelemetryError(TelemetryErrc::Io, e.what());
  }
  return parse_channel_config(content);
}

TelemetryMonitor::TelemetryMonitor(std::vector<ChannelSpec> channels)
    : channels_(std::move(channels)), state_(channels_.size()) {
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    if (!(channels_[i].nominal_min <= channels_[i].nominal_max)) {
      throw TelemetryError(TelemetryErrc::ConfigParse, "channel " + channels_[i].name + " has min > max");
    }
    if (!index_.emplace(channels_[i].name, i).second) {
      throw TelemetryError(TelemetryErrc::ConfigParse, "duplicate channel " + channels_[i].name);
    }
  }
}

std::vector<AlertEvent> TelemetryMonitor::ingest(const TelemetrySample& sample) {
  const auto it = index_.find(sample.channel);
  if (it == index_.end()) {
    throw TelemetryError(TelemetryErrc::UnknownChannel, "channel " + sample.channel + " is not configured");
  }
  if (!std::isfinite(sample.value) || !std::isfinite(sample.t)) {
    throw TelemetryError(TelemetryErrc::NonFinite, "sample on " + sample.channel + " is not finite");
  }
  const ChannelSpec& spec = channels_[it->second];
  ChannelState& st = state_[it->second];
  if (st.seen && sample.t < st.last_t) {
    throw TelemetryError(TelemetryErrc::TimeRegression, "sample on " + sample.channel + " at t=" +
                                                            text::fixed6(sample.t) + " precedes t=" +
                                                            text::fixed6(st.last_t));
  }
  st.seen = true;
  st.last_t = sample.t;

  if (spec.always_display) {
    hud_.displayed[spec.name] = sample.value;
  }

  std::vector<AlertEvent> events;
  const bool alarm = classify(spec, sample.value) == Classification::Alarm;
  if (alarm != st.in_alarm) {
    st.in_alarm = alarm;
    events.push_back({sample.t, spec.name, alarm ? AlertKind::EnterAlarm : AlertKind::ExitAlarm, spec.severity,
                      sample.value});
    auto& warnings = hud_.active_warnings;
    if (alarm) {
      warnings.push_back(spec.name);
    } else {
      warnings.erase(std::find(warnings.begin(), warnings.end(), spec.name));
    }
    hud_.flash_red = std::any_of(warnings.begin(), warnings.end(), [&](const std::string& name) {
      return channels_[index_.find(name)->second].severity == Severity::Critical;
    });
  }
  return events;
}

std::string format_alert(const AlertEvent& e) {
  return "alert t=" + text::fixed6(e.t) + " channel=" + e.channel + " kind=" + std::string(to_string(e.kind)) +
         " severity=" + std::string(to_string(e.severity)) + " value=" + text::fixed6(e.value);
}

}  // namespace mref
