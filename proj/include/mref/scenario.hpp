#pragma once

// End-to-end EVA scenarios on one virtual clock: uplinked instruction sets go
// through the link simulator, telemetry through the monitor and recognized
// phrases through the console.
//
// Scenario file, one directive per line, `#` comments:
//   link delay=<s> rate=<Bps>   |   link preset=<lunar|mars|...>
//   catalog <path>
//   channels <path>
//   target <asset_id>           (optional, model target for CSV uplinks)
//   window <s>                  (optional, bandwidth report window, default 1)
//   at <t> voice "<phrase>"
//   at <t> telemetry <channel> <value>
//   at <t> uplink <path>        (.mri wire file, or .csv compiled on load)
// Relative paths resolve against the scenario file's directory.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mref/error.hpp"
#include "mref/link_sim.hpp"
#include "mref/wire.hpp"

namespace mref {

enum class ScenarioErrc { Parse, Validation, Io };
std::string_view to_string(ScenarioErrc code);
using ScenarioError = CodedError<ScenarioErrc>;

enum class EventKind { Telemetry, Voice, Uplink };  // declaration order is the tie-break order

struct ScenarioEvent {
  double t = 0.0;
  EventKind kind = EventKind::Voice;
  std::string phrase;                 // Voice
  std::string channel;                // Telemetry
  double value = 0.0;                 // Telemetry
  std::filesystem::path path;         // Uplink
  std::size_t line = 0;
};

struct ScenarioScript {
  LinkConfig link;
  std::filesystem::path catalog_path;
  std::filesystem::path channels_path;
  std::string target_asset = "mmsev_rover";
  double report_window = 1.0;
  std::vector<ScenarioEvent> events;  // sorted by t
};

ScenarioScript parse_scenario(std::string_view text, const std::filesystem::path& base_dir);
ScenarioScript load_scenario(const std::filesystem::path& path);

struct DirectionStats {
  std::string direction;  // "uplink" or "downlink"
  std::optional<BandwidthStats> stats;  // empty when the direction carried nothing
  double rate = 0.0;
};

struct RunReport {
  std::vector<std::string> delivery_log;
  std::vector<std::string> alert_log;
  std::vector<std::string> effect_log;
  std::vector<std::string> hud_log;
  std::vector<std::pair<std::string, SizeReport>> uplinked_sets;
  std::vector<DirectionStats> bandwidth;
};

/// Runs the scenario and writes deliveries.log, alerts.log, effects.log,
/// hud.log, report.txt and the session folders under `out_dir`.
RunReport run_scenario(const ScenarioScript& script, const std::filesystem::path& out_dir);

/// Bandwidth table lines shared by run reports and `report`.
std::vector<std::string> format_bandwidth(const std::vector<DirectionStats>& rows);

/// Rebuilds per-direction transmissions from a delivery log. The log's
/// `# link direction=<d> delay=<s> rate=<Bps>` comments give the channel; without
/// them each delivery is treated as instantaneous.
std::vector<DirectionStats> bandwidth_from_log(std::string_view delivery_log, double window);

}  // namespace mref
