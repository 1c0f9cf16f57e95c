#include "mref/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "mref/authoring.hpp"
#include "mref/console.hpp"
#include "mref/telemetry.hpp"
#include "mref/text.hpp"

namespace mref {

namespace fs = std::filesystem;

std::string_view to_string(ScenarioErrc code) {
  switch (code) {
    case ScenarioErrc::Parse: return "SCENARIO_PARSE";
    case ScenarioErrc::Validation: return "VALIDATION";
    case ScenarioErrc::Io: return "IO";
  }
  return "UNKNOWN";
}

ScenarioScript parse_scenario(std::string_view text, const fs::path& base_dir) {
  ScenarioScript script;
  bool have_link = false;
  const auto lines = text::split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto body = text::trim(lines[n]);
    if (body.empty() || body.front() == '#') continue;
    const std::string where = "line " + std::to_string(n + 1) + ": ";
    const auto fail = [&](const std::string& msg) { throw ScenarioError(ScenarioErrc::Parse, where + msg); };
    const auto tokens_opt = text::tokenize(body);
    if (!tokens_opt || tokens_opt->empty()) fail("unterminated quote");
    const auto& tok = *tokens_opt;
    const auto real = [&](std::string_view s, const char* what) {
      const auto v = text::parse_double(s);
      if (!v || !std::isfinite(*v)) fail(std::string(what) + " must be a finite number");
      return *v;
    };
    const auto existing = [&](const std::string& p) {
      fs::path path = fs::path(p).is_absolute() ? fs::path(p) : base_dir / p;
      if (!fs::exists(path)) throw ScenarioError(ScenarioErrc::Io, where + "path does not exist: " + path.string());
      return path;
    };

    if (tok[0] == "link") {
      if (have_link) fail("link declared twice");
      if (tok.size() == 2 && text::key_value(tok[1]) && text::key_value(tok[1])->first == "preset") {
        try {
          script.link = LinkConfig::preset(text::key_value(tok[1])->second);
        } catch (const LinkError& e) {
          fail(e.what());
        }
      } else if (tok.size() == 3) {
        std::optional<double> delay, rate;
        for (std::size_t i = 1; i < 3; ++i) {
          const auto kv = text::key_value(tok[i]);
          if (kv && kv->first == "delay") delay = real(kv->second, "delay");
          else if (kv && kv->first == "rate") rate = real(kv->second, "rate");
        }
        if (!delay || !rate) fail("expected `link delay=<s> rate=<Bps>`");
        script.link = LinkConfig{"custom", *delay, *rate};
        try {
          script.link.check();
        } catch (const LinkError& e) {
          fail(e.what());
        }
      } else {
        fail("expected `link delay=<s> rate=<Bps>` or `link preset=<name>`");
      }
      have_link = true;
    } else if (tok[0] == "catalog" && tok.size() == 2) {
      script.catalog_path = existing(tok[1]);
    } else if (tok[0] == "channels" && tok.size() == 2) {
      script.channels_path = existing(tok[1]);
    } else if (tok[0] == "target" && tok.size() == 2) {
      if (!AssetRef::is_valid(tok[1])) fail("invalid target asset id");
      script.target_asset = tok[1];
    } else if (tok[0] == "window" && tok.size() == 2) {
      script.report_window = real(tok[1], "window");
      if (!(script.report_window > 0.0)) fail("window must be > 0");
    } else if (tok[0] == "at" && tok.size() >= 3) {
      ScenarioEvent ev;
      ev.line = n + 1;
      ev.t = real(tok[1], "event time");
      if (ev.t < 0.0) fail("event time must be >= 0");
      if (tok[2] == "voice" && tok.size() == 4) {
        ev.kind = EventKind::Voice;
        ev.phrase = tok[3];
      } else if (tok[2] == "telemetry" && tok.size() == 5) {
        ev.kind = EventKind::Telemetry;
        ev.channel = tok[3];
        ev.value = real(tok[4], "telemetry value");
      } else if (tok[2] == "uplink" && tok.size() == 4) {
        ev.kind = EventKind::Uplink;
        ev.path = existing(tok[3]);
      } else {
        fail("unrecognized event `" + std::string(body) + "`");
      }
      if (!script.events.empty() && ev.t < script.events.back().t) fail("events must be sorted by time");
      script.events.push_back(std::move(ev));
    } else {
      fail("unrecognized directive `" + std::string(body) + "`");
    }
  }
  if (!have_link) throw ScenarioError(ScenarioErrc::Parse, "scenario has no link line");
  if (script.catalog_path.empty()) throw ScenarioError(ScenarioErrc::Parse, "scenario has no catalog line");
  if (script.channels_path.empty()) throw ScenarioError(ScenarioErrc::Parse, "scenario has no channels line");
  return script;
}

ScenarioScript load_scenario(const fs::path& path) {
  std::string content;
  try {
    content = text::read_file(path.string());
  } catch (const std::exception& e) {
    throw ScenarioError(ScenarioErrc::Io, e.what());
  }
  return parse_scenario(content, path.parent_path());
}

std::vector<std::string> format_bandwidth(const std::vector<DirectionStats>& rows) {
  std::vector<std::string> out;
  for (const auto& row : rows) {
    if (!row.stats) {
      out.push_back("direction=" + row.direction + " NO_TRAFFIC");
      continue;
    }
    const auto& s = *row.stats;
    out.push_back("direction=" + row.direction + " window=" + text::fixed6(s.window) +
                  " average_bps=" + text::fixed6(s.average_bps) + " peak_window_bps=" + text::fixed6(s.peak_window_bps) +
                  " total_bytes=" + std::to_string(s.total_bytes));
  }
  return out;
}

namespace {

struct PreparedUplink {
  std::string set_id;
  WireDocument doc;
  SizeReport size;
};

PreparedUplink prepare_uplink(const ScenarioEvent& ev, const ScenarioScript& script, const AssetCatalog& catalog) {
  const std::string where = "line " + std::to_string(ev.line) + " (" + ev.path.string() + "): ";
  std::string content;
  try {
    content = text::read_file(ev.path.string());
  } catch (const std::exception& e) {
    throw ScenarioError(ScenarioErrc::Io, where + e.what());
  }
  InstructionSet set{"x", AssetRef("x"), {}};
  if (ev.path.extension() == ".csv") {
    auto result = compile_document(content, ev.path.stem().string(), AssetRef(script.target_asset));
    if (auto* errors = std::get_if<std::vector<CompileError>>(&result)) {
      throw ScenarioError(ScenarioErrc::Parse, where + format_error(errors->front()));
    }
    set = std::move(std::get<InstructionSet>(result));
  } else {
    try {
      set = decode(std::span(reinterpret_cast<const std::uint8_t*>(content.data()), content.size()));
    } catch (const WireError& e) {
      throw ScenarioError(ScenarioErrc::Parse, where + e.what());
    }
  }
  const auto report = validate(set, catalog);
  if (!report.ok()) {
    const auto& first = report.errors.front();
    throw ScenarioError(ScenarioErrc::Validation,
                        where + std::string(to_string(first.code)) + ": " + first.message);
  }
  try {
    return PreparedUplink{set.set_id, encode(set), size_report(set, catalog)};
  } catch (const WireError& e) {
    throw ScenarioError(ScenarioErrc::Validation, where + e.what());
  }
}

class Executor {
 public:
  explicit Executor(fs::path root) : root_(std::move(root)) {}

  void apply(const Effect& e) {
    std::visit(
        [&](const auto& a) {
          using A = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<A, effect::OpenFolder>) {
            fs::create_directories(root_ / a.path);
          } else if constexpr (std::is_same_v<A, effect::AppendNote>) {
            append(a.path, a.line);
          } else if constexpr (std::is_same_v<A, effect::CapturePhoto>) {
            append(a.path, photo_log_line(a, e.t));
          }
        },
        e.action);
  }

 private:
  void append(const std::string& rel, const std::string& line) {
    const fs::path path = root_ / rel;
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out << line << '\n';
    if (!out) throw ScenarioError(ScenarioErrc::Io, "cannot append to " + path.string());
  }

  fs::path root_;
};

std::string hud_line(double t, const HudState& hud) {
  std::string warnings;
  for (const auto& w : hud.active_warnings) {
    if (!warnings.empty()) warnings += ",";
    warnings += w;
  }
  return "hud t=" + text::fixed6(t) + " flash_red=" + (hud.flash_red ? "1" : "0") +
         " warnings=" + (warnings.empty() ? "-" : warnings);
}

void write_lines(const fs::path& path, const std::vector<std::string>& header, const std::vector<std::string>& lines) {
  std::string content;
  for (const auto& l : header) content += l + "\n";
  for (const auto& l : lines) content += l + "\n";
  try {
    text::write_file(path.string(), content);
  } catch (const std::exception& e) {
    throw ScenarioError(ScenarioErrc::Io, e.what());
  }
}

std::string link_comment(const std::string& direction, const LinkConfig& link) {
  return "# link direction=" + direction + " delay=" + text::fixed6(link.one_way_delay) +
         " rate=" + text::fixed6(link.data_rate);
}

}  // namespace

RunReport run_scenario(const ScenarioScript& script, const fs::path& out_dir) {
  AssetCatalog catalog;
  std::vector<ChannelSpec> channels;
  try {
    catalog = AssetCatalog::load(script.catalog_path.string());
    channels = load_channel_config(script.channels_path.string());
  } catch (const InstructionError& e) {
    throw ScenarioError(e.code() == InstructionErrc::Io ? ScenarioErrc::Io : ScenarioErrc::Parse, e.what());
  } catch (const TelemetryError& e) {
    throw ScenarioError(e.code() == TelemetryErrc::Io ? ScenarioErrc::Io : ScenarioErrc::Parse, e.what());
  }

  RunReport report;
  std::map<std::size_t, PreparedUplink> uplinks;  // by event index
  for (std::size_t i = 0; i < script.events.size(); ++i) {
    if (script.events[i].kind == EventKind::Uplink) {
      auto prepared = prepare_uplink(script.events[i], script, catalog);
      report.uplinked_sets.emplace_back(prepared.set_id, prepared.size);
      uplinks.emplace(i, std::move(prepared));
    }
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ScenarioError(ScenarioErrc::Io, "cannot create " + out_dir.string() + ": " + ec.message());
  fs::remove_all(out_dir / "session", ec);

  TelemetryMonitor monitor(channels);
  Console console;
  Executor executor(out_dir);
  LinkConfig down_config = script.link;
  down_config.name = script.link.name + "-down";
  Link up(script.link);
  Link down(down_config);
  std::map<std::uint64_t, const PreparedUplink*> in_flight;
  std::vector<Transmission> up_done, down_done;
  std::uint64_t next_id = 1;
  HudState last_hud;

  const auto record_effects = [&](const std::vector<Effect>& effects) {
    for (const auto& e : effects) {
      report.effect_log.push_back(format_effect(e));
      executor.apply(e);
      if (const auto* send = std::get_if<effect::SendDownlink>(&e.action)) {
        down.submit(Message{next_id++, send->payload_bytes, send->kind}, e.t);
      }
    }
  };

  const double end_time = script.events.empty() ? 0.0 : script.events.back().t;
  std::size_t next_event = 0;
  while (true) {
    std::optional<double> when;
    const auto consider = [&](std::optional<double> t) {
      if (t && (!when || *t < *when)) when = t;
    };
    if (next_event < script.events.size()) consider(script.events[next_event].t);
    consider(up.next_delivery());
    consider(down.next_delivery());
    if (const auto photo = console.next_photo(); photo && *photo <= end_time) consider(photo);
    if (!when) break;
    const double now = *when;

    std::size_t batch_end = next_event;
    while (batch_end < script.events.size() && script.events[batch_end].t == now) ++batch_end;
    for (EventKind kind : {EventKind::Telemetry, EventKind::Voice, EventKind::Uplink}) {
      for (std::size_t i = next_event; i < batch_end; ++i) {
        const auto& ev = script.events[i];
        if (ev.kind != kind) continue;
        if (kind == EventKind::Telemetry) {
          std::vector<AlertEvent> alerts;
          try {
            alerts = monitor.ingest(TelemetrySample{now, ev.channel, ev.value});
          } catch (const TelemetryError& e) {
            throw ScenarioError(ScenarioErrc::Parse, "line " + std::to_string(ev.line) + ": " + e.what());
          }
          for (const auto& a : alerts) report.alert_log.push_back(format_alert(a));
          const HudState hud = monitor.hud_state();
          if (hud.flash_red != last_hud.flash_red || hud.active_warnings != last_hud.active_warnings) {
            report.hud_log.push_back(hud_line(now, hud));
          }
          last_hud = hud;
        } else if (kind == EventKind::Voice) {
          if (const auto token = PhraseToken::make(ev.phrase, now)) {
            record_effects(console.handle(*token));
          }
        } else {
          const PreparedUplink& prepared = uplinks.at(i);
          const auto id = up.submit(Message{next_id++, prepared.doc.bytes.size(), MessageKind::InstructionSet}, now);
          in_flight.emplace(id, &prepared);
        }
      }
    }
    next_event = batch_end;

    auto delivered = up.run_until(now);
    auto delivered_down = down.run_until(now);
    std::vector<Transmission> merged;
    merged.insert(merged.end(), delivered.begin(), delivered.end());
    merged.insert(merged.end(), delivered_down.begin(), delivered_down.end());
    std::sort(merged.begin(), merged.end(), [](const Transmission& a, const Transmission& b) {
      return a.t_delivered != b.t_delivered ? a.t_delivered < b.t_delivered : a.message.id < b.message.id;
    });
    for (const auto& tx : merged) {
      report.delivery_log.push_back(format_delivery(tx));
      if (is_uplink(tx.message.kind)) {
        up_done.push_back(tx);
        const auto* prepared = in_flight.at(tx.message.id);
        record_effects(console.load(decode(prepared->doc), tx.t_delivered));
        in_flight.erase(tx.message.id);
      } else {
        down_done.push_back(tx);
      }
    }

    if (now <= end_time) {
      record_effects(console.tick(now));
    }
  }

  for (const auto& [name, done, link] :
       {std::tuple{"uplink", &up_done, &up}, std::tuple{"downlink", &down_done, &down}}) {
    DirectionStats row{name, std::nullopt, link->config().data_rate};
    if (!done->empty()) row.stats = bandwidth_stats(*done, script.report_window);
    report.bandwidth.push_back(row);
  }

  write_lines(out_dir / "deliveries.log",
              {link_comment("uplink", up.config()), link_comment("downlink", down.config())}, report.delivery_log);
  write_lines(out_dir / "alerts.log", {}, report.alert_log);
  write_lines(out_dir / "effects.log", {}, report.effect_log);
  write_lines(out_dir / "hud.log", {}, report.hud_log);
  std::vector<std::string> summary;
  for (const auto& [id, size] : report.uplinked_sets) {
    summary.push_back("set " + id + " wire_bytes=" + std::to_string(size.wire_bytes) +
                      " referenced_asset_bytes=" + std::to_string(size.referenced_asset_bytes) +
                      " reduction_ratio=" + text::fixed6(size.reduction_ratio));
  }
  for (auto& line : format_bandwidth(report.bandwidth)) summary.push_back(std::move(line));
  write_lines(out_dir / "report.txt", {}, summary);
  return report;
}

std::vector<DirectionStats> bandwidth_from_log(std::string_view delivery_log, double window) {
  struct Channel {
    std::optional<LinkConfig> link;
    std::vector<Transmission> txs;
  };
  std::map<std::string, Channel> channels{{"uplink", {}}, {"downlink", {}}};
  const auto lines = text::split_lines(delivery_log);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto body = text::trim(lines[n]);
    if (body.empty()) continue;
    const std::string where = "line " + std::to_string(n + 1) + ": ";
    const auto tokens = text::tokenize(body);
    if (!tokens) throw ScenarioError(ScenarioErrc::Parse, where + "unterminated quote");
    std::map<std::string, std::string, std::less<>> fields;
    for (const auto& tok : *tokens) {
      if (const auto kv = text::key_value(tok)) fields.emplace(std::string(kv->first), std::string(kv->second));
    }
    const auto get = [&](const char* key) -> const std::string& {
      const auto it = fields.find(key);
      if (it == fields.end()) throw ScenarioError(ScenarioErrc::Parse, where + "missing " + key);
      return it->second;
    };
    const auto real = [&](const char* key) {
      const auto v = text::parse_double(get(key));
      if (!v || !std::isfinite(*v)) throw ScenarioError(ScenarioErrc::Parse, where + key + " is not a number");
      return *v;
    };
    if (body.front() == '#') {
      if (tokens->size() >= 2 && (*tokens)[1] == "link") {
        const std::string& dir = get("direction");
        if (!channels.count(dir)) throw ScenarioError(ScenarioErrc::Parse, where + "unknown direction " + dir);
        LinkConfig link{dir, real("delay"), real("rate")};
        try {
          link.check();
        } catch (const LinkError& e) {
          throw ScenarioError(ScenarioErrc::Parse, where + e.what());
        }
        channels[dir].link = link;
      }
      continue;
    }
    if ((*tokens)[0] != "deliver") throw ScenarioError(ScenarioErrc::Parse, where + "expected a deliver line");
    const auto kind = parse_message_kind(get("kind"));
    const auto id = text::parse_u64(get("id"));
    const auto bytes = text::parse_u64(get("bytes"));
    if (!kind || !id || !bytes) throw ScenarioError(ScenarioErrc::Parse, where + "malformed deliver line");
    Transmission tx;
    tx.message = Message{*id, *bytes, *kind};
    tx.t_delivered = real("t");
    auto& ch = channels[is_uplink(*kind) ? "uplink" : "downlink"];
    if (ch.link) {
      // Rebuild the serial schedule; clamp so rounded log times never overlap.
      const double duration = static_cast<double>(*bytes) / ch.link->data_rate;
      const double prev_end = ch.txs.empty() ? -INFINITY : ch.txs.back().t_tx_end;
      tx.t_tx_start = std::max(prev_end, tx.t_delivered - ch.link->one_way_delay - duration);
      tx.t_tx_end = tx.t_tx_start + duration;
      tx.t_delivered = tx.t_tx_end + ch.link->one_way_delay;
    } else {
      tx.t_tx_start = tx.t_tx_end = tx.t_delivered;
    }
    tx.t_submit = tx.t_tx_start;
    ch.txs.push_back(tx);
  }
  std::vector<DirectionStats> rows;
  for (const char* dir : {"uplink", "downlink"}) {
    const auto& ch = channels[dir];
    DirectionStats row{dir, std::nullopt, ch.link ? ch.link->data_rate : 0.0};
    if (!ch.txs.empty()) row.stats = bandwidth_stats(ch.txs, window);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mref
