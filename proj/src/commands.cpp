#include "mref/commands.hpp"

#include <cstdlib>

#include "mref/authoring.hpp"
#include "mref/scenario.hpp"
#include "mref/text.hpp"
#include "mref/wire.hpp"

namespace mref::cli {

namespace fs = std::filesystem;

fs::path resolve_input(const fs::path& path) {
  if (fs::exists(path) || path.is_absolute()) {
    return path;
  }
  if (const char* fixtures = std::getenv("MREF_FIXTURES"); fixtures != nullptr && *fixtures != '\0') {
    const fs::path candidate = fs::path(fixtures) / path;
    if (fs::exists(candidate)) {
      return candidate;
    }
  }
  return path;
}

namespace {

std::optional<std::string> read_input(const fs::path& path, std::ostream& err) {
  try {
    return text::read_file(resolve_input(path).string());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return std::nullopt;
  }
}

void print_size_report(const std::string& set_id, const SizeReport& r, std::ostream& out) {
  out << "set " << set_id << "\n"
      << "wire_bytes=" << r.wire_bytes << "\n"
      << "referenced_asset_bytes=" << r.referenced_asset_bytes << "\n"
      << "reduction_ratio=" << text::fixed6(r.reduction_ratio) << "\n";
}

}  // namespace

int cmd_compile(const CompileOptions& opts, std::ostream& out, std::ostream& err) {
  if (opts.csv.empty() || opts.catalog.empty() || opts.out.empty()) {
    err << "usage: mref compile <csv> --catalog <file> --out <file.mri>\n";
    return kUsage;
  }
  if (!AssetRef::is_valid(opts.target)) {
    err << "error: invalid target asset id\n";
    return kUsage;
  }
  const auto csv = read_input(opts.csv, err);
  if (!csv) return kIo;
  const auto catalog_text = read_input(opts.catalog, err);
  if (!catalog_text) return kIo;

  AssetCatalog catalog;
  try {
    catalog = AssetCatalog::parse(*catalog_text);
  } catch (const InstructionError& e) {
    err << "error: catalog: " << e.what() << "\n";
    return kParse;
  }

  const std::string set_id = opts.set_id.empty() ? opts.csv.stem().string() : opts.set_id;
  auto result = compile_document(*csv, set_id, AssetRef(opts.target));
  if (const auto* errors = std::get_if<std::vector<CompileError>>(&result)) {
    for (const auto& e : *errors) err << opts.csv.string() << ":" << format_error(e) << "\n";
    return kParse;
  }
  const auto& set = std::get<InstructionSet>(result);
  const auto report = validate(set, catalog);
  if (!report.ok()) {
    for (const auto& issue : report.errors) {
      err << "validation: ";
      if (issue.step) err << "step " << *issue.step << " ";
      if (issue.cue) err << "cue " << *issue.cue << " ";
      err << to_string(issue.code) << ": " << issue.message << "\n";
    }
    return kValidation;
  }

  WireDocument doc;
  try {
    doc = encode(set);
  } catch (const WireError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
  try {
    text::write_file(opts.out.string(),
                     std::string_view(reinterpret_cast<const char*>(doc.bytes.data()), doc.bytes.size()));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  }
  print_size_report(set.set_id, size_report(set, catalog), out);
  out << "wrote " << opts.out.string() << "\n";
  return kOk;
}

SendSummary simulate_send(std::uint64_t payload_bytes, const LinkConfig& link) {
  Link sim(link);
  sim.submit(Message{1, payload_bytes, MessageKind::InstructionSet}, 0.0);
  const auto delivered = sim.run_until(*sim.next_delivery());
  SendSummary s;
  s.link = link;
  s.tx = delivered.front();
  s.transmission_s = s.tx.t_tx_end - s.tx.t_tx_start;
  s.propagation_s = s.tx.t_delivered - s.tx.t_tx_end;
  s.within_window = s.transmission_s <= kTransferWindowLimit;
  return s;
}

int cmd_send(const SendOptions& opts, std::ostream& out, std::ostream& err) {
  const bool custom = opts.delay.has_value() || opts.rate.has_value();
  if (opts.mri.empty() || (opts.preset.has_value() == custom) || (custom && !(opts.delay && opts.rate))) {
    err << "usage: mref send <file.mri> (--preset lunar|mars|lunar-low|mars-low | --delay <s> --rate <Bps>)\n";
    return kUsage;
  }
  LinkConfig link;
  try {
    link = opts.preset ? LinkConfig::preset(*opts.preset) : LinkConfig{"custom", *opts.delay, *opts.rate};
    link.check();
  } catch (const LinkError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  const auto bytes = read_input(opts.mri, err);
  if (!bytes) return kIo;
  std::string set_id;
  try {
    set_id = decode(std::span(reinterpret_cast<const std::uint8_t*>(bytes->data()), bytes->size())).set_id;
  } catch (const WireError& e) {
    err << "error: " << opts.mri.string() << ": " << e.what() << "\n";
    return kParse;
  }

  const auto s = simulate_send(bytes->size(), link);
  out << "link name=" << link.name << " delay=" << text::fixed6(link.one_way_delay)
      << " rate=" << text::fixed6(link.data_rate) << "\n"
      << "message id=" << s.tx.message.id << " set=" << set_id << " kind=" << to_string(s.tx.message.kind)
      << " bytes=" << s.tx.message.payload_bytes << "\n"
      << "submit t=" << text::fixed6(s.tx.t_submit) << "\n"
      << "tx_start t=" << text::fixed6(s.tx.t_tx_start) << "\n"
      << "tx_end t=" << text::fixed6(s.tx.t_tx_end) << "\n"
      << "transmission=" << text::fixed6(s.transmission_s) << " s\n"
      << "propagation=" << text::fixed6(s.propagation_s) << " s\n"
      << format_delivery(s.tx) << "\n"
      << "window=" << (s.within_window ? "WITHIN" : "OUTSIDE") << " limit=" << text::fixed6(kTransferWindowLimit)
      << " s\n";
  return kOk;
}

int cmd_run(const fs::path& scenario, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  if (scenario.empty() || out_dir.empty()) {
    err << "usage: mref run <scenario> --out <dir>\n";
    return kUsage;
  }
  try {
    const auto script = load_scenario(resolve_input(scenario));
    const auto report = run_scenario(script, out_dir);
    out << "deliveries=" << report.delivery_log.size() << " alerts=" << report.alert_log.size()
        << " effects=" << report.effect_log.size() << "\n";
    for (const auto& [id, size] : report.uplinked_sets) {
      out << "set " << id << " wire_bytes=" << size.wire_bytes << " reduction_ratio=" << text::fixed6(size.reduction_ratio)
          << "\n";
    }
    for (const auto& line : format_bandwidth(report.bandwidth)) out << line << "\n";
    out << "wrote " << out_dir.string() << "\n";
    return kOk;
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ScenarioErrc::Parse: return kParse;
      case ScenarioErrc::Validation: return kValidation;
      case ScenarioErrc::Io: return kIo;
    }
    return kParse;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  }
}

int cmd_report(const fs::path& log_dir, double window, std::ostream& out, std::ostream& err) {
  if (!(window > 0.0)) {
    err << "error: window must be > 0\n";
    return kUsage;
  }
  const auto log = read_input(log_dir / "deliveries.log", err);
  if (!log) return kIo;
  try {
    const auto rows = bandwidth_from_log(*log, window);
    for (const auto& line : format_bandwidth(rows)) out << line << "\n";
    if (!rows[0].stats && !rows[1].stats) out << "NO_TRAFFIC\n";
    return kOk;
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << "\n";
    return kParse;
  }
}

}  // namespace mref::cli
