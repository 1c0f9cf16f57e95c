#pragma once

// Command implementations behind the `mref` executable. Each returns the
// process exit status and writes human-readable output to the given streams.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "mref/link_sim.hpp"

namespace mref::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kParse = 2, kValidation = 3, kIo = 4 };

/// Upper bound on acceptable transmission time (excluding propagation) for an uplinked set.
inline constexpr double kTransferWindowLimit = 300.0;

/// Input paths that do not exist as given are looked up under $MREF_FIXTURES.
std::filesystem::path resolve_input(const std::filesystem::path& path);

struct CompileOptions {
  std::filesystem::path csv;
  std::filesystem::path catalog;
  std::filesystem::path out;
  std::string set_id;  // defaults to the CSV file stem
  std::string target = "mmsev_rover";
};
int cmd_compile(const CompileOptions& opts, std::ostream& out, std::ostream& err);

struct SendOptions {
  std::filesystem::path mri;
  std::optional<std::string> preset;
  std::optional<double> delay;
  std::optional<double> rate;
};

struct SendSummary {
  LinkConfig link;
  Transmission tx;
  double transmission_s = 0.0;
  double propagation_s = 0.0;
  bool within_window = false;
};

/// Single message on an idle link submitted at t = 0.
SendSummary simulate_send(std::uint64_t payload_bytes, const LinkConfig& link);
int cmd_send(const SendOptions& opts, std::ostream& out, std::ostream& err);

int cmd_run(const std::filesystem::path& scenario, const std::filesystem::path& out_dir, std::ostream& out,
            std::ostream& err);

int cmd_report(const std::filesystem::path& log_dir, double window, std::ostream& out, std::ostream& err);

}  // namespace mref::cli
