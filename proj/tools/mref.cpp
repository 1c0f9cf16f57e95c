#include <iostream>

#include "CLI11.hpp"
#include "mref/commands.hpp"

int main(int argc, char** argv) {
  using namespace mref::cli;

  CLI::App app{"Model-referential instruction uplink toolkit"};
  app.require_subcommand(1);

  CompileOptions compile;
  auto* compile_cmd = app.add_subcommand("compile", "Compile an instruction CSV into a .mri wire file");
  compile_cmd->add_option("csv", compile.csv, "Instruction CSV")->required();
  compile_cmd->add_option("--catalog", compile.catalog, "Asset catalog file")->required();
  compile_cmd->add_option("-o,--out", compile.out, "Output .mri path")->required();
  compile_cmd->add_option("--set-id", compile.set_id, "Instruction set id (default: CSV file stem)");
  compile_cmd->add_option("--target", compile.target, "Model target asset id")->capture_default_str();

  SendOptions send;
  auto* send_cmd = app.add_subcommand("send", "Simulate uplinking a .mri file");
  send_cmd->add_option("mri", send.mri, "Wire file")->required();
  auto* preset = send_cmd->add_option("--preset", send.preset, "lunar, mars, lunar-low or mars-low");
  auto* delay = send_cmd->add_option("--delay", send.delay, "One-way propagation delay, seconds");
  auto* rate = send_cmd->add_option("--rate", send.rate, "Data rate, bytes per second");
  preset->excludes(delay)->excludes(rate);
  delay->needs(rate);
  rate->needs(delay);

  std::filesystem::path scenario, out_dir;
  auto* run_cmd = app.add_subcommand("run", "Run an EVA scenario on the virtual clock");
  run_cmd->add_option("scenario", scenario, "Scenario file")->required();
  run_cmd->add_option("-o,--out", out_dir, "Output directory")->required();

  std::filesystem::path log_dir;
  double window = 1.0;
  auto* report_cmd = app.add_subcommand("report", "Bandwidth statistics from a run's delivery log");
  report_cmd->add_option("logdir", log_dir, "Directory written by `run`")->required();
  report_cmd->add_option("--window", window, "Window length, seconds")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (*compile_cmd) return cmd_compile(compile, std::cout, std::cerr);
  if (*send_cmd) return cmd_send(send, std::cout, std::cerr);
  if (*run_cmd) return cmd_run(scenario, out_dir, std::cout, std::cerr);
  if (*report_cmd) return cmd_report(log_dir, window, std::cout, std::cerr);
  return kUsage;
}
