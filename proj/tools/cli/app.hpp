#pragma once

#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "cli/io.hpp"
#include "qlidar/version.hpp"

namespace qlidar::cli {

enum ExitCode : int { kOk = 0, kParameterError = 2, kIoError = 3, kNumericalError = 4 };

inline void write_manifest(const std::filesystem::path& dir, const std::string& command, const RunManifest& m,
                           std::ostream& err) {
  try {
    std::filesystem::create_directories(dir);
    write_text(dir / (command + "_manifest.txt"), m.render());
  } catch (const std::exception& e) {
    err << "warning: manifest not written: " << e.what() << '\n';
  }
}

// Parses the command line, runs the selected command, and always writes a
// manifest. Returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Gaussian-state quantum LiDAR analysis: W2, overlap metrics, allocation and fading"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  static const std::map<std::string, std::string> descriptions{
      {"benchmark", "Metric comparison versus transmissivity"},
      {"heatmap", "W2 score over (eta, lambda) and the optimal squeezing fraction"},
      {"parametric", "Optimal squeezing fraction versus eta for several (N_tot, n_th) scenarios"},
      {"fading", "Monte-Carlo Beta-fading ensemble with summary statistics and post-selection"},
      {"metrics", "Single-shot metric report for a pair of states"},
      {"threshold", "Analytic quantum-advantage threshold and small-lambda gradients"},
  };

  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, std::string> config_paths;
  std::map<std::string, bool> plot_flags;
  std::map<std::string, CLI::App*> subs;
  for (const std::string& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
    subs[name] = sub;
    auto& values = raw[name];
    for (const auto& [key, def] : command_defaults(name)) {
      if (key == "plot-script") continue;
      values[key];
      sub->add_option("--" + key, values[key], def.empty() ? std::string("(unset)") : "default " + def);
    }
    sub->add_flag("--plot-script", plot_flags[name], "Also write a matplotlib recipe for the CSV outputs");
    sub->add_option("--config", config_paths[name], "Flat 'key = value' parameter file (flags take precedence)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParameterError;
  }

  std::string command;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) command = name;
  }
  CLI::App* sub = subs.at(command);

  RunManifest manifest;
  manifest.set("command", command);
  manifest.set("version", std::string(kVersion));
  std::filesystem::path out_dir = sub->count("--out") ? raw[command]["out"] : ".";
  const auto start = std::chrono::steady_clock::now();
  int code = kOk;
  std::string error;
  try {
    KeyValues flags;
    for (const auto& [key, value] : raw[command]) {
      if (sub->count("--" + key)) flags[key] = value;
    }
    if (plot_flags[command]) flags["plot-script"] = "true";
    KeyValues config;
    if (sub->count("--config")) config = read_config_file(config_paths[command]);
    const ParamSet params(flags, config, command_defaults(command));
    out_dir = params.text("out");
    manifest.set("seed", params.text("seed"));
    for (const auto& [k, v] : params.resolved()) manifest.set("param." + k, v);
    run_command(command, params, manifest, out);
  } catch (const InvalidParameter& e) {
    code = kParameterError;
    error = e.what();
  } catch (const IoError& e) {
    code = kIoError;
    error = e.what();
  } catch (const NumericalError& e) {
    code = kNumericalError;
    error = e.what();
  } catch (const std::exception& e) {
    code = kNumericalError;
    error = e.what();
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest.set("duration_s", fmt::format("{:.3f}", seconds));
  manifest.set("status", code == kOk ? "ok" : "error");
  if (code != kOk) {
    manifest.set("error", error);
    err << "error: " << error << '\n';
  }
  write_manifest(out_dir, command, manifest, err);
  return code;
}

}  // namespace qlidar::cli
