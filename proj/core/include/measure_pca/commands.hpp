#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "measure_pca/config.hpp"
#include "measure_pca/experiments.hpp"

namespace measure_pca {

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> data;
  std::filesystem::path out = ".";
};

/// Everything needed to rerun a command: the resolved configuration (every
/// key, defaults included) plus descriptive metadata. Written as
/// manifest.json next to the result files.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::uint64_t seed = 0;
  bool center = true;
  std::map<std::string, std::string> grids;
  std::string timestamp;
};

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

/// Config readers shared by the CLI and the tests. Each consumes its keys
/// from `file`, rejects unknown keys and throws ConfigError on bad values.
/// `resolved` receives every key with its effective value.
SweepConfig read_sweep_config(ConfigFile& file, std::map<std::string, std::string>& resolved);
RmDecayConfig read_rm_decay_config(ConfigFile& file, std::map<std::string, std::string>& resolved);

/// sweep_raw.csv, sweep_summary.csv, manifest.json
void cmd_sweep(const CommandOptions& opts);
/// stability.csv, <EMB>/scores_m{m}_k{k}.csv, manifest.json
void cmd_stability(const CommandOptions& opts);
/// pca_scores.csv, eigenvalues.csv, manifest.json
void cmd_pca(const CommandOptions& opts);
/// rm_decay.csv, rm_slopes.csv, manifest.json
void cmd_oracle_check(const CommandOptions& opts);

/// Dispatches on the command name; throws ConfigError for an unknown name.
void run_command(const std::string& name, const CommandOptions& opts);

}  // namespace measure_pca
