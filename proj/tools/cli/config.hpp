#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gpsup/covmodel.hpp"
#include "gpsup/horizon.hpp"
#include "gpsup/mc_engine.hpp"
#include "gpsup/pickands.hpp"

namespace gpsup::cli {

/// A parsed and validated experiment file. Relative table and cache paths
/// are resolved against the directory of the config file.
struct ExperimentConfig {
  std::filesystem::path source;

  CovarianceModel model = CovarianceModel::stable_exp(1.0, 1.0);
  /// Absent when the file has no [horizon] section (check-model, pickands, lemma43).
  std::optional<HorizonDistribution> horizon;
  double t_cap = std::numeric_limits<double>::infinity();

  std::optional<std::uint64_t> seed;
  std::vector<double> u_values;
  bool u_values_set = false;
  std::uint64_t n_trials = 100000;
  std::vector<double> x_values{0.5, 1.0, 2.0};
  std::uint64_t memory_budget = std::uint64_t{1} << 22;
  double truncation_bound = 0.25;
  std::optional<std::filesystem::path> out_dir;

  GridPolicy grid;
  ExtrapolationPolicy pickands;
  std::filesystem::path pickands_cache;

  double check_t_max = 100.0;
  int check_n_probe = 50;

  /// Sorted `section.key=value` lines of every effective setting (defaults
  /// included, numbers in shortest round-trip form, table files by content
  /// digest). Seed, worker count and output directory are not part of it.
  std::string canonical;
};

/// Reads an INI experiment file. Unknown sections or keys, malformed values
/// and out-of-range parameters raise ConfigError naming `section.key`.
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace gpsup::cli
