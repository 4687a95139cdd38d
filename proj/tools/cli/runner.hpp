#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gpsup::cli {

inline const std::vector<std::string> kSubcommands{"check-model", "pickands", "asymptotics",
                                                   "simulate",    "lemma43",  "report"};

struct RunRequest {
  std::string subcommand;
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;  // overrides the config
  unsigned threads = 1;
  std::optional<std::filesystem::path> out_dir;  // overrides the config; default "."
};

/// Runs one subcommand and returns the files it wrote. Library errors
/// propagate unchanged; the caller maps them to exit codes.
std::vector<std::filesystem::path> run(const RunRequest& request);

}  // namespace gpsup::cli
