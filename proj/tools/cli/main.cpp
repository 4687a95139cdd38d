#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cli/runner.hpp"
#include "gpsup/errors.hpp"

namespace {

constexpr int kUsageExit = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gpsup: exceedance probabilities of Gaussian processes over random horizons"};
  app.require_subcommand(1);

  gpsup::cli::RunRequest request;
  std::uint64_t seed = 0;
  std::string out;
  const char* help = "";
  for (const auto& name : gpsup::cli::kSubcommands) {
    if (name == "check-model") help = "screen the covariance model against the local-shape, non-degeneracy and decay conditions";
    else if (name == "pickands") help = "estimate the Pickands constant and update the cache";
    else if (name == "asymptotics") help = "tabulate the tail asymptotics over u_values";
    else if (name == "simulate") help = "Monte Carlo exceedance probabilities over u_values";
    else if (name == "lemma43") help = "check P(no exceedance on x m(u)) against exp(-x)";
    else help = "Monte Carlo against the regime asymptotic, with a markdown summary";
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", request.config, "experiment INI file")->required();
    sub->add_option("--seed", seed, "seed (overrides the config)");
    sub->add_option("--threads", request.threads, "worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "output directory (overrides the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageExit;
  }

  for (auto* sub : app.get_subcommands()) {
    request.subcommand = sub->get_name();
    if (sub->count("--seed") > 0) request.seed = seed;
    if (sub->count("--out") > 0) request.out_dir = out;
  }

  try {
    for (const auto& path : gpsup::cli::run(request)) std::cout << path.string() << '\n';
    return 0;
  } catch (const gpsup::ConfigError& e) {
    std::cerr << "gpsup " << request.subcommand << ": invalid configuration: " << e.what() << '\n';
    return e.exit_code();
  } catch (const gpsup::Error& e) {
    std::cerr << "gpsup " << request.subcommand << " (config " << request.config.string()
              << "): " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "gpsup " << request.subcommand << ": unexpected failure: " << e.what() << '\n';
    return 1;
  }
}
