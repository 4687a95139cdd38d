#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace gpsup {

/// Quantile of the standard normal distribution (Wichura, AS241).
/// Relative accuracy about 1e-16 on (0, 1).
double normal_quantile(double p);

/// Independent pseudo-random stream identified by (master seed, stream index).
///
/// Every unit of parallel work (a trial, a pair of paths) owns one stream, so
/// results never depend on the number of worker threads or on scheduling.
/// Gaussian variates are produced by inverse transform of the uniform stream.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() noexcept { return normal_quantile(uniform()); }

  void fill_normal(std::span<double> out) noexcept;

 private:
  std::mt19937_64 engine_;
};

}  // namespace gpsup
