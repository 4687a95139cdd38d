#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace gpsup {

/// Runs `body(chunk)` for chunk = 0..n_chunks-1 on up to `threads` workers.
/// Chunks are claimed dynamically; callers store per-chunk results and merge
/// them in chunk order, which keeps outputs independent of the worker count.
/// The first exception thrown by any chunk is rethrown after all workers join.
void parallel_chunks(std::size_t n_chunks, unsigned threads,
                     const std::function<void(std::size_t)>& body);

}  // namespace gpsup

namespace gpsup {

/// Seed and worker count for a Monte Carlo run. Results depend on `seed` only.
struct RunOptions {
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Running mean/variance (Welford) with an associative merge (Chan et al.).
class MomentAccumulator {
 public:
  void add(double x) noexcept {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }
  void merge(const MomentAccumulator& other) noexcept;

  std::uint64_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept {
    return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
  }
  double standard_error() const noexcept;

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace gpsup
