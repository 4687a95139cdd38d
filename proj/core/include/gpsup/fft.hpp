#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace gpsup {

/// Aligned complex buffer suitable for in-place FFTs of a fixed size.
class FftBuffer {
 public:
  explicit FftBuffer(std::size_t size);
  FftBuffer(FftBuffer&&) noexcept = default;
  FftBuffer& operator=(FftBuffer&&) noexcept = default;

  std::size_t size() const noexcept { return size_; }
  std::complex<double>* data() noexcept { return data_.get(); }
  const std::complex<double>* data() const noexcept { return data_.get(); }
  std::span<std::complex<double>> span() noexcept { return {data_.get(), size_}; }

  /// In-place forward transform, X_k = sum_j x_j exp(-2 pi i j k / n).
  /// Thread-safe: plans are created once per size and shared read-only.
  void forward();

 private:
  struct Deleter {
    void operator()(std::complex<double>* p) const noexcept;
  };
  std::size_t size_;
  std::unique_ptr<std::complex<double>[], Deleter> data_;
};

}  // namespace gpsup
