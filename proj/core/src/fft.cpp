#include "gpsup/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <new>

namespace gpsup {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
// FFTW_ESTIMATE keeps the chosen algorithm (and therefore rounding) fixed from
// run to run, which the byte-reproducibility of outputs relies on.
fftw_plan plan_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, fftw_plan> plans;
  std::lock_guard lock(mutex);
  auto it = plans.find(n);
  if (it != plans.end()) return it->second;
  auto* scratch = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (scratch == nullptr) throw std::bad_alloc{};
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), scratch, scratch, FFTW_FORWARD,
                                    FFTW_ESTIMATE);
  fftw_free(scratch);
  plans.emplace(n, plan);
  return plan;
}

}  // namespace

void FftBuffer::Deleter::operator()(std::complex<double>* p) const noexcept { fftw_free(p); }

FftBuffer::FftBuffer(std::size_t size) : size_(size) {
  auto* raw = static_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * size));
  if (raw == nullptr) throw std::bad_alloc{};
  data_.reset(raw);
}

void FftBuffer::forward() {
  auto* p = reinterpret_cast<fftw_complex*>(data_.get());
  fftw_execute_dft(plan_for(size_), p, p);
}

}  // namespace gpsup
