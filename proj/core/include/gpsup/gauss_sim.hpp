#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gpsup/covmodel.hpp"
#include "gpsup/fft.hpp"
#include "gpsup/random.hpp"

namespace gpsup {

/// Uniform grid {0, step, ..., (n_points - 1) step}.
struct GridSpec {
  double step = 0.0;
  std::size_t n_points = 0;

  double duration() const noexcept {
    return n_points == 0 ? 0.0 : step * static_cast<double>(n_points - 1);
  }
  /// Throws ConfigError unless step > 0 and n_points >= 1.
  void validate() const;
};

/// A discretized path on `grid`; running_max == max(values).
struct PathSample {
  GridSpec grid;
  std::vector<double> values;
  double running_max = 0.0;
};

struct EmbeddingRecord {
  std::size_t circulant_size = 0;  // power of two >= 2 (n_points - 1)
  double min_eigenvalue = 0.0;
  double clipped_mass = 0.0;       // sum |negative eigenvalues| / sum |eigenvalues|

  bool exact(double tolerance = 0.0) const noexcept { return min_eigenvalue >= -tolerance; }
};

/// Negative eigenvalues are clipped to zero up to this relative mass; beyond it
/// the circulant is enlarged, and past kMaxCirculantSize the embedding fails.
inline constexpr double kMaxClippedMass = 1e-6;
inline constexpr std::size_t kMaxCirculantSize = std::size_t{1} << 26;

/// Lag covariance c(k) of a stationary sequence, k = 0, 1, 2, ...
using LagCovariance = std::function<double(std::size_t)>;

/// Per-thread scratch space for path synthesis.
class SimWorkspace {
 public:
  FftBuffer& buffer(std::size_t size);

 private:
  std::map<std::size_t, FftBuffer> buffers_;
};

/// Circulant embedding of a stationary Gaussian sequence.
///
/// The covariance row is wrapped into a symmetric circulant of size M whose
/// eigenvalues are obtained by FFT. A complex vector of 2M standard normals
/// scaled by sqrt(lambda_k / M) and transformed once yields two independent
/// exact samples (real and imaginary parts) of the first M/2 + 1 values.
class CirculantEmbedding {
 public:
  CirculantEmbedding(const LagCovariance& cov, std::size_t n_points, std::string_view label,
                     std::size_t max_size = kMaxCirculantSize);

  const EmbeddingRecord& record() const noexcept { return record_; }
  std::size_t circulant_size() const noexcept { return record_.circulant_size; }
  /// Longest sequence this embedding can produce.
  std::size_t capacity() const noexcept { return record_.circulant_size / 2 + 1; }
  /// Number of standard normals consumed per call.
  std::size_t noise_size() const noexcept { return 2 * record_.circulant_size; }
  /// sqrt(max(lambda_k, 0) / M), k = 0..M-1.
  std::span<const double> scale() const noexcept { return scale_; }

  /// Linear map from `noise` (noise_size() normals, consumed as interleaved
  /// real/imaginary pairs) to two sequences of length <= capacity().
  void synthesize(std::span<const double> noise, std::span<double> first,
                  std::span<double> second, SimWorkspace& work) const;

  /// Same as synthesize() with the noise drawn in order from `stream`.
  void sample(RandomStream& stream, std::span<double> first, std::span<double> second,
              SimWorkspace& work) const;

 private:
  void extract(FftBuffer& buf, std::span<double> first, std::span<double> second) const;

  EmbeddingRecord record_;
  std::vector<double> scale_;
};

/// Smallest power of two >= max(2, 2 (n_points - 1)).
std::size_t minimal_circulant_size(std::size_t n_points) noexcept;

/// Lag covariance r(k step) of `model`, zero past the end of a Custom table.
LagCovariance model_lag_covariance(const CovarianceModel& model, double step);

/// Lag covariance of fractional Gaussian noise with increments over `step`.
LagCovariance fgn_lag_covariance(double hurst, double step);

/// Embedding diagnostics for `model` on `grid`. Throws EmbeddingError naming
/// model and grid when the clipped mass cannot be brought under kMaxClippedMass.
EmbeddingRecord plan_embedding(const CovarianceModel& model, const GridSpec& grid);

/// Repeated sampling of a stationary process on a fixed grid.
class PathSampler {
 public:
  PathSampler(const CovarianceModel& model, const GridSpec& grid);

  const GridSpec& grid() const noexcept { return grid_; }
  const CirculantEmbedding& embedding() const noexcept { return embedding_; }

  PathSample sample(RandomStream& stream);
  std::pair<PathSample, PathSample> sample_pair(RandomStream& stream);

 private:
  GridSpec grid_;
  CirculantEmbedding embedding_;
  SimWorkspace work_;
};

PathSample sample_path(const CovarianceModel& model, const GridSpec& grid, RandomStream& stream);

/// Standard fractional Brownian motion (Var B(t) = t^{2 hurst}) on a grid,
/// built by cumulating exact fractional Gaussian noise. hurst = 1 is the
/// degenerate line B(t) = t N and needs no embedding.
class FbmSampler {
 public:
  FbmSampler(double hurst, const GridSpec& grid);

  const GridSpec& grid() const noexcept { return grid_; }
  double hurst() const noexcept { return hurst_; }
  /// Empty for hurst = 1 and single-point grids.
  const std::optional<CirculantEmbedding>& embedding() const noexcept { return embedding_; }

  /// Two independent paths written into `first` and `second` (size n_points).
  void sample_into(RandomStream& stream, std::span<double> first, std::span<double> second,
                   SimWorkspace& work) const;

  PathSample sample(RandomStream& stream);
  std::pair<PathSample, PathSample> sample_pair(RandomStream& stream);

 private:
  double hurst_;
  GridSpec grid_;
  std::optional<CirculantEmbedding> embedding_;
  SimWorkspace work_;
};

PathSample sample_fbm(double hurst, const GridSpec& grid, RandomStream& stream);

/// Writes a path as CSV rows (t, x).
void write_path_csv(const PathSample& path, std::ostream& out);

}  // namespace gpsup
