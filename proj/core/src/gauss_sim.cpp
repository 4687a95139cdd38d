#include "gpsup/gauss_sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "gpsup/csv.hpp"
#include "gpsup/errors.hpp"

namespace gpsup {

void GridSpec::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("grid.step", "must be positive");
  if (n_points < 1) throw ConfigError("grid.n_points", "must be at least 1");
}

FftBuffer& SimWorkspace::buffer(std::size_t size) {
  auto it = buffers_.find(size);
  if (it == buffers_.end()) it = buffers_.emplace(size, FftBuffer(size)).first;
  return it->second;
}

std::size_t minimal_circulant_size(std::size_t n_points) noexcept {
  const std::size_t need = n_points > 1 ? 2 * (n_points - 1) : 2;
  return std::bit_ceil(std::max<std::size_t>(need, 2));
}

namespace {

struct Spectrum {
  std::vector<double> eigenvalues;
  double min_eigenvalue;
  double clipped_mass;
};

Spectrum circulant_spectrum(const LagCovariance& cov, std::size_t size) {
  FftBuffer buf(size);
  const std::size_t half = size / 2;
  for (std::size_t j = 0; j <= half; ++j) buf.data()[j] = cov(j);
  for (std::size_t j = half + 1; j < size; ++j) buf.data()[j] = buf.data()[size - j];
  buf.forward();

  Spectrum s;
  s.eigenvalues.resize(size);
  s.min_eigenvalue = std::numeric_limits<double>::infinity();
  double negative = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < size; ++k) {
    const double lambda = buf.data()[k].real();
    s.eigenvalues[k] = lambda;
    s.min_eigenvalue = std::min(s.min_eigenvalue, lambda);
    total += std::fabs(lambda);
    if (lambda < 0.0) negative -= lambda;
  }
  s.clipped_mass = total > 0.0 ? negative / total : 0.0;
  return s;
}

}  // namespace

CirculantEmbedding::CirculantEmbedding(const LagCovariance& cov, std::size_t n_points,
                                       std::string_view label, std::size_t max_size) {
  std::size_t size = minimal_circulant_size(n_points);
  for (;;) {
    Spectrum s = circulant_spectrum(cov, size);
    if (s.clipped_mass <= kMaxClippedMass) {
      record_ = {size, s.min_eigenvalue, s.clipped_mass};
      scale_.resize(size);
      const double inv = 1.0 / static_cast<double>(size);
      for (std::size_t k = 0; k < size; ++k)
        scale_[k] = std::sqrt(std::max(s.eigenvalues[k], 0.0) * inv);
      return;
    }
    if (size >= max_size) {
      std::ostringstream msg;
      msg << "circulant embedding failed for " << label << ": clipped mass " << s.clipped_mass
          << " exceeds " << kMaxClippedMass << " at circulant size " << size
          << " (min eigenvalue " << s.min_eigenvalue << ")";
      throw EmbeddingError(msg.str());
    }
    size *= 2;
  }
}

void CirculantEmbedding::extract(FftBuffer& buf, std::span<double> first,
                                 std::span<double> second) const {
  const auto* y = buf.data();
  for (std::size_t j = 0; j < first.size(); ++j) first[j] = y[j].real();
  for (std::size_t j = 0; j < second.size(); ++j) second[j] = y[j].imag();
}

void CirculantEmbedding::synthesize(std::span<const double> noise, std::span<double> first,
                                    std::span<double> second, SimWorkspace& work) const {
  const std::size_t size = record_.circulant_size;
  if (noise.size() != 2 * size) throw ConfigError("noise", "size must equal noise_size()");
  if (first.size() > capacity() || second.size() > capacity())
    throw ConfigError("n_points", "exceeds embedding capacity");
  FftBuffer& buf = work.buffer(size);
  auto* w = buf.data();
  for (std::size_t k = 0; k < size; ++k)
    w[k] = {scale_[k] * noise[2 * k], scale_[k] * noise[2 * k + 1]};
  buf.forward();
  extract(buf, first, second);
}

void CirculantEmbedding::sample(RandomStream& stream, std::span<double> first,
                                std::span<double> second, SimWorkspace& work) const {
  const std::size_t size = record_.circulant_size;
  if (first.size() > capacity() || second.size() > capacity())
    throw ConfigError("n_points", "exceeds embedding capacity");
  FftBuffer& buf = work.buffer(size);
  auto* w = buf.data();
  for (std::size_t k = 0; k < size; ++k) {
    const double re = stream.normal();
    const double im = stream.normal();
    w[k] = {scale_[k] * re, scale_[k] * im};
  }
  buf.forward();
  extract(buf, first, second);
}

LagCovariance model_lag_covariance(const CovarianceModel& model, double step) {
  return [model, step](std::size_t k) {
    const double t = step * static_cast<double>(k);
    return t <= model.max_lag() ? model.evaluate(t) : 0.0;
  };
}

LagCovariance fgn_lag_covariance(double hurst, double step) {
  const double two_h = 2.0 * hurst;
  const double var = std::pow(step, two_h);
  return [two_h, var](std::size_t k) {
    const double kk = static_cast<double>(k);
    const double below = k == 0 ? 1.0 : std::pow(kk - 1.0, two_h);
    return 0.5 * var * (std::pow(kk + 1.0, two_h) - 2.0 * std::pow(kk, two_h) + below);
  };
}

namespace {

std::string grid_label(const CovarianceModel& model, const GridSpec& grid) {
  std::ostringstream os;
  os << model.describe() << " on grid(step=" << grid.step << ", n_points=" << grid.n_points
     << ")";
  return os.str();
}

double max_of(std::span<const double> v) {
  return v.empty() ? -std::numeric_limits<double>::infinity() : *std::max_element(v.begin(), v.end());
}

PathSample make_path(const GridSpec& grid, std::vector<double> values) {
  const double m = max_of(values);
  return PathSample{grid, std::move(values), m};
}

}  // namespace

EmbeddingRecord plan_embedding(const CovarianceModel& model, const GridSpec& grid) {
  grid.validate();
  return CirculantEmbedding(model_lag_covariance(model, grid.step), grid.n_points,
                            grid_label(model, grid))
      .record();
}

PathSampler::PathSampler(const CovarianceModel& model, const GridSpec& grid)
    : grid_((grid.validate(), grid)),
      embedding_(model_lag_covariance(model, grid.step), grid.n_points, grid_label(model, grid)) {}

PathSample PathSampler::sample(RandomStream& stream) {
  std::vector<double> values(grid_.n_points);
  embedding_.sample(stream, values, {}, work_);
  return make_path(grid_, std::move(values));
}

std::pair<PathSample, PathSample> PathSampler::sample_pair(RandomStream& stream) {
  std::vector<double> a(grid_.n_points);
  std::vector<double> b(grid_.n_points);
  embedding_.sample(stream, a, b, work_);
  return {make_path(grid_, std::move(a)), make_path(grid_, std::move(b))};
}

PathSample sample_path(const CovarianceModel& model, const GridSpec& grid, RandomStream& stream) {
  PathSampler sampler(model, grid);
  return sampler.sample(stream);
}

FbmSampler::FbmSampler(double hurst, const GridSpec& grid) : hurst_(hurst), grid_(grid) {
  grid_.validate();
  if (!(hurst > 0.0 && hurst <= 1.0)) throw ConfigError("hurst", "must lie in (0, 1]");
  if (hurst < 1.0 && grid_.n_points >= 2) {
    std::ostringstream label;
    label << "fGn(hurst=" << hurst << ") on grid(step=" << grid_.step
          << ", n_points=" << grid_.n_points << ")";
    embedding_.emplace(fgn_lag_covariance(hurst, grid_.step), grid_.n_points - 1, label.str());
  }
}

void FbmSampler::sample_into(RandomStream& stream, std::span<double> first,
                             std::span<double> second, SimWorkspace& work) const {
  const std::size_t n = grid_.n_points;
  if (hurst_ == 1.0) {
    const double za = stream.normal();
    const double zb = stream.normal();
    for (std::size_t j = 0; j < first.size(); ++j) first[j] = grid_.step * static_cast<double>(j) * za;
    for (std::size_t j = 0; j < second.size(); ++j)
      second[j] = grid_.step * static_cast<double>(j) * zb;
    return;
  }
  if (!first.empty()) first[0] = 0.0;
  if (!second.empty()) second[0] = 0.0;
  if (n < 2) return;
  // Increments land in positions 1..n-1, then are cumulated in place.
  auto tail = [](std::span<double> s) { return s.empty() ? s : s.subspan(1); };
  embedding_->sample(stream, tail(first), tail(second), work);
  for (std::size_t j = 1; j < first.size(); ++j) first[j] += first[j - 1];
  for (std::size_t j = 1; j < second.size(); ++j) second[j] += second[j - 1];
}

PathSample FbmSampler::sample(RandomStream& stream) {
  std::vector<double> values(grid_.n_points);
  sample_into(stream, values, {}, work_);
  return make_path(grid_, std::move(values));
}

std::pair<PathSample, PathSample> FbmSampler::sample_pair(RandomStream& stream) {
  std::vector<double> a(grid_.n_points);
  std::vector<double> b(grid_.n_points);
  sample_into(stream, a, b, work_);
  return {make_path(grid_, std::move(a)), make_path(grid_, std::move(b))};
}

PathSample sample_fbm(double hurst, const GridSpec& grid, RandomStream& stream) {
  FbmSampler sampler(hurst, grid);
  return sampler.sample(stream);
}

void write_path_csv(const PathSample& path, std::ostream& out) {
  CsvWriter csv(out);
  csv.header({"t", "x"});
  for (std::size_t j = 0; j < path.values.size(); ++j)
    csv.cell(path.grid.step * static_cast<double>(j)).cell(path.values[j]).end_row();
}

}  // namespace gpsup
