#include "gpsup/pickands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <limits>
#include <sstream>
#include <tuple>

#include "gpsup/asymptotics.hpp"
#include "gpsup/csv.hpp"
#include "gpsup/gauss_sim.hpp"

namespace gpsup {

namespace {

constexpr std::uint64_t kPairsPerChunk = 256;

std::size_t points_within(double s_horizon, double step) {
  return static_cast<std::size_t>(std::floor(s_horizon / step + 1e-9)) + 1;
}

// One (S, stride) cell: the running maximum over fine-grid indices
// 0, stride, 2 stride, ... below `n_fine`.
struct Cell {
  std::size_t stride;
  std::size_t n_fine;  // fine-grid points covered = (n_coarse - 1) * stride + 1
};

// A linear functional of the cell values exp(max); accumulated per path.
using Weights = std::vector<double>;

// Simulates `n_paths` fBm paths on the fine grid and returns the sample mean
// and standard error of every functional. Deterministic in options.seed.
std::vector<MomentAccumulator> run_cells(double alpha, double fine_step, std::size_t n_fine_points,
                                         const std::vector<Cell>& cells,
                                         const std::vector<Weights>& functionals,
                                         std::uint64_t n_paths, const RunOptions& options) {
  const GridSpec grid{fine_step, n_fine_points};
  const FbmSampler sampler(alpha / 2.0, grid);

  std::vector<double> drift(n_fine_points);
  for (std::size_t j = 0; j < n_fine_points; ++j)
    drift[j] = std::pow(fine_step * static_cast<double>(j), alpha);

  const std::uint64_t n_pairs = (n_paths + 1) / 2;
  const std::uint64_t n_chunks = (n_pairs + kPairsPerChunk - 1) / kPairsPerChunk;
  std::vector<std::vector<MomentAccumulator>> partial(
      n_chunks, std::vector<MomentAccumulator>(functionals.size()));

  parallel_chunks(n_chunks, options.threads, [&](std::size_t chunk) {
    SimWorkspace work;
    std::vector<double> a(n_fine_points);
    std::vector<double> b(n_fine_points);
    std::vector<double> cell_values(cells.size());
    auto& acc = partial[chunk];

    auto consume = [&](const std::vector<double>& path) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        double best = -drift[0] + std::numbers::sqrt2 * path[0];
        for (std::size_t j = cells[c].stride; j < cells[c].n_fine; j += cells[c].stride)
          best = std::max(best, std::numbers::sqrt2 * path[j] - drift[j]);
        cell_values[c] = std::exp(best);
      }
      for (std::size_t f = 0; f < functionals.size(); ++f) {
        double v = 0.0;
        for (std::size_t c = 0; c < cells.size(); ++c) v += functionals[f][c] * cell_values[c];
        acc[f].add(v);
      }
    };

    const std::uint64_t first = chunk * kPairsPerChunk;
    const std::uint64_t last = std::min(n_pairs, first + kPairsPerChunk);
    for (std::uint64_t pair = first; pair < last; ++pair) {
      RandomStream stream(options.seed, pair);
      sampler.sample_into(stream, a, b, work);
      consume(a);
      if (2 * pair + 1 < n_paths) consume(b);
    }
  });

  std::vector<MomentAccumulator> total(functionals.size());
  for (const auto& chunk : partial)
    for (std::size_t f = 0; f < functionals.size(); ++f) total[f].merge(chunk[f]);
  return total;
}

void validate_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ConfigError("pickands.alpha", "must lie in (0, 2]");
}

}  // namespace

PickandsEstimate estimate_h_of_s(double alpha, double s_horizon, double grid_step,
                                 std::uint64_t n_paths, const RunOptions& options) {
  validate_alpha(alpha);
  if (!(s_horizon >= 0.0) || !std::isfinite(s_horizon))
    throw ConfigError("pickands.s_horizon", "must be >= 0");
  if (!(grid_step > 0.0 && grid_step <= 0.05))
    throw ConfigError("pickands.step", "must lie in (0, 0.05]");
  if (n_paths < kMinPickandsPaths)
    throw ConfigError("pickands.n_paths", "must be at least " + std::to_string(kMinPickandsPaths));

  PickandsEstimate est{alpha, s_horizon, grid_step, n_paths, 1.0, 0.0, 0.0};
  const std::size_t n = points_within(s_horizon, grid_step);
  if (n > 1) {
    const auto acc = run_cells(alpha, grid_step, n, {Cell{1, n}}, {Weights{1.0}}, n_paths, options);
    est.h_of_s = acc[0].mean();
    est.std_error = acc[0].standard_error();
  }
  est.h_rate = s_horizon > 0.0 ? est.h_of_s / s_horizon : std::numeric_limits<double>::infinity();
  return est;
}

PickandsResult estimate_pickands(double alpha, const ExtrapolationPolicy& policy,
                                 const RunOptions& options) {
  validate_alpha(alpha);
  if (policy.s_ladder.empty()) throw ConfigError("pickands.s_ladder", "must not be empty");
  if (policy.steps.empty()) throw ConfigError("pickands.steps", "must not be empty");
  if (policy.n_paths < kMinPickandsPaths)
    throw ConfigError("pickands.n_paths", "must be at least " + std::to_string(kMinPickandsPaths));
  if (!(policy.tolerance > 0.0)) throw ConfigError("pickands.tolerance", "must be positive");
  for (std::size_t i = 0; i < policy.s_ladder.size(); ++i) {
    if (!(policy.s_ladder[i] >= 1.0))
      throw ConfigError("pickands.s_ladder", "every S must be at least 1");
    if (i > 0 && !(policy.s_ladder[i] > policy.s_ladder[i - 1]))
      throw ConfigError("pickands.s_ladder", "must be strictly increasing");
  }
  for (double step : policy.steps)
    if (!(step > 0.0 && step <= 0.05)) throw ConfigError("pickands.steps", "must lie in (0, 0.05]");

  const double fine = *std::min_element(policy.steps.begin(), policy.steps.end());
  std::vector<std::size_t> strides;
  for (double step : policy.steps) {
    const double ratio = step / fine;
    const double rounded = std::round(ratio);
    if (std::fabs(ratio - rounded) > 1e-9 * rounded)
      throw ConfigError("pickands.steps", "each step must be an integer multiple of the finest");
    strides.push_back(static_cast<std::size_t>(rounded));
  }

  // The two finest distinct steps drive the Richardson correction.
  std::vector<std::size_t> order(policy.steps.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return strides[x] < strides[y]; });
  const std::size_t fine_idx = order[0];
  std::optional<std::size_t> coarse_idx;
  for (std::size_t i : order)
    if (strides[i] > strides[fine_idx]) {
      coarse_idx = i;
      break;
    }

  const std::size_t n_rungs = policy.s_ladder.size();
  const std::size_t n_steps = policy.steps.size();
  std::vector<Cell> cells;
  for (double s : policy.s_ladder)
    for (std::size_t k = 0; k < n_steps; ++k) {
      const std::size_t n_coarse = points_within(s, policy.steps[k]);
      cells.push_back({strides[k], (n_coarse - 1) * strides[k] + 1});
    }
  auto cell_index = [&](std::size_t rung, std::size_t k) { return rung * n_steps + k; };

  // Richardson weights: discrete-grid bias of the supremum decays like step^{alpha/2}.
  double w_fine = 1.0;
  double w_coarse = 0.0;
  if (coarse_idx) {
    const double r = static_cast<double>(strides[*coarse_idx]) / static_cast<double>(strides[fine_idx]);
    const double rp = std::pow(r, alpha / 2.0);
    w_fine = rp / (rp - 1.0);
    w_coarse = -1.0 / (rp - 1.0);
  }

  std::vector<Weights> functionals;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    Weights w(cells.size(), 0.0);
    w[c] = 1.0;
    functionals.push_back(std::move(w));
  }
  const std::size_t extrap_base = functionals.size();
  std::vector<Weights> extrap;
  for (std::size_t rung = 0; rung < n_rungs; ++rung) {
    Weights w(cells.size(), 0.0);
    w[cell_index(rung, fine_idx)] += w_fine;
    if (coarse_idx) w[cell_index(rung, *coarse_idx)] += w_coarse;
    extrap.push_back(w);
    functionals.push_back(std::move(w));
  }
  const std::size_t incr_base = functionals.size();
  for (std::size_t rung = 1; rung < n_rungs; ++rung) {
    const double ds = policy.s_ladder[rung] - policy.s_ladder[rung - 1];
    Weights w(cells.size(), 0.0);
    for (std::size_t c = 0; c < cells.size(); ++c)
      w[c] = (extrap[rung][c] - extrap[rung - 1][c]) / ds;
    functionals.push_back(std::move(w));
  }

  const std::size_t n_fine_points = points_within(policy.s_ladder.back(), fine);
  const auto acc = run_cells(alpha, fine, n_fine_points, cells, functionals, policy.n_paths, options);

  PickandsResult result;
  result.alpha = alpha;
  result.n_paths = policy.n_paths;
  result.seed = options.seed;
  result.richardson_applied = coarse_idx.has_value();
  for (std::size_t rung = 0; rung < n_rungs; ++rung) {
    PickandsRung r;
    r.s_horizon = policy.s_ladder[rung];
    for (std::size_t k = 0; k < n_steps; ++k) {
      const auto& a = acc[cell_index(rung, k)];
      r.by_step.push_back({alpha, r.s_horizon, policy.steps[k], policy.n_paths, a.mean(),
                           a.mean() / r.s_horizon, a.standard_error()});
    }
    r.h_of_s = acc[extrap_base + rung].mean();
    r.h_of_s_se = acc[extrap_base + rung].standard_error();
    r.h_rate = r.h_of_s / r.s_horizon;
    result.ladder.push_back(std::move(r));
  }
  for (std::size_t i = 0; i + 1 < n_rungs; ++i) {
    result.increments.push_back(acc[incr_base + i].mean());
    result.increment_se.push_back(acc[incr_base + i].standard_error());
  }

  result.monotone_trend = true;
  for (std::size_t i = 1; i < n_rungs; ++i)
    if (!(result.ladder[i].h_rate < result.ladder[i - 1].h_rate)) result.monotone_trend = false;

  if (n_rungs == 1) {
    result.single_point_ladder = true;
    result.constant = result.ladder[0].h_rate;
    result.std_error = result.ladder[0].h_of_s_se / result.ladder[0].s_horizon;
    result.converged = true;
    return result;
  }
  result.constant = result.increments.back();
  result.std_error = result.increment_se.back();
  result.converged = true;
  if (result.increments.size() >= 2) {
    const double last = result.increments.back();
    const double prev = result.increments[result.increments.size() - 2];
    result.converged = std::fabs(last - prev) <= policy.tolerance * std::fabs(last);
  }
  if (!result.converged) {
    std::ostringstream msg;
    msg << "Pickands ladder for alpha=" << alpha << " did not settle within tolerance "
        << policy.tolerance << "; increments:";
    for (double v : result.increments) msg << ' ' << v;
    throw PickandsConvergenceError(msg.str(), result);
  }
  return result;
}

PickandsCache PickandsCache::load(const std::string& path) {
  PickandsCache cache;
  std::ifstream in(path);
  if (!in) return cache;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line.rfind("alpha", 0) == 0) continue;
    std::istringstream fields(line);
    Row row;
    char c1, c2, c3, c4, c5, c6;
    if (!(fields >> row.alpha >> c1 >> row.s_horizon >> c2 >> row.step >> c3 >> row.n_paths >> c4 >>
          row.h_rate >> c5 >> row.std_error >> c6 >> row.seed))
      throw ConfigError(path, "malformed Pickands cache row at line " + std::to_string(line_no));
    cache.rows_.push_back(row);
  }
  return cache;
}

void PickandsCache::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError(path, "cannot write Pickands cache");
  CsvWriter csv(out);
  csv.header({"alpha", "S", "step", "n_paths", "h_rate", "std_error", "seed"});
  for (const Row& r : rows_)
    csv.cell(r.alpha).cell(r.s_horizon).cell(r.step).cell(r.n_paths).cell(r.h_rate)
        .cell(r.std_error).cell(r.seed).end_row();
}

void PickandsCache::upsert(const Row& row) {
  auto same = [&](const Row& r) {
    return r.alpha == row.alpha && r.s_horizon == row.s_horizon && r.step == row.step &&
           r.n_paths == row.n_paths && r.seed == row.seed;
  };
  auto it = std::find_if(rows_.begin(), rows_.end(), same);
  if (it != rows_.end())
    *it = row;
  else
    rows_.push_back(row);
  std::sort(rows_.begin(), rows_.end(), [](const Row& a, const Row& b) {
    return std::tie(a.alpha, a.s_horizon, a.step, a.n_paths, a.seed) <
           std::tie(b.alpha, b.s_horizon, b.step, b.n_paths, b.seed);
  });
}

std::optional<PickandsCache::Row> PickandsCache::lookup(double alpha) const {
  std::optional<Row> best;
  for (const Row& r : rows_) {
    if (std::fabs(r.alpha - alpha) > 1e-12) continue;
    if (!best || r.std_error < best->std_error) best = r;
  }
  return best;
}

PickandsCache::Row PickandsCache::from_result(const PickandsResult& result,
                                             const ExtrapolationPolicy& policy) {
  return {result.alpha,
          policy.s_ladder.back(),
          *std::min_element(policy.steps.begin(), policy.steps.end()),
          result.n_paths,
          result.constant,
          result.std_error,
          result.seed};
}

double resolve_h_alpha(double alpha, const PickandsCache* cache) {
  const double closed = pickands_closed_form(alpha);
  if (!std::isnan(closed)) return closed;
  if (cache != nullptr) {
    if (auto row = cache->lookup(alpha)) return row->h_rate;
  }
  std::ostringstream msg;
  msg << "no Pickands constant available for alpha=" << alpha
      << "; run the `pickands` subcommand to populate the cache";
  throw DependencyError("pickands.h_alpha", msg.str());
}

}  // namespace gpsup
