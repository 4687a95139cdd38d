#include "gpsup/mc_engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "gpsup/errors.hpp"
#include "gpsup/gauss_sim.hpp"

namespace gpsup {

namespace {

constexpr std::uint64_t kPairsPerChunk = 64;

std::size_t points_for(double span, double step) {
  return static_cast<std::size_t>(std::floor(span / step + 1e-9)) + 1;
}

// Embeddings keyed by circulant size, built on first use. Content depends
// only on (model, step, size), so sharing across workers is unobservable.
class EmbeddingCache {
 public:
  EmbeddingCache(const CovarianceModel& model, double step) : model_(model), step_(step) {}

  std::shared_ptr<const CirculantEmbedding> for_points(std::size_t n_points) {
    const std::size_t size = minimal_circulant_size(n_points);
    std::lock_guard lock(mutex_);
    auto it = cache_.find(size);
    if (it != cache_.end()) return it->second;
    std::ostringstream label;
    label << model_.describe() << " on grid(step=" << step_ << ", n_points=" << n_points << ")";
    auto emb = std::make_shared<const CirculantEmbedding>(model_lag_covariance(model_, step_),
                                                          size / 2 + 1, label.str());
    cache_.emplace(size, emb);
    return emb;
  }

 private:
  CovarianceModel model_;
  double step_;
  std::mutex mutex_;
  std::map<std::size_t, std::shared_ptr<const CirculantEmbedding>> cache_;
};

double max_of(const std::vector<double>& v, std::size_t n) {
  return *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n));
}

void require_trials(std::uint64_t n_trials) {
  if (n_trials < kMinTrials)
    throw ConfigError("experiment.n_trials", "must be at least " + std::to_string(kMinTrials));
}

}  // namespace

double GridPolicy::step(double u, double alpha) const {
  return std::min(a_coef * std::pow(std::fabs(u), -2.0 / alpha), step_cap);
}

void GridPolicy::validate() const {
  if (!(a_coef > 0.0) || !std::isfinite(a_coef)) throw ConfigError("grid.a_coef", "must be positive");
  if (!(step_cap > 0.0) || !std::isfinite(step_cap))
    throw ConfigError("grid.step_cap", "must be positive");
}

McEstimate make_estimate(std::uint64_t hits, std::uint64_t n_trials) {
  McEstimate e;
  e.hits = hits;
  e.n_trials = n_trials;
  if (n_trials == 0) return e;
  const double n = static_cast<double>(n_trials);
  const double p = static_cast<double>(hits) / n;
  e.probability = p;
  constexpr double z = 1.96;
  if (hits >= 30 && n_trials - hits >= 30) {
    e.ci95_half_width = z * std::sqrt(p * (1.0 - p) / n);
    e.ci_low = std::max(0.0, p - e.ci95_half_width);
    e.ci_high = std::min(1.0, p + e.ci95_half_width);
  } else {
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    e.ci95_half_width = half;
    e.ci_low = std::max(0.0, center - half);
    e.ci_high = std::min(1.0, center + half);
  }
  return e;
}

McEstimate estimate_sup_tail(const CovarianceModel& model, const HorizonDistribution& horizon,
                             double u, std::uint64_t n_trials, const GridPolicy& policy,
                             const McOptions& options) {
  policy.validate();
  require_trials(n_trials);
  if (!std::isfinite(u)) throw ConfigError("experiment.u_values", "must be finite");
  if (options.memory_budget < 2) throw ConfigError("experiment.memory_budget", "must be >= 2");
  if (horizon.regime() == Regime::D3 && !std::isfinite(options.t_cap))
    throw ConfigError("horizon.t_cap", "a finite horizon cap is required for D3 horizons");

  const double step = policy.step(u, model.alpha());
  const double budget_span = static_cast<double>(options.memory_budget - 1) * step;
  const double cap = std::min({options.t_cap, budget_span, horizon.table_end()});
  const double truncated = std::isfinite(cap) ? horizon.tail(cap) : 0.0;
  if (truncated > options.truncation_bound) {
    std::ostringstream msg;
    msg << "P(T > " << cap << ") = " << truncated << " exceeds the truncation bound "
        << options.truncation_bound << " at u=" << u;
    if (budget_span <= std::min(options.t_cap, horizon.table_end()))
      throw BudgetError(msg.str() + " (memory budget of " + std::to_string(options.memory_budget) +
                        " points binds)");
    throw ConfigError("horizon.t_cap", msg.str());
  }

  EmbeddingCache cache(model, step);
  const std::uint64_t n_pairs = (n_trials + 1) / 2;
  const std::uint64_t n_chunks = (n_pairs + kPairsPerChunk - 1) / kPairsPerChunk;
  struct Tally {
    std::uint64_t hits = 0;
    std::uint64_t capped = 0;
  };
  std::vector<Tally> tallies(n_chunks);

  parallel_chunks(n_chunks, options.run.threads, [&](std::size_t chunk) {
    SimWorkspace work;
    std::vector<double> a;
    std::vector<double> b;
    Tally& tally = tallies[chunk];
    const std::uint64_t first = chunk * kPairsPerChunk;
    const std::uint64_t last = std::min(n_pairs, first + kPairsPerChunk);
    for (std::uint64_t pair = first; pair < last; ++pair) {
      RandomStream stream(options.run.seed, pair);
      const bool has_second = 2 * pair + 1 < n_trials;
      const HorizonDraw da = horizon.sample(stream, cap);
      const HorizonDraw db = has_second ? horizon.sample(stream, cap) : HorizonDraw{};
      const std::size_t na = points_for(da.value, step);
      const std::size_t nb = has_second ? points_for(db.value, step) : 0;
      a.resize(na);
      b.resize(nb);
      const auto emb = cache.for_points(std::max(na, nb));
      emb->sample(stream, a, b, work);
      tally.hits += max_of(a, na) > u;
      tally.capped += da.capped;
      if (has_second) {
        tally.hits += max_of(b, nb) > u;
        tally.capped += db.capped;
      }
    }
  });

  Tally total;
  for (const Tally& t : tallies) {
    total.hits += t.hits;
    total.capped += t.capped;
  }
  McEstimate e = make_estimate(total.hits, n_trials);
  e.grid_step_used = step;
  e.truncated_mass = truncated;
  e.capped_draws = total.capped;
  e.seed = options.run.seed;
  return e;
}

std::vector<Lemma43Row> lemma43_check(const CovarianceModel& model, double u,
                                      const std::vector<double>& x_values,
                                      std::uint64_t n_trials, const GridPolicy& policy,
                                      const McOptions& options, double h_alpha) {
  policy.validate();
  require_trials(n_trials);
  if (!(u >= 2.5)) throw ConfigError("experiment.u_values", "lemma43 needs u >= 2.5");
  if (x_values.empty()) throw ConfigError("experiment.x_values", "must not be empty");
  for (double x : x_values)
    if (!(x == 0.0 || (x >= 0.25 && x <= 4.0)))
      throw ConfigError("experiment.x_values", "each x must be 0 or lie in [0.25, 4]");

  const double m = m_scale(u, model, h_alpha);
  const double step = policy.step(u, model.alpha());
  std::vector<std::size_t> n_points;
  for (double x : x_values) {
    const std::size_t n = points_for(x * m, step);
    if (n > options.memory_budget) {
      std::ostringstream msg;
      msg << "interval x m(u) = " << x * m << " for (x=" << x << ", u=" << u << ") needs " << n
          << " grid points at step " << step << ", above the memory budget of "
          << options.memory_budget;
      throw BudgetError(msg.str());
    }
    n_points.push_back(n);
  }
  const std::size_t n_max = *std::max_element(n_points.begin(), n_points.end());
  std::ostringstream label;
  label << model.describe() << " on grid(step=" << step << ", n_points=" << n_max << ")";
  const CirculantEmbedding emb(model_lag_covariance(model, step), n_max, label.str());

  const std::uint64_t n_pairs = (n_trials + 1) / 2;
  const std::uint64_t n_chunks = (n_pairs + kPairsPerChunk - 1) / kPairsPerChunk;
  std::vector<std::vector<std::uint64_t>> below(n_chunks,
                                                std::vector<std::uint64_t>(x_values.size()));

  parallel_chunks(n_chunks, options.run.threads, [&](std::size_t chunk) {
    SimWorkspace work;
    std::vector<double> a(n_max);
    std::vector<double> b(n_max);
    auto& counts = below[chunk];
    auto tally = [&](const std::vector<double>& path) {
      // Running maximum checked at each interval end.
      for (std::size_t i = 0; i < x_values.size(); ++i)
        counts[i] += max_of(path, n_points[i]) <= u;
    };
    const std::uint64_t first = chunk * kPairsPerChunk;
    const std::uint64_t last = std::min(n_pairs, first + kPairsPerChunk);
    for (std::uint64_t pair = first; pair < last; ++pair) {
      RandomStream stream(options.run.seed, pair);
      emb.sample(stream, a, b, work);
      tally(a);
      if (2 * pair + 1 < n_trials) tally(b);
    }
  });

  std::vector<Lemma43Row> rows;
  for (std::size_t i = 0; i < x_values.size(); ++i) {
    std::uint64_t count = 0;
    for (const auto& c : below) count += c[i];
    Lemma43Row row;
    row.x = x_values[i];
    row.interval = x_values[i] * m;
    row.non_exceedance = make_estimate(count, n_trials);
    row.non_exceedance.grid_step_used = step;
    row.non_exceedance.seed = options.run.seed;
    row.target = x_values[i] == 0.0 ? normal_cdf(u) : std::exp(-x_values[i]);
    rows.push_back(row);
  }
  return rows;
}

std::vector<SweepRow> regime_sweep(const CovarianceModel& model, const HorizonDistribution& horizon,
                                   const std::vector<double>& u_values, std::uint64_t n_trials,
                                   const GridPolicy& policy, const McOptions& options,
                                   double h_alpha) {
  if (u_values.empty()) throw ConfigError("experiment.u_values", "must not be empty");
  for (std::size_t i = 1; i < u_values.size(); ++i)
    if (!(u_values[i] > u_values[i - 1]))
      throw ConfigError("experiment.u_values", "must be strictly increasing");

  std::vector<SweepRow> rows;
  for (double u : u_values) {
    SweepRow row;
    row.u = u;
    row.asymptotic = dispatch(u, model, horizon, h_alpha);
    row.remark_form = dispatch_remark_form(u, model, horizon, h_alpha);
    row.mc = estimate_sup_tail(model, horizon, u, n_trials, policy, options);
    const bool d1 = horizon.regime() == Regime::D1;
    row.target = d1 ? row.asymptotic.value : row.remark_form.value;
    row.target_formula = d1 ? row.asymptotic.formula : row.remark_form.formula;
    row.ratio = row.mc.probability / row.target;
    row.p_lower = row.mc.probability;
    row.p_upper = std::min(1.0, row.mc.probability + row.mc.truncated_mass);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gpsup
