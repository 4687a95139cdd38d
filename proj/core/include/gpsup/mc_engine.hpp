#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "gpsup/asymptotics.hpp"
#include "gpsup/covmodel.hpp"
#include "gpsup/horizon.hpp"
#include "gpsup/parallel.hpp"

namespace gpsup {

/// Grid step min(a u^{-2/alpha}, step_cap): the simulation grid shrinks with
/// the correlation scale of high exceedances.
struct GridPolicy {
  double a_coef = 0.25;
  double step_cap = 0.05;

  double step(double u, double alpha) const;
  void validate() const;
};

/// Settings shared by the Monte Carlo drivers.
struct McOptions {
  RunOptions run;
  /// Upper limit on grid points per simulated path.
  std::uint64_t memory_budget = std::uint64_t{1} << 22;
  /// Horizon cap; required for D3 horizons.
  double t_cap = std::numeric_limits<double>::infinity();
  /// Largest acceptable P(T > effective cap).
  double truncation_bound = 0.25;
};

inline constexpr std::uint64_t kMinTrials = 1000;

/// Binomial Monte Carlo estimate with a 95% interval: Wald when hits and
/// misses are both at least 30, Wilson otherwise.
struct McEstimate {
  double probability = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t n_trials = 0;
  double ci95_half_width = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double grid_step_used = 0.0;
  double truncated_mass = 0.0;
  std::uint64_t capped_draws = 0;
  std::uint64_t seed = 0;
};

McEstimate make_estimate(std::uint64_t hits, std::uint64_t n_trials);

/// P(sup_{[0,T]} X > u) by direct simulation: per trial, draw T, simulate the
/// path on [0, min(T, cap)] at policy.step(u, alpha) and record a strict
/// exceedance of u. The effective cap is the smallest of options.t_cap, the
/// memory budget span and a CustomTail table end; its tail mass is reported
/// as `truncated_mass`.
McEstimate estimate_sup_tail(const CovarianceModel& model, const HorizonDistribution& horizon,
                             double u, std::uint64_t n_trials, const GridPolicy& policy,
                             const McOptions& options);

struct Lemma43Row {
  double x = 0.0;
  double interval = 0.0;  // x m(u)
  McEstimate non_exceedance;
  double target = 0.0;    // e^{-x}; Phi(u) for the single-point interval x = 0
};

/// P(sup_{[0, x m(u)]} X <= u) for each x, all read off common paths of
/// length max(x) m(u). x must be 0 or lie in [0.25, 4]; u >= 2.5.
std::vector<Lemma43Row> lemma43_check(const CovarianceModel& model, double u,
                                      const std::vector<double>& x_values,
                                      std::uint64_t n_trials, const GridPolicy& policy,
                                      const McOptions& options, double h_alpha);

struct SweepRow {
  double u = 0.0;
  McEstimate mc;
  AsymptoticResult asymptotic;   // closed form
  AsymptoticResult remark_form;  // m(u) form
  double target = 0.0;           // closed form in D1, remark form in D2/D3
  Formula target_formula = Formula::Thm31;
  double ratio = 0.0;            // mc / target
  double p_lower = 0.0;          // mc estimate (capped horizon)
  double p_upper = 0.0;          // mc estimate + truncated mass
};

/// Monte Carlo against the regime's asymptotic along increasing u.
std::vector<SweepRow> regime_sweep(const CovarianceModel& model, const HorizonDistribution& horizon,
                                   const std::vector<double>& u_values, std::uint64_t n_trials,
                                   const GridPolicy& policy, const McOptions& options,
                                   double h_alpha);

}  // namespace gpsup
