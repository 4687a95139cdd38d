#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpsup/errors.hpp"
#include "gpsup/parallel.hpp"

namespace gpsup {

/// Monte Carlo estimate of H_alpha(S) = E exp(sup_{[0,S]} sqrt(2) B(t) - t^alpha)
/// on a grid, with B fractional Brownian motion of Hurst index alpha / 2.
struct PickandsEstimate {
  double alpha = 0.0;
  double s_horizon = 0.0;
  double grid_step = 0.0;
  std::uint64_t n_paths = 0;
  double h_of_s = 0.0;
  double h_rate = 0.0;  // h_of_s / s_horizon
  double std_error = 0.0;
};

/// Paths below this count are rejected.
inline constexpr std::uint64_t kMinPickandsPaths = 100;

PickandsEstimate estimate_h_of_s(double alpha, double s_horizon, double grid_step,
                                 std::uint64_t n_paths, const RunOptions& options);

/// Ladder of horizons S and grid steps. Every step must be an integer multiple
/// of the finest one: all (S, step) cells are read off the same paths.
struct ExtrapolationPolicy {
  std::vector<double> s_ladder{2.0, 4.0, 8.0};
  std::vector<double> steps{0.02, 0.01};
  std::uint64_t n_paths = 200000;
  /// Relative Cauchy tolerance between the last two ladder increments.
  double tolerance = 0.1;
};

struct PickandsRung {
  double s_horizon = 0.0;
  std::vector<PickandsEstimate> by_step;  // in policy order
  double h_of_s = 0.0;                    // step-extrapolated H(S)
  double h_of_s_se = 0.0;
  double h_rate = 0.0;                    // h_of_s / S
};

/// Ladder result. `constant` is the increment (H(S_k) - H(S_{k-1})) / (S_k - S_{k-1})
/// at the top of the ladder; H(S) = H S + O(1), so this difference cancels the
/// boundary offset that biases H(S)/S at finite S. A single-rung ladder
/// returns that rung's h_rate and sets `single_point_ladder`.
struct PickandsResult {
  double alpha = 0.0;
  double constant = 0.0;
  double std_error = 0.0;
  std::vector<PickandsRung> ladder;
  std::vector<double> increments;
  std::vector<double> increment_se;
  bool single_point_ladder = false;
  bool richardson_applied = false;
  bool monotone_trend = false;  // h_rate decreasing along the ladder
  bool converged = false;
  std::uint64_t n_paths = 0;
  std::uint64_t seed = 0;
};

/// Thrown when the ladder increments do not settle within the tolerance.
class PickandsConvergenceError : public NumericError {
 public:
  PickandsConvergenceError(const std::string& what, PickandsResult result)
      : NumericError(what), result_(std::move(result)) {}
  const PickandsResult& result() const noexcept { return result_; }

 private:
  PickandsResult result_;
};

PickandsResult estimate_pickands(double alpha, const ExtrapolationPolicy& policy,
                                 const RunOptions& options);

/// On-disk table of Pickands estimates, CSV columns
/// alpha,S,step,n_paths,h_rate,std_error,seed (one row per ladder run).
class PickandsCache {
 public:
  struct Row {
    double alpha = 0.0;
    double s_horizon = 0.0;
    double step = 0.0;
    std::uint64_t n_paths = 0;
    double h_rate = 0.0;
    double std_error = 0.0;
    std::uint64_t seed = 0;
  };

  static PickandsCache load(const std::string& path);  // missing file -> empty
  void save(const std::string& path) const;

  /// Inserts or replaces the row with the same (alpha, S, step, n_paths, seed).
  void upsert(const Row& row);
  /// Most precise cached estimate for alpha.
  std::optional<Row> lookup(double alpha) const;
  const std::vector<Row>& rows() const noexcept { return rows_; }

  static Row from_result(const PickandsResult& result, const ExtrapolationPolicy& policy);

 private:
  std::vector<Row> rows_;
};

/// Closed form for alpha in {1, 2}, else the cache; DependencyError otherwise.
double resolve_h_alpha(double alpha, const PickandsCache* cache);

}  // namespace gpsup
