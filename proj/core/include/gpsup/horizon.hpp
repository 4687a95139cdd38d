#pragma once

#include <limits>
#include <string>
#include <vector>

#include "gpsup/random.hpp"

namespace gpsup {

enum class HorizonKind { Deterministic, Exponential, Pareto, LogPareto, CustomTail };

/// Heaviness regime of the horizon: integrable (D1), regularly varying tail
/// with index in (0, 1) (D2), slowly varying tail (D3).
enum class Regime { D1, D2, D3 };

std::string to_string(HorizonKind kind);
std::string to_string(Regime regime);

struct HorizonDraw {
  double value = 0.0;
  bool capped = false;
};

/// Law of the random horizon T, independent of the Gaussian process.
///
/// Built-ins: Deterministic(t0) and Exponential(mean) in D1, Pareto with
/// P(T > t) = t^{-lambda} for t >= 1 in D2, and LogPareto with
/// P(T > t) = 1 / ln t for t >= e in D3. CustomTail takes a tabulated tail
/// with a declared regime (and index for D2); it is screened, not inferred.
class HorizonDistribution {
 public:
  static HorizonDistribution deterministic(double t0);
  static HorizonDistribution exponential(double mean);
  static HorizonDistribution pareto(double lambda_tail);
  static HorizonDistribution log_pareto();
  /// Tail is linear between knots, 1 before the first knot, and undefined past
  /// the last one (queries there raise OutOfRangeError; samples are capped).
  static HorizonDistribution custom_tail(std::vector<double> t, std::vector<double> tail,
                                         Regime regime, double lambda_tail = 0.0);
  static HorizonDistribution custom_tail_from_csv(const std::string& path, Regime regime,
                                                  double lambda_tail = 0.0);

  HorizonKind kind() const noexcept { return kind_; }
  Regime regime() const noexcept { return regime_; }
  /// Regular-variation index (D2 only; 0 otherwise).
  double lambda_tail() const noexcept { return lambda_; }
  /// Smallest t at which the slowly varying factor is defined.
  double support_floor() const noexcept;
  /// Upper end of the tabulated range (infinity for built-ins).
  double table_end() const noexcept;

  /// P(T > t).
  double tail(double t) const;
  /// P(T > exp(log_t)), usable when exp(log_t) overflows.
  double tail_at_log(double log_t) const;

  /// L(t) = P(T > t) t^lambda (D2) or P(T > t) (D3). RegimeError for D1.
  double slowly_varying_part(double t) const;
  /// L(exp(log_t)).
  double slowly_varying_at_log(double log_t) const;

  /// E T; infinite outside D1.
  double mean() const;

  /// Inverse-transform draw. With a finite cap the value is min(T, cap) and
  /// `capped` reports truncation (CustomTail is also capped at its table end).
  HorizonDraw sample(RandomStream& stream,
                     double cap = std::numeric_limits<double>::infinity()) const;

  std::string describe() const;

  /// First table knot strictly after t (infinity when none or not tabulated).
  double next_knot_after(double t) const noexcept;

 private:
  HorizonDistribution(HorizonKind kind, Regime regime) : kind_(kind), regime_(regime) {}
  double custom_tail_value(double t) const;
  double custom_quantile(double u) const;

  HorizonKind kind_;
  Regime regime_;
  double param_ = 0.0;   // t0 or mean
  double lambda_ = 0.0;
  std::vector<double> knots_t_;
  std::vector<double> knots_tail_;
};

/// Ratio of the integrated tail over [0, x] to its regular-variation
/// equivalent x P(T > x) / (1 - lambda); tends to 1 as x grows (D2 only).
/// Adaptive quadrature with relative tolerance 1e-8; NumericError when the
/// error estimate is not met.
double karamata_check(const HorizonDistribution& horizon, double x);

}  // namespace gpsup
