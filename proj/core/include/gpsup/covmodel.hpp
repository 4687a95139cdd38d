#pragma once

#include <string>
#include <vector>

namespace gpsup {

enum class CovFamily { StableExp, OrnsteinUhlenbeck, Custom };

std::string to_string(CovFamily family);

/// Stationary covariance r(t) = Cov(X(s), X(s + t)) of a unit-variance process
/// with local behaviour r(t) = 1 - C|t|^alpha + o(|t|^alpha) at the origin.
///
/// The built-in family is r(t) = exp(-C |t|^alpha); `Custom` models are tables
/// of (t, r) knots interpolated linearly, with a declared (alpha, C) that is
/// screened by `check_assumptions` but never inferred.
class CovarianceModel {
 public:
  static CovarianceModel stable_exp(double alpha, double c_coef);
  /// exp(-C|t|), i.e. StableExp with alpha = 1.
  static CovarianceModel ornstein_uhlenbeck(double c_coef = 1.0);
  /// Knots must start at t = 0 with r = 1 and be strictly increasing in t.
  static CovarianceModel custom(std::vector<double> t, std::vector<double> r, double alpha,
                                double c_coef);
  /// Reads a two-column CSV (t, r); a header line is allowed.
  static CovarianceModel custom_from_csv(const std::string& path, double alpha, double c_coef);

  /// r(t) for t >= 0. Throws OutOfRangeError for a Custom model past its table.
  double evaluate(double t) const;
  double operator()(double t) const { return evaluate(t); }

  CovFamily family() const noexcept { return family_; }
  double alpha() const noexcept { return alpha_; }
  double c_coef() const noexcept { return c_coef_; }
  /// Largest lag the model can be evaluated at (infinity for analytic families).
  double max_lag() const noexcept;
  std::string describe() const;

 private:
  CovarianceModel(CovFamily family, double alpha, double c_coef);

  CovFamily family_;
  double alpha_;
  double c_coef_;
  std::vector<double> knots_t_;
  std::vector<double> knots_r_;
};

/// Relative tolerance of the A1 ratio test, applied at lags t <= 1e-2.
inline constexpr double kA1Tolerance = 0.01;

struct AssumptionCheck {
  bool consistent = false;
  std::string diagnostic;
};

/// Numerical screens of the local-shape (A1), non-degeneracy (A2) and
/// long-range decay (A3) conditions. A "consistent" verdict is a necessary
/// condition check on a probe grid, not a proof.
struct AssumptionReport {
  AssumptionCheck a1;
  AssumptionCheck a2;
  AssumptionCheck a3;

  bool all_consistent() const noexcept { return a1.consistent && a2.consistent && a3.consistent; }
};

AssumptionReport check_assumptions(const CovarianceModel& model, double t_max, int n_probe,
                                   double a1_tolerance = kA1Tolerance);

}  // namespace gpsup
