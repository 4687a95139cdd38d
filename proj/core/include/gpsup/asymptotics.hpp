#pragma once

#include <string>

#include "gpsup/covmodel.hpp"
#include "gpsup/horizon.hpp"

namespace gpsup {

/// Standard normal upper tail P(N > u), via erfc (relative accuracy ~1e-15).
double psi(double u);
/// exp(-u^2/2) / (sqrt(2 pi) u), the leading Mills-ratio term; u > 0.
double psi_asymptotic(double u);
/// log P(N > u), finite for all u (continued fraction past u = 30).
double log_psi(double u);
/// P(N <= u).
double normal_cdf(double u);

/// Pickands constant for alpha = 1 (1) and alpha = 2 (1/sqrt(pi)); NaN otherwise.
double pickands_closed_form(double alpha);

enum class Formula { Pickands, Thm31, Thm32, Thm32RemarkForm, Thm33, Thm33RemarkForm };
enum class ResultRegime { D1, D2, D3, FixedInterval };

std::string to_string(Formula formula);
std::string to_string(ResultRegime regime);

/// A closed-form tail approximation of P(sup_{[0,T]} X > u) with the inputs
/// that produced it. `log_value` is always finite for u > 0 even when `value`
/// underflows.
struct AsymptoticResult {
  double value = 0.0;
  double log_value = 0.0;
  ResultRegime regime = ResultRegime::FixedInterval;
  Formula formula = Formula::Pickands;
  double u = 0.0;
  double h_alpha = 0.0;
  std::string model;
  std::string horizon;
};

/// C^{1/alpha} H_alpha u^{2/alpha} Psi(u): the exceedance intensity per unit
/// time at level u.
double unit_interval_rate(double u, const CovarianceModel& model, double h_alpha);

/// log m(u), m(u) = 1 / unit_interval_rate(u).
double log_m_scale(double u, const CovarianceModel& model, double h_alpha);
/// Critical horizon scale m(u); intervals of length x m(u) see
/// non-exceedance probability close to e^{-x}.
double m_scale(double u, const CovarianceModel& model, double h_alpha);

/// t_len C^{1/alpha} H_alpha u^{2/alpha} Psi(u), the fixed-interval asymptotic.
AsymptoticResult pickands_fixed_interval(double u, const CovarianceModel& model, double t_len,
                                         double h_alpha);

/// Integrable horizon: mean_t times the unit-interval asymptotic.
AsymptoticResult thm31(double u, const CovarianceModel& model, double mean_t, double h_alpha);
/// As above with E T taken from a D1 horizon (RegimeError otherwise).
AsymptoticResult thm31(double u, const CovarianceModel& model, const HorizonDistribution& horizon,
                       double h_alpha);

/// Regularly varying horizon, closed form:
/// Gamma(1-l) H^l C^{l/alpha} (2 pi)^{-l/2} L(u^{(alpha-2)/alpha} e^{u^2/2})
///   u^{l (2-alpha)/alpha} e^{-l u^2/2}.
AsymptoticResult thm32(double u, const CovarianceModel& model, const HorizonDistribution& horizon,
                       double h_alpha);
/// Gamma(1 - lambda) P(T > m(u)).
AsymptoticResult thm32_remark_form(double u, const CovarianceModel& model,
                                   const HorizonDistribution& horizon, double h_alpha);

/// Slowly varying horizon: L(u^{(alpha-2)/alpha} e^{u^2/2}).
AsymptoticResult thm33(double u, const CovarianceModel& model, const HorizonDistribution& horizon,
                       double h_alpha);
/// P(T > m(u)).
AsymptoticResult thm33_remark_form(double u, const CovarianceModel& model,
                                   const HorizonDistribution& horizon, double h_alpha);

/// Routes by regime: Deterministic -> fixed interval of length t0,
/// other D1 -> thm31, D2 -> thm32, D3 -> thm33.
AsymptoticResult dispatch(double u, const CovarianceModel& model,
                          const HorizonDistribution& horizon, double h_alpha);
/// The m(u)-form companion of dispatch(): identical value in D1, the remark
/// forms in D2 and D3.
AsymptoticResult dispatch_remark_form(double u, const CovarianceModel& model,
                                      const HorizonDistribution& horizon, double h_alpha);

}  // namespace gpsup
