#include "gpsup/asymptotics.hpp"

#include <cmath>
#include <numbers>

#include "gpsup/errors.hpp"

namespace gpsup {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

void require_positive_u(double u) {
  if (!(u > 0.0) || !std::isfinite(u)) throw ConfigError("u", "must be positive and finite");
}

void require_h_alpha(double h_alpha) {
  if (!(h_alpha > 0.0) || !std::isfinite(h_alpha))
    throw DependencyError("pickands.h_alpha", "Pickands constant must be positive");
}

AsymptoticResult make_result(double log_value, ResultRegime regime, Formula formula, double u,
                             double h_alpha, const CovarianceModel& model,
                             const std::string& horizon) {
  return {std::exp(log_value), log_value, regime, formula, u, h_alpha, model.describe(), horizon};
}

}  // namespace

double psi(double u) { return 0.5 * std::erfc(u / std::numbers::sqrt2); }

double psi_asymptotic(double u) { return std::exp(-0.5 * u * u - kLogSqrt2Pi) / u; }

double normal_cdf(double u) { return 0.5 * std::erfc(-u / std::numbers::sqrt2); }

double log_psi(double u) {
  if (u <= 30.0) return std::log(psi(u));
  // Mills ratio R(u) = Psi(u) / phi(u) = 1/(u + 1/(u + 2/(u + 3/(u + ...)))).
  double tail = u;
  for (int k = 40; k >= 1; --k) tail = u + k / tail;
  return -0.5 * u * u - kLogSqrt2Pi - std::log(tail);
}

double pickands_closed_form(double alpha) {
  if (alpha == 1.0) return 1.0;
  if (alpha == 2.0) return 1.0 / std::sqrt(std::numbers::pi);
  return std::nan("");
}

std::string to_string(Formula formula) {
  switch (formula) {
    case Formula::Pickands:
      return "Pickands";
    case Formula::Thm31:
      return "Thm31";
    case Formula::Thm32:
      return "Thm32";
    case Formula::Thm32RemarkForm:
      return "Thm32RemarkForm";
    case Formula::Thm33:
      return "Thm33";
    case Formula::Thm33RemarkForm:
      return "Thm33RemarkForm";
  }
  return "unknown";
}

std::string to_string(ResultRegime regime) {
  switch (regime) {
    case ResultRegime::D1:
      return "D1";
    case ResultRegime::D2:
      return "D2";
    case ResultRegime::D3:
      return "D3";
    case ResultRegime::FixedInterval:
      return "FixedInterval";
  }
  return "unknown";
}

double unit_interval_rate(double u, const CovarianceModel& model, double h_alpha) {
  require_positive_u(u);
  require_h_alpha(h_alpha);
  const double inv_alpha = 1.0 / model.alpha();
  return std::pow(model.c_coef(), inv_alpha) * h_alpha * std::pow(u, 2.0 * inv_alpha) * psi(u);
}

double log_m_scale(double u, const CovarianceModel& model, double h_alpha) {
  require_positive_u(u);
  require_h_alpha(h_alpha);
  const double inv_alpha = 1.0 / model.alpha();
  return -(inv_alpha * std::log(model.c_coef()) + std::log(h_alpha) +
           2.0 * inv_alpha * std::log(u) + log_psi(u));
}

double m_scale(double u, const CovarianceModel& model, double h_alpha) {
  return 1.0 / unit_interval_rate(u, model, h_alpha);
}

AsymptoticResult pickands_fixed_interval(double u, const CovarianceModel& model, double t_len,
                                         double h_alpha) {
  if (!(t_len >= 0.0) || !std::isfinite(t_len)) throw ConfigError("t_len", "must be >= 0");
  const double rate = unit_interval_rate(u, model, h_alpha);
  AsymptoticResult r;
  r.value = t_len * rate;
  r.log_value = std::log(t_len) - log_m_scale(u, model, h_alpha);
  r.regime = ResultRegime::FixedInterval;
  r.formula = Formula::Pickands;
  r.u = u;
  r.h_alpha = h_alpha;
  r.model = model.describe();
  r.horizon = "fixed(" + std::to_string(t_len) + ")";
  return r;
}

AsymptoticResult thm31(double u, const CovarianceModel& model, double mean_t, double h_alpha) {
  if (!(mean_t >= 0.0) || !std::isfinite(mean_t))
    throw ConfigError("horizon.mean", "D1 horizon needs a finite nonnegative mean");
  const double rate = unit_interval_rate(u, model, h_alpha);
  AsymptoticResult r;
  r.value = mean_t * rate;
  r.log_value = std::log(mean_t) - log_m_scale(u, model, h_alpha);
  r.regime = ResultRegime::D1;
  r.formula = Formula::Thm31;
  r.u = u;
  r.h_alpha = h_alpha;
  r.model = model.describe();
  r.horizon = "mean(" + std::to_string(mean_t) + ")";
  return r;
}

AsymptoticResult thm31(double u, const CovarianceModel& model, const HorizonDistribution& horizon,
                       double h_alpha) {
  if (horizon.regime() != Regime::D1)
    throw RegimeError("horizon.regime", "thm31 requires a D1 horizon, got " +
                                            to_string(horizon.regime()));
  AsymptoticResult r = thm31(u, model, horizon.mean(), h_alpha);
  r.horizon = horizon.describe();
  return r;
}

namespace {

// log of the argument u^{(alpha-2)/alpha} exp(u^2/2) of L.
double log_l_argument(double u, double alpha) {
  return (alpha - 2.0) / alpha * std::log(u) + 0.5 * u * u;
}

}  // namespace

AsymptoticResult thm32(double u, const CovarianceModel& model, const HorizonDistribution& horizon,
                       double h_alpha) {
  require_positive_u(u);
  require_h_alpha(h_alpha);
  if (horizon.regime() != Regime::D2)
    throw RegimeError("horizon.regime", "thm32 requires a D2 horizon, got " +
                                            to_string(horizon.regime()));
  const double lambda = horizon.lambda_tail();
  if (!(lambda > 0.0 && lambda < 1.0))
    throw ConfigError("horizon.lambda", "thm32 needs lambda in (0, 1)");
  const double alpha = model.alpha();
  const double l = horizon.slowly_varying_at_log(log_l_argument(u, alpha));
  const double log_value = std::lgamma(1.0 - lambda) + lambda * std::log(h_alpha) +
                           lambda / alpha * std::log(model.c_coef()) -
                           0.5 * lambda * std::log(2.0 * std::numbers::pi) + std::log(l) +
                           lambda * (2.0 - alpha) / alpha * std::log(u) - 0.5 * lambda * u * u;
  return make_result(log_value, ResultRegime::D2, Formula::Thm32, u, h_alpha, model,
                     horizon.describe());
}

AsymptoticResult thm32_remark_form(double u, const CovarianceModel& model,
                                   const HorizonDistribution& horizon, double h_alpha) {
  if (horizon.regime() != Regime::D2)
    throw RegimeError("horizon.regime", "thm32 requires a D2 horizon, got " +
                                            to_string(horizon.regime()));
  const double lambda = horizon.lambda_tail();
  if (!(lambda > 0.0 && lambda < 1.0))
    throw ConfigError("horizon.lambda", "thm32 needs lambda in (0, 1)");
  const double log_m = log_m_scale(u, model, h_alpha);
  const double log_value = std::lgamma(1.0 - lambda) + std::log(horizon.tail_at_log(log_m));
  return make_result(log_value, ResultRegime::D2, Formula::Thm32RemarkForm, u, h_alpha, model,
                     horizon.describe());
}

AsymptoticResult thm33(double u, const CovarianceModel& model, const HorizonDistribution& horizon,
                       double h_alpha) {
  require_positive_u(u);
  require_h_alpha(h_alpha);
  if (horizon.regime() != Regime::D3)
    throw RegimeError("horizon.regime", "thm33 requires a D3 horizon, got " +
                                            to_string(horizon.regime()));
  const double l = horizon.slowly_varying_at_log(log_l_argument(u, model.alpha()));
  return make_result(std::log(l), ResultRegime::D3, Formula::Thm33, u, h_alpha, model,
                     horizon.describe());
}

AsymptoticResult thm33_remark_form(double u, const CovarianceModel& model,
                                   const HorizonDistribution& horizon, double h_alpha) {
  if (horizon.regime() != Regime::D3)
    throw RegimeError("horizon.regime", "thm33 requires a D3 horizon, got " +
                                            to_string(horizon.regime()));
  const double log_m = log_m_scale(u, model, h_alpha);
  return make_result(std::log(horizon.tail_at_log(log_m)), ResultRegime::D3,
                     Formula::Thm33RemarkForm, u, h_alpha, model, horizon.describe());
}

AsymptoticResult dispatch(double u, const CovarianceModel& model,
                          const HorizonDistribution& horizon, double h_alpha) {
  switch (horizon.regime()) {
    case Regime::D1:
      if (horizon.kind() == HorizonKind::Deterministic) {
        AsymptoticResult r = pickands_fixed_interval(u, model, horizon.mean(), h_alpha);
        r.horizon = horizon.describe();
        return r;
      }
      return thm31(u, model, horizon, h_alpha);
    case Regime::D2:
      return thm32(u, model, horizon, h_alpha);
    case Regime::D3:
      return thm33(u, model, horizon, h_alpha);
  }
  throw RegimeError("horizon.regime", "unclassified horizon");
}

AsymptoticResult dispatch_remark_form(double u, const CovarianceModel& model,
                                      const HorizonDistribution& horizon, double h_alpha) {
  switch (horizon.regime()) {
    case Regime::D1: {
      // E T times the unit-interval asymptotic.
      const AsymptoticResult unit = pickands_fixed_interval(u, model, 1.0, h_alpha);
      AsymptoticResult r = dispatch(u, model, horizon, h_alpha);
      r.value = horizon.mean() * unit.value;
      r.log_value = std::log(horizon.mean()) + unit.log_value;
      return r;
    }
    case Regime::D2:
      return thm32_remark_form(u, model, horizon, h_alpha);
    case Regime::D3:
      return thm33_remark_form(u, model, horizon, h_alpha);
  }
  throw RegimeError("horizon.regime", "unclassified horizon");
}

}  // namespace gpsup
