#include "gpsup/horizon.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gpsup/csv.hpp"
#include "gpsup/errors.hpp"

namespace gpsup {

std::string to_string(HorizonKind kind) {
  switch (kind) {
    case HorizonKind::Deterministic:
      return "deterministic";
    case HorizonKind::Exponential:
      return "exponential";
    case HorizonKind::Pareto:
      return "pareto";
    case HorizonKind::LogPareto:
      return "log_pareto";
    case HorizonKind::CustomTail:
      return "custom_tail";
  }
  return "unknown";
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::D1:
      return "D1";
    case Regime::D2:
      return "D2";
    case Regime::D3:
      return "D3";
  }
  return "unknown";
}

HorizonDistribution HorizonDistribution::deterministic(double t0) {
  if (!(t0 >= 0.0) || !std::isfinite(t0)) throw ConfigError("horizon.t0", "must be >= 0");
  HorizonDistribution h(HorizonKind::Deterministic, Regime::D1);
  h.param_ = t0;
  return h;
}

HorizonDistribution HorizonDistribution::exponential(double mean) {
  if (!(mean > 0.0) || !std::isfinite(mean)) throw ConfigError("horizon.mean", "must be > 0");
  HorizonDistribution h(HorizonKind::Exponential, Regime::D1);
  h.param_ = mean;
  return h;
}

HorizonDistribution HorizonDistribution::pareto(double lambda_tail) {
  if (!(lambda_tail > 0.0 && lambda_tail < 1.0))
    throw ConfigError("horizon.lambda", "must lie in (0, 1)");
  HorizonDistribution h(HorizonKind::Pareto, Regime::D2);
  h.lambda_ = lambda_tail;
  return h;
}

HorizonDistribution HorizonDistribution::log_pareto() {
  return HorizonDistribution(HorizonKind::LogPareto, Regime::D3);
}

HorizonDistribution HorizonDistribution::custom_tail(std::vector<double> t,
                                                     std::vector<double> tail, Regime regime,
                                                     double lambda_tail) {
  if (t.size() != tail.size() || t.size() < 2)
    throw ConfigError("horizon.table", "needs at least two (t, tail) knots");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] >= 0.0)) throw ConfigError("horizon.table", "t must be nonnegative");
    if (!(tail[i] >= 0.0 && tail[i] <= 1.0))
      throw ConfigError("horizon.table", "tail values must lie in [0, 1]");
    if (i > 0 && !(t[i] > t[i - 1]))
      throw ConfigError("horizon.table", "t must be strictly increasing");
    if (i > 0 && tail[i] > tail[i - 1])
      throw ConfigError("horizon.table", "tail must be non-increasing");
  }
  if (regime == Regime::D2 && !(lambda_tail > 0.0 && lambda_tail < 1.0))
    throw ConfigError("horizon.lambda", "D2 custom tail needs lambda in (0, 1)");
  HorizonDistribution h(HorizonKind::CustomTail, regime);
  h.lambda_ = regime == Regime::D2 ? lambda_tail : 0.0;
  h.knots_t_ = std::move(t);
  h.knots_tail_ = std::move(tail);
  return h;
}

HorizonDistribution HorizonDistribution::custom_tail_from_csv(const std::string& path,
                                                              Regime regime,
                                                              double lambda_tail) {
  auto [t, tail] = read_two_column_csv(path);
  return custom_tail(std::move(t), std::move(tail), regime, lambda_tail);
}

double HorizonDistribution::support_floor() const noexcept {
  switch (kind_) {
    case HorizonKind::Pareto:
      return 1.0;
    case HorizonKind::LogPareto:
      return std::exp(1.0);
    case HorizonKind::CustomTail:
      return knots_t_.front();
    default:
      return 0.0;
  }
}

double HorizonDistribution::table_end() const noexcept {
  return kind_ == HorizonKind::CustomTail ? knots_t_.back()
                                          : std::numeric_limits<double>::infinity();
}

double HorizonDistribution::custom_tail_value(double t) const {
  if (t < knots_t_.front()) return 1.0;
  if (t > knots_t_.back()) {
    std::ostringstream msg;
    msg << "custom tail queried at t=" << t << " beyond table end " << knots_t_.back();
    throw OutOfRangeError(msg.str());
  }
  auto hi = std::upper_bound(knots_t_.begin(), knots_t_.end(), t);
  if (hi == knots_t_.end()) return knots_tail_.back();
  const std::size_t j = static_cast<std::size_t>(hi - knots_t_.begin());
  const double w = (t - knots_t_[j - 1]) / (knots_t_[j] - knots_t_[j - 1]);
  return knots_tail_[j - 1] + w * (knots_tail_[j] - knots_tail_[j - 1]);
}

double HorizonDistribution::tail(double t) const {
  if (t < 0.0) return 1.0;
  switch (kind_) {
    case HorizonKind::Deterministic:
      return t < param_ ? 1.0 : 0.0;
    case HorizonKind::Exponential:
      return std::exp(-t / param_);
    case HorizonKind::Pareto:
      return t <= 1.0 ? 1.0 : std::pow(t, -lambda_);
    case HorizonKind::LogPareto:
      return t <= std::exp(1.0) ? 1.0 : 1.0 / std::log(t);
    case HorizonKind::CustomTail:
      return custom_tail_value(t);
  }
  return 0.0;
}

double HorizonDistribution::tail_at_log(double log_t) const {
  switch (kind_) {
    case HorizonKind::Pareto:
      return log_t <= 0.0 ? 1.0 : std::exp(-lambda_ * log_t);
    case HorizonKind::LogPareto:
      return log_t <= 1.0 ? 1.0 : 1.0 / log_t;
    case HorizonKind::Exponential:
      return std::exp(-std::exp(log_t) / param_);
    default:
      return tail(std::exp(log_t));
  }
}

double HorizonDistribution::slowly_varying_part(double t) const {
  if (regime_ == Regime::D1)
    throw RegimeError("horizon.regime", "slowly varying part is defined for D2/D3 only");
  if (t < support_floor()) {
    std::ostringstream msg;
    msg << "slowly varying part queried at t=" << t << " below support floor "
        << support_floor();
    throw OutOfRangeError(msg.str());
  }
  const double p = tail(t);
  return regime_ == Regime::D2 ? p * std::pow(t, lambda_) : p;
}

double HorizonDistribution::slowly_varying_at_log(double log_t) const {
  if (regime_ == Regime::D1)
    throw RegimeError("horizon.regime", "slowly varying part is defined for D2/D3 only");
  switch (kind_) {
    case HorizonKind::Pareto:
      return 1.0;
    case HorizonKind::LogPareto:
      if (log_t < 1.0) throw OutOfRangeError("slowly varying part queried below support floor e");
      return 1.0 / log_t;
    default:
      return slowly_varying_part(std::exp(log_t));
  }
}

double HorizonDistribution::mean() const {
  switch (kind_) {
    case HorizonKind::Deterministic:
    case HorizonKind::Exponential:
      return param_;
    case HorizonKind::CustomTail: {
      if (regime_ != Regime::D1) return std::numeric_limits<double>::infinity();
      // Exact integral of the piecewise-linear tail over the table.
      double integral = knots_t_.front();
      for (std::size_t i = 1; i < knots_t_.size(); ++i)
        integral += 0.5 * (knots_tail_[i] + knots_tail_[i - 1]) * (knots_t_[i] - knots_t_[i - 1]);
      return integral;
    }
    default:
      return std::numeric_limits<double>::infinity();
  }
}

double HorizonDistribution::next_knot_after(double t) const noexcept {
  auto it = std::upper_bound(knots_t_.begin(), knots_t_.end(), t);
  return it == knots_t_.end() ? std::numeric_limits<double>::infinity() : *it;
}

double HorizonDistribution::custom_quantile(double u) const {
  // Smallest t with tail(t) <= u on the tabulated range.
  if (u >= knots_tail_.front()) return knots_t_.front();
  for (std::size_t j = 1; j < knots_t_.size(); ++j) {
    if (knots_tail_[j] <= u) {
      const double hi = knots_tail_[j - 1];
      const double lo = knots_tail_[j];
      const double w = hi == lo ? 0.0 : (hi - u) / (hi - lo);
      return knots_t_[j - 1] + w * (knots_t_[j] - knots_t_[j - 1]);
    }
  }
  return std::numeric_limits<double>::infinity();
}

HorizonDraw HorizonDistribution::sample(RandomStream& stream, double cap) const {
  double t = 0.0;
  switch (kind_) {
    case HorizonKind::Deterministic:
      t = param_;
      break;
    case HorizonKind::Exponential:
      t = -param_ * std::log(stream.uniform());
      break;
    case HorizonKind::Pareto:
      t = std::pow(stream.uniform(), -1.0 / lambda_);
      break;
    case HorizonKind::LogPareto:
      t = std::exp(1.0 / stream.uniform());
      break;
    case HorizonKind::CustomTail:
      t = custom_quantile(stream.uniform());
      cap = std::min(cap, knots_t_.back());
      break;
  }
  if (t > cap) return {cap, true};
  return {t, false};
}

std::string HorizonDistribution::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << '(';
  switch (kind_) {
    case HorizonKind::Deterministic:
      os << "t0=" << param_;
      break;
    case HorizonKind::Exponential:
      os << "mean=" << param_;
      break;
    case HorizonKind::Pareto:
      os << "lambda=" << lambda_;
      break;
    case HorizonKind::LogPareto:
      break;
    case HorizonKind::CustomTail:
      os << "regime=" << to_string(regime_) << ", lambda=" << lambda_
         << ", knots=" << knots_t_.size();
      break;
  }
  os << ')';
  return os.str();
}

double karamata_check(const HorizonDistribution& horizon, double x) {
  if (horizon.regime() != Regime::D2)
    throw RegimeError("horizon.regime", "karamata_check requires a D2 horizon");
  const double floor = horizon.support_floor();
  if (!(x > floor)) throw ConfigError("x", "must exceed the support floor");
  if (x > horizon.table_end()) throw OutOfRangeError("karamata_check beyond custom tail table");

  double integral = 0.0;
  if (horizon.kind() == HorizonKind::CustomTail) {
    // Piecewise-linear tail: knot-to-knot trapezoids are exact.
    integral = floor;
    double prev_t = floor;
    double prev_p = horizon.tail(floor);
    for (;;) {
      const double next_knot = horizon.next_knot_after(prev_t);
      const double t = std::min(next_knot, x);
      const double p = horizon.tail(t);
      integral += 0.5 * (p + prev_p) * (t - prev_t);
      if (t >= x) break;
      prev_t = t;
      prev_p = p;
    }
  } else {
    // Tail equals 1 below the support floor; integrate the rest decade by decade.
    integral = floor;
    using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;
    auto f = [&](double t) { return horizon.tail(t); };
    double a = floor;
    while (a < x) {
      const double b = std::min(x, a * 10.0);
      double error = 0.0;
      const double piece = Quadrature::integrate(f, a, b, 15, 1e-12, &error);
      if (!(error <= 1e-8 * std::fabs(piece)) || !std::isfinite(piece)) {
        std::ostringstream msg;
        msg << "quadrature failed on [" << a << ", " << b << "]: error estimate " << error;
        throw NumericError(msg.str());
      }
      integral += piece;
      a = b;
    }
  }
  const double lambda = horizon.lambda_tail();
  const double equivalent = x * horizon.tail(x) / (1.0 - lambda);
  return integral / equivalent;
}

}  // namespace gpsup
