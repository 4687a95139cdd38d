#include "gpsup/covmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gpsup/csv.hpp"
#include "gpsup/errors.hpp"

namespace gpsup {

std::string to_string(CovFamily family) {
  switch (family) {
    case CovFamily::StableExp:
      return "stable_exp";
    case CovFamily::OrnsteinUhlenbeck:
      return "ou";
    case CovFamily::Custom:
      return "custom";
  }
  return "unknown";
}

CovarianceModel::CovarianceModel(CovFamily family, double alpha, double c_coef)
    : family_(family), alpha_(alpha), c_coef_(c_coef) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ConfigError("model.alpha", "must lie in (0, 2]");
  if (!(c_coef > 0.0) || !std::isfinite(c_coef))
    throw ConfigError("model.c_coef", "must be a positive finite number");
}

CovarianceModel CovarianceModel::stable_exp(double alpha, double c_coef) {
  return CovarianceModel(CovFamily::StableExp, alpha, c_coef);
}

CovarianceModel CovarianceModel::ornstein_uhlenbeck(double c_coef) {
  return CovarianceModel(CovFamily::OrnsteinUhlenbeck, 1.0, c_coef);
}

CovarianceModel CovarianceModel::custom(std::vector<double> t, std::vector<double> r, double alpha,
                                        double c_coef) {
  CovarianceModel m(CovFamily::Custom, alpha, c_coef);
  if (t.size() != r.size() || t.size() < 2)
    throw ConfigError("model.table", "needs at least two (t, r) knots");
  if (t.front() != 0.0 || r.front() != 1.0)
    throw ConfigError("model.table", "first knot must be (0, 1)");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw ConfigError("model.table", "t must be strictly increasing");
    if (!(std::fabs(r[i]) <= 1.0)) throw ConfigError("model.table", "|r| must not exceed 1");
  }
  m.knots_t_ = std::move(t);
  m.knots_r_ = std::move(r);
  return m;
}

CovarianceModel CovarianceModel::custom_from_csv(const std::string& path, double alpha,
                                                 double c_coef) {
  auto [t, r] = read_two_column_csv(path);
  return custom(std::move(t), std::move(r), alpha, c_coef);
}

double CovarianceModel::max_lag() const noexcept {
  return family_ == CovFamily::Custom ? knots_t_.back() : std::numeric_limits<double>::infinity();
}

double CovarianceModel::evaluate(double t) const {
  t = std::fabs(t);
  if (t == 0.0) return 1.0;
  if (family_ != CovFamily::Custom) return std::exp(-c_coef_ * std::pow(t, alpha_));

  if (t > knots_t_.back()) {
    std::ostringstream msg;
    msg << "custom covariance queried at t=" << t << " beyond table end " << knots_t_.back();
    throw OutOfRangeError(msg.str());
  }
  auto hi = std::upper_bound(knots_t_.begin(), knots_t_.end(), t);
  if (hi == knots_t_.end()) return knots_r_.back();
  const std::size_t j = static_cast<std::size_t>(hi - knots_t_.begin());
  const double w = (t - knots_t_[j - 1]) / (knots_t_[j] - knots_t_[j - 1]);
  return knots_r_[j - 1] + w * (knots_r_[j] - knots_r_[j - 1]);
}

std::string CovarianceModel::describe() const {
  std::ostringstream os;
  os << to_string(family_) << "(alpha=" << alpha_ << ", C=" << c_coef_;
  if (family_ == CovFamily::Custom) os << ", knots=" << knots_t_.size();
  os << ')';
  return os.str();
}

AssumptionReport check_assumptions(const CovarianceModel& model, double t_max, int n_probe,
                                   double a1_tolerance) {
  if (!(t_max > 1.0)) throw ConfigError("check.t_max", "must exceed 1");
  if (n_probe < 10) throw ConfigError("check.n_probe", "must be at least 10");

  AssumptionReport report;
  const double alpha = model.alpha();
  const double c = model.c_coef();
  const double horizon = std::min(t_max, model.max_lag());

  // A1: ratio (1 - r(t)) / (C t^alpha) along t = 1e-2, 1e-3, ... while
  // C t^alpha stays above 1e-9 (below that 1 - r(t) is lost to cancellation).
  // The last three probes must lie within the tolerance.
  {
    std::ostringstream diag;
    diag << "ratio(1-r)/(C t^alpha):";
    std::vector<double> ratios;
    for (int k = 2; k <= 12; ++k) {
      const double t = std::pow(10.0, -k);
      const double scale = c * std::pow(t, alpha);
      if (scale < 1e-9 && ratios.size() >= 3) break;
      const double ratio = (1.0 - model.evaluate(t)) / scale;
      ratios.push_back(ratio);
      diag << " t=1e-" << k << ":" << ratio;
    }
    bool ok = true;
    for (std::size_t i = ratios.size() - 3; i < ratios.size(); ++i)
      if (!(std::fabs(ratios[i] - 1.0) <= a1_tolerance)) ok = false;
    report.a1 = {ok, diag.str()};
  }

  // A2: r(t) < 1 on a geometric grid from 1e-6 to the horizon.
  {
    bool ok = true;
    double worst_t = 0.0;
    double worst_r = -std::numeric_limits<double>::infinity();
    const double lo = std::log(1e-6);
    const double hi = std::log(horizon);
    for (int k = 0; k < n_probe; ++k) {
      const double t = std::min(std::exp(lo + (hi - lo) * k / (n_probe - 1)), horizon);
      const double r = model.evaluate(t);
      if (r > worst_r) {
        worst_r = r;
        worst_t = t;
      }
      if (!(r < 1.0)) ok = false;
    }
    std::ostringstream diag;
    diag << "max r(t) over probes = " << worst_r << " at t=" << worst_t;
    report.a2 = {ok, diag.str()};
  }

  // A3: |r(t) log t| non-increasing on a geometric grid from e to the horizon
  // once past its largest probe value, and at most half that peak at the end.
  {
    std::ostringstream diag;
    if (horizon <= std::exp(1.0)) {
      diag << "probe range [e, " << horizon << "] is empty";
      report.a3 = {false, diag.str()};
    } else {
      const double lo = 1.0;
      const double hi = std::log(horizon);
      std::vector<double> values;
      for (int k = 0; k < n_probe; ++k) {
        const double t = std::min(std::exp(lo + (hi - lo) * k / (n_probe - 1)), horizon);
        values.push_back(std::fabs(model.evaluate(t) * std::log(t)));
      }
      const auto peak_it = std::max_element(values.begin(), values.end());
      const double peak = *peak_it;
      const double last = values.back();
      bool monotone = true;
      for (auto it = peak_it + 1; it != values.end(); ++it)
        if (*it > *(it - 1) * (1.0 + 1e-12) + 1e-300) monotone = false;
      const bool decayed = last <= 0.5 * peak || last < 1e-12;
      diag << "|r log t|: peak=" << peak << " at probe " << (peak_it - values.begin())
           << " final=" << last << (monotone ? " decreasing after peak" : " rises after peak");
      report.a3 = {monotone && decayed, diag.str()};
    }
  }
  return report;
}

}  // namespace gpsup
