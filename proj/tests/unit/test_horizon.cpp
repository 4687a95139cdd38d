#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gpsup/errors.hpp"
#include "gpsup/horizon.hpp"

using namespace gpsup;

namespace {

// Closed form of the Karamata ratio for a unit Pareto tail.
double pareto_karamata(double lambda, double x) { return 1.0 - lambda / std::pow(x, 1.0 - lambda); }

void check_empirical_tail(const HorizonDistribution& h, const std::vector<double>& probes,
                          double cap = std::numeric_limits<double>::infinity()) {
  constexpr int n = 1000000;
  std::vector<int> above(probes.size());
  RandomStream s(2024, 0);
  for (int i = 0; i < n; ++i) {
    const double t = h.sample(s, cap).value;
    for (std::size_t k = 0; k < probes.size(); ++k) above[k] += t > probes[k];
  }
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const double p = h.tail(probes[k]);
    const double se = std::sqrt(p * (1.0 - p) / n);
    EXPECT_NEAR(static_cast<double>(above[k]) / n, p, 4.0 * se + 1e-12)
        << h.describe() << " at t=" << probes[k];
  }
}

}  // namespace

TEST(Horizon, TailExamples) {
  EXPECT_EQ(HorizonDistribution::exponential(1.0).tail(0.0), 1.0);
  EXPECT_DOUBLE_EQ(HorizonDistribution::pareto(0.5).tail(4.0), 0.5);
  EXPECT_DOUBLE_EQ(HorizonDistribution::log_pareto().tail(std::exp(2.0)), 0.5);
  const auto det = HorizonDistribution::deterministic(5.0);
  EXPECT_EQ(det.tail(4.999), 1.0);
  EXPECT_EQ(det.tail(5.0), 0.0);
}

TEST(Horizon, RegimeClassification) {
  EXPECT_EQ(HorizonDistribution::deterministic(1.0).regime(), Regime::D1);
  EXPECT_EQ(HorizonDistribution::exponential(2.0).regime(), Regime::D1);
  EXPECT_EQ(HorizonDistribution::pareto(0.3).regime(), Regime::D2);
  EXPECT_EQ(HorizonDistribution::log_pareto().regime(), Regime::D3);
  EXPECT_THROW(HorizonDistribution::pareto(1.0), ConfigError);
  EXPECT_THROW(HorizonDistribution::pareto(0.0), ConfigError);
  EXPECT_THROW(HorizonDistribution::exponential(0.0), ConfigError);
}

TEST(Horizon, SlowlyVaryingPartExamples) {
  const auto p = HorizonDistribution::pareto(0.5);
  for (double t : {1.0, 3.0, 1e4, 1e9}) EXPECT_NEAR(p.slowly_varying_part(t), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(HorizonDistribution::log_pareto().slowly_varying_part(std::exp(2.0)), 0.5);
  EXPECT_THROW(HorizonDistribution::exponential(1.0).slowly_varying_part(3.0), RegimeError);
  EXPECT_THROW(HorizonDistribution::log_pareto().slowly_varying_part(2.0), OutOfRangeError);
}

TEST(Horizon, CustomTailSplitsOffThePowerFactor) {
  // P(T > t) = 2 t^{-0.3} ln t on [3e4, 1e8], declared D2 with lambda = 0.3.
  std::vector<double> t;
  std::vector<double> tail;
  for (double x = 3e4; x <= 1e8 * 1.0001; x *= 2.0) {
    t.push_back(x);
    tail.push_back(2.0 * std::pow(x, -0.3) * std::log(x));
  }
  const auto h = HorizonDistribution::custom_tail(t, tail, Regime::D2, 0.3);
  for (double x : {t[0], t[3], t[7], t.back()})
    EXPECT_NEAR(h.slowly_varying_part(x), 2.0 * std::log(x), 1e-9 * std::log(x));
  EXPECT_EQ(h.tail(100.0), 1.0);
  EXPECT_THROW(h.tail(t.back() * 1.01), OutOfRangeError);
}

TEST(Horizon, CustomTailValidation) {
  EXPECT_THROW(HorizonDistribution::custom_tail({1.0, 2.0}, {0.5, 0.6}, Regime::D1), ConfigError);
  EXPECT_THROW(HorizonDistribution::custom_tail({1.0, 1.0}, {0.5, 0.4}, Regime::D1), ConfigError);
  EXPECT_THROW(HorizonDistribution::custom_tail({1.0, 2.0}, {1.5, 0.4}, Regime::D1), ConfigError);
  EXPECT_THROW(HorizonDistribution::custom_tail({1.0, 2.0}, {0.5, 0.4}, Regime::D2, 1.2),
               ConfigError);
}

TEST(Horizon, CustomTailMeanIsExact) {
  // Uniform(0, 2): tail 1 - t/2.
  const auto h = HorizonDistribution::custom_tail({0.0, 2.0}, {1.0, 0.0}, Regime::D1);
  EXPECT_DOUBLE_EQ(h.mean(), 1.0);
  EXPECT_TRUE(std::isinf(HorizonDistribution::pareto(0.5).mean()));
}

TEST(Horizon, SamplingExamples) {
  RandomStream s(1, 1);
  const auto det = HorizonDistribution::deterministic(5.0);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(det.sample(s).value, 5.0);

  const auto par = HorizonDistribution::pareto(0.5);
  constexpr int n = 1000000;
  int above = 0;
  for (int i = 0; i < n; ++i) above += par.sample(s).value > 4.0;
  EXPECT_NEAR(above / double(n), 0.5, 3.0 * std::sqrt(0.25 / n));

  const auto lp = HorizonDistribution::log_pareto();
  int capped = 0;
  for (int i = 0; i < n; ++i) {
    const auto d = lp.sample(s, 1e6);
    ASSERT_LE(d.value, 1e6);
    capped += d.capped;
  }
  const double p = 1.0 / std::log(1e6);
  EXPECT_NEAR(p, 0.0724, 1e-4);
  EXPECT_NEAR(capped / double(n), p, 3.0 * std::sqrt(p * (1.0 - p) / n));
}

TEST(Horizon, EmpiricalTailMatchesAtFiveProbes) {
  check_empirical_tail(HorizonDistribution::exponential(1.5), {0.1, 0.5, 1.0, 2.0, 5.0});
  check_empirical_tail(HorizonDistribution::pareto(0.2), {1.5, 10.0, 1e3, 1e5, 1e8});
  check_empirical_tail(HorizonDistribution::pareto(0.8), {1.1, 2.0, 10.0, 100.0, 1e4});
  check_empirical_tail(HorizonDistribution::log_pareto(), {3.0, 10.0, 1e3, 1e6, 1e12});
  check_empirical_tail(HorizonDistribution::custom_tail({0.0, 1.0, 4.0}, {1.0, 0.5, 0.0},
                                                        Regime::D1),
                       {0.2, 0.7, 1.0, 2.0, 3.5});
}

TEST(Horizon, SlowVariationProbeTightens) {
  const auto lp = HorizonDistribution::log_pareto();
  double prev_gap = 1.0;
  for (double t : {1e3, 1e4, 1e5, 1e6}) {
    const double ratio = lp.slowly_varying_part(2.0 * t) / lp.slowly_varying_part(t);
    EXPECT_GE(ratio, 0.9);
    EXPECT_LE(ratio, 1.1);
    const double gap = std::fabs(1.0 - ratio);
    EXPECT_LT(gap, prev_gap);
    prev_gap = gap;
  }
}

TEST(Horizon, LogSpaceTail) {
  const auto lp = HorizonDistribution::log_pareto();
  EXPECT_DOUBLE_EQ(lp.tail_at_log(800.0), 1.0 / 800.0);
  EXPECT_DOUBLE_EQ(lp.slowly_varying_at_log(800.0), 1.0 / 800.0);
  const auto par = HorizonDistribution::pareto(0.5);
  EXPECT_NEAR(par.tail_at_log(800.0), std::exp(-400.0), 1e-12 * std::exp(-400.0));
  EXPECT_NEAR(par.tail_at_log(std::log(4.0)), 0.5, 1e-15);
}

TEST(Karamata, ParetoHalfExamples) {
  const auto h = HorizonDistribution::pareto(0.5);
  const double r100 = karamata_check(h, 100.0);
  EXPECT_NEAR(r100, 0.95, 0.95 * 5e-7);
  const double r6 = karamata_check(h, 1e6);
  EXPECT_GE(r6, 0.999);
  EXPECT_LE(r6, 1.0);
}

TEST(Karamata, MatchesClosedFormAndIncreasesInX) {
  for (double lambda : {0.2, 0.5, 0.9}) {
    const auto h = HorizonDistribution::pareto(lambda);
    double prev = 0.0;
    for (double x : {2.0, 10.0, 100.0, 1e4, 1e6, 1e9}) {
      const double r = karamata_check(h, x);
      EXPECT_NEAR(r, pareto_karamata(lambda, x), 1e-8) << lambda << " " << x;
      EXPECT_GT(r, prev);
      prev = r;
    }
  }
  // Heavy index: convergence is slow, 1 - 0.9 / x^0.1 at x = 1e6.
  EXPECT_NEAR(karamata_check(HorizonDistribution::pareto(0.9), 1e6), 0.774, 1e-3);
}

TEST(Karamata, CustomTailUsesExactPiecewiseIntegral) {
  std::vector<double> t;
  std::vector<double> tail;
  for (double x = 1.0; x <= 1e6 * 1.0001; x *= 1.5) {
    t.push_back(x);
    tail.push_back(std::pow(x, -0.5));
  }
  const auto h = HorizonDistribution::custom_tail(t, tail, Regime::D2, 0.5);
  const double x = t[20];
  double integral = 1.0;
  for (int i = 1; i <= 20; ++i) integral += 0.5 * (tail[i] + tail[i - 1]) * (t[i] - t[i - 1]);
  EXPECT_NEAR(karamata_check(h, x), integral / (x * tail[20] / 0.5), 1e-10);
}

TEST(Karamata, Errors) {
  EXPECT_THROW(karamata_check(HorizonDistribution::exponential(1.0), 10.0), RegimeError);
  EXPECT_THROW(karamata_check(HorizonDistribution::log_pareto(), 10.0), RegimeError);
  EXPECT_THROW(karamata_check(HorizonDistribution::pareto(0.5), 0.5), ConfigError);
}
