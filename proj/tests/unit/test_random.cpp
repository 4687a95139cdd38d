#include <gtest/gtest.h>

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <vector>

#include "gpsup/parallel.hpp"
#include "gpsup/random.hpp"

using gpsup::normal_quantile;
using gpsup::RandomStream;

namespace {

double reference_quantile(double p) {
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

}  // namespace

TEST(NormalQuantile, MatchesBoostAcrossTheUnitInterval) {
  std::vector<double> probes{1e-300, 1e-100, 1e-20, 1e-10, 1e-5, 0.001, 0.02425, 0.1,
                             0.3,    0.425,  0.5,   0.575, 0.7,  0.9,   0.97575, 0.999};
  for (double p : probes) {
    const double ref = reference_quantile(p);
    EXPECT_NEAR(normal_quantile(p), ref, 1e-14 * std::max(1.0, std::fabs(ref))) << "p=" << p;
  }
  for (int i = 1; i < 1000; ++i) {
    const double p = i / 1000.0;
    const double ref = reference_quantile(p);
    EXPECT_NEAR(normal_quantile(p), ref, 1e-14 * std::max(1.0, std::fabs(ref))) << "p=" << p;
  }
}

TEST(NormalQuantile, OddAroundOneHalf) {
  // q = 1 - p is rounded; 1 - q is exact, so the pair (1 - q, q) is symmetric.
  for (double p : {1e-12, 1e-6, 0.01, 0.2, 0.4999}) {
    const double q = 1.0 - p;
    EXPECT_NEAR(normal_quantile(1.0 - q), -normal_quantile(q), 1e-12) << p;
  }
  EXPECT_EQ(normal_quantile(0.5), 0.0);
}

TEST(RandomStream, SameSeedAndStreamReproduce) {
  RandomStream a(42, 7);
  RandomStream b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.uniform(), b.uniform());
}

TEST(RandomStream, DistinctStreamsDiffer) {
  RandomStream a(42, 7);
  RandomStream b(42, 8);
  RandomStream c(43, 7);
  int same_b = 0;
  int same_c = 0;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    same_b += x == b.uniform();
    same_c += x == c.uniform();
  }
  EXPECT_EQ(same_b, 0);
  EXPECT_EQ(same_c, 0);
}

TEST(RandomStream, UniformIsOpenInterval) {
  RandomStream s(1, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RandomStream, NormalMoments) {
  RandomStream s(3, 1);
  gpsup::MomentAccumulator acc;
  gpsup::MomentAccumulator fourth;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    acc.add(z);
    fourth.add(z * z * z * z);
  }
  EXPECT_NEAR(acc.mean(), 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(acc.variance(), 1.0, 4.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(fourth.mean(), 3.0, 4.0 * std::sqrt(96.0 / n));
}

TEST(RandomStream, FillNormalMatchesScalarDraws) {
  RandomStream a(9, 2);
  RandomStream b(9, 2);
  std::vector<double> v(64);
  a.fill_normal(v);
  for (double x : v) EXPECT_EQ(x, b.normal());
}
