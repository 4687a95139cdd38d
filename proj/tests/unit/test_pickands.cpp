#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "gpsup/errors.hpp"
#include "gpsup/pickands.hpp"

using namespace gpsup;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// E exp(max_j (sqrt2 t_j N - t_j^2)) for the alpha = 2 line B(t) = t N on
// the grid {0, step, ..., S}, by composite Simpson in N.
double line_oracle(double s_horizon, double step) {
  const std::size_t n = static_cast<std::size_t>(std::floor(s_horizon / step + 1e-9)) + 1;
  auto integrand = [&](double z) {
    double best = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
      const double t = step * static_cast<double>(j);
      best = std::max(best, std::numbers::sqrt2 * t * z - t * t);
    }
    return std::exp(best - 0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  };
  const double lo = -12.0;
  const double hi = 12.0;
  const int m = 40000;
  const double h = (hi - lo) / m;
  double sum = integrand(lo) + integrand(hi);
  for (int i = 1; i < m; ++i) sum += (i % 2 ? 4.0 : 2.0) * integrand(lo + i * h);
  return sum * h / 3.0;
}

}  // namespace

TEST(EstimateHOfS, SinglePointGridIsExactlyOne) {
  for (double alpha : {0.5, 1.0, 2.0}) {
    const auto e = estimate_h_of_s(alpha, 0.0, 0.01, 100, RunOptions{1, 1});
    EXPECT_EQ(e.h_of_s, 1.0);
    EXPECT_EQ(e.std_error, 0.0);
    EXPECT_EQ(estimate_h_of_s(alpha, 0.004, 0.01, 100, RunOptions{1, 1}).h_of_s, 1.0);
  }
}

TEST(EstimateHOfS, TwoPointGridClosedForm) {
  // Grid {0, d}: E max(1, exp(sqrt2 B(d) - d^alpha)) = 2 Phi(sqrt(d^alpha / 2)).
  for (double alpha : {0.6, 1.0, 1.5, 2.0}) {
    const double d = 0.05;
    const auto e = estimate_h_of_s(alpha, d, d, 200000, RunOptions{3, 1});
    const double exact = 2.0 * normal_cdf(std::sqrt(std::pow(d, alpha) / 2.0));
    EXPECT_NEAR(e.h_of_s, exact, 4.0 * e.std_error) << alpha;
    EXPECT_GE(e.h_of_s, 1.0);
  }
}

TEST(EstimateHOfS, LineCaseMatchesQuadratureOracle) {
  const auto e = estimate_h_of_s(2.0, 2.0, 0.01, 100000, RunOptions{5, 1});
  const double exact = line_oracle(2.0, 0.01);
  EXPECT_NEAR(e.h_of_s, exact, 4.0 * e.std_error) << "oracle " << exact;
  EXPECT_DOUBLE_EQ(e.h_rate, e.h_of_s / 2.0);
}

TEST(EstimateHOfS, Validation) {
  EXPECT_THROW(estimate_h_of_s(1.0, 4.0, 0.01, 99, RunOptions{}), ConfigError);
  EXPECT_THROW(estimate_h_of_s(1.0, 4.0, 0.06, 1000, RunOptions{}), ConfigError);
  EXPECT_THROW(estimate_h_of_s(0.0, 4.0, 0.01, 1000, RunOptions{}), ConfigError);
  EXPECT_THROW(estimate_h_of_s(2.5, 4.0, 0.01, 1000, RunOptions{}), ConfigError);
}

TEST(EstimateHOfS, IndependentOfThreadCount) {
  const auto a = estimate_h_of_s(1.0, 2.0, 0.01, 3000, RunOptions{9, 1});
  const auto b = estimate_h_of_s(1.0, 2.0, 0.01, 3000, RunOptions{9, 4});
  EXPECT_EQ(a.h_of_s, b.h_of_s);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(EstimatePickands, CommonPathsOrderCells) {
  ExtrapolationPolicy policy;
  policy.n_paths = 4000;
  policy.steps = {0.04, 0.02, 0.01};
  policy.tolerance = 1e9;
  const auto r = estimate_pickands(1.0, policy, RunOptions{21, 1});
  ASSERT_EQ(r.ladder.size(), 3u);
  for (const auto& rung : r.ladder) {
    // Nested grids on common noise: a finer grid never lowers the maximum.
    EXPECT_LE(rung.by_step[0].h_of_s, rung.by_step[1].h_of_s);
    EXPECT_LE(rung.by_step[1].h_of_s, rung.by_step[2].h_of_s);
    EXPECT_GE(rung.by_step[0].h_of_s, 1.0);
  }
  for (std::size_t k = 0; k < 3; ++k) {
    // Larger S covers a superset of the grid.
    EXPECT_LE(r.ladder[0].by_step[k].h_of_s, r.ladder[1].by_step[k].h_of_s);
    EXPECT_LE(r.ladder[1].by_step[k].h_of_s, r.ladder[2].by_step[k].h_of_s);
  }
  EXPECT_TRUE(r.richardson_applied);
  EXPECT_EQ(r.increments.size(), 2u);
  EXPECT_EQ(r.constant, r.increments.back());
}

TEST(EstimatePickands, RichardsonCombinesTheTwoFinestSteps) {
  ExtrapolationPolicy policy;
  policy.n_paths = 2000;
  policy.tolerance = 1e9;
  const auto r = estimate_pickands(1.0, policy, RunOptions{4, 1});
  for (const auto& rung : r.ladder) {
    const double rp = std::sqrt(2.0);
    const double expected =
        (rp * rung.by_step[1].h_of_s - rung.by_step[0].h_of_s) / (rp - 1.0);
    EXPECT_NEAR(rung.h_of_s, expected, 1e-9 * expected);
  }
  const double slope = (r.ladder[2].h_of_s - r.ladder[1].h_of_s) / 4.0;
  EXPECT_NEAR(r.constant, slope, 1e-9);
}

TEST(EstimatePickands, SinglePointLadderFlag) {
  ExtrapolationPolicy policy;
  policy.s_ladder = {4.0};
  policy.n_paths = 1000;
  const auto r = estimate_pickands(1.0, policy, RunOptions{2, 1});
  EXPECT_TRUE(r.single_point_ladder);
  EXPECT_TRUE(r.converged);
  EXPECT_DOUBLE_EQ(r.constant, r.ladder[0].h_rate);
}

TEST(EstimatePickands, NonConvergenceCarriesTheLadder) {
  ExtrapolationPolicy policy;
  policy.n_paths = 1000;
  policy.tolerance = 1e-9;
  try {
    estimate_pickands(1.0, policy, RunOptions{2, 1});
    FAIL() << "expected PickandsConvergenceError";
  } catch (const PickandsConvergenceError& e) {
    EXPECT_EQ(e.result().ladder.size(), 3u);
    EXPECT_FALSE(e.result().converged);
    EXPECT_EQ(e.exit_code(), 3);
  }
}

TEST(EstimatePickands, RateStaysInSanityBand) {
  // The extrapolated slope, at the small-alpha end where the definitional
  // estimator does not saturate. For alpha >= 1.5 the top increment collapses
  // toward zero because the exceedances it needs are never sampled.
  for (double alpha : {0.5, 1.0}) {
    ExtrapolationPolicy policy;
    policy.n_paths = 20000;
    policy.tolerance = 1e9;
    PickandsResult r;
    try {
      r = estimate_pickands(alpha, policy, RunOptions{17, 1});
    } catch (const PickandsConvergenceError& e) {
      r = e.result();
    }
    EXPECT_GE(r.constant, 0.2) << alpha;
    EXPECT_LE(r.constant, 2.0) << alpha;
  }
}

TEST(EstimatePickands, Validation) {
  ExtrapolationPolicy p;
  p.s_ladder = {4.0, 2.0};
  EXPECT_THROW(estimate_pickands(1.0, p, RunOptions{}), ConfigError);
  p = {};
  p.steps = {0.015, 0.01};
  EXPECT_THROW(estimate_pickands(1.0, p, RunOptions{}), ConfigError);
  p = {};
  p.s_ladder = {0.5, 2.0};
  EXPECT_THROW(estimate_pickands(1.0, p, RunOptions{}), ConfigError);
  p = {};
  p.n_paths = 10;
  EXPECT_THROW(estimate_pickands(1.0, p, RunOptions{}), ConfigError);
}

TEST(EstimatePickands, IndependentOfThreadCount) {
  ExtrapolationPolicy policy;
  policy.n_paths = 3000;
  policy.tolerance = 1e9;
  const auto a = estimate_pickands(1.5, policy, RunOptions{5, 1});
  const auto b = estimate_pickands(1.5, policy, RunOptions{5, 3});
  EXPECT_EQ(a.constant, b.constant);
  EXPECT_EQ(a.std_error, b.std_error);
  for (std::size_t i = 0; i < a.ladder.size(); ++i) EXPECT_EQ(a.ladder[i].h_of_s, b.ladder[i].h_of_s);
}

TEST(PickandsCache, RoundTripUpsertAndLookup) {
  const auto path = (std::filesystem::temp_directory_path() / "gpsup_cache_test.csv").string();
  std::filesystem::remove(path);
  auto cache = PickandsCache::load(path);
  EXPECT_TRUE(cache.rows().empty());
  cache.upsert({1.5, 8.0, 0.01, 200000, 0.71, 0.02, 1});
  cache.upsert({1.5, 8.0, 0.01, 200000, 0.70, 0.01, 2});
  cache.upsert({0.5, 8.0, 0.01, 200000, 1.4, 0.05, 1});
  cache.upsert({1.5, 8.0, 0.01, 200000, 0.72, 0.03, 1});  // replaces seed 1
  ASSERT_EQ(cache.rows().size(), 3u);
  cache.save(path);
  const auto loaded = PickandsCache::load(path);
  ASSERT_EQ(loaded.rows().size(), 3u);
  const auto best = loaded.lookup(1.5);
  ASSERT_TRUE(best.has_value());
  EXPECT_EQ(best->h_rate, 0.70);
  EXPECT_EQ(best->seed, 2u);
  EXPECT_FALSE(loaded.lookup(1.2).has_value());
  EXPECT_EQ(resolve_h_alpha(1.5, &loaded), 0.70);
  std::filesystem::remove(path);
}

TEST(PickandsCache, ResolveUsesClosedFormsFirst) {
  EXPECT_EQ(resolve_h_alpha(1.0, nullptr), 1.0);
  EXPECT_NEAR(resolve_h_alpha(2.0, nullptr), 1.0 / std::sqrt(std::numbers::pi), 1e-15);
  EXPECT_THROW(resolve_h_alpha(1.5, nullptr), DependencyError);
  PickandsCache empty;
  EXPECT_THROW(resolve_h_alpha(0.7, &empty), DependencyError);
}
