#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "gpsup/errors.hpp"
#include "gpsup/gauss_sim.hpp"
#include "gpsup/parallel.hpp"

using namespace gpsup;

namespace {

// Direct O(M^2) transform of the scaled noise, accumulated in long double.
void dense_synthesize(const CirculantEmbedding& emb, const std::vector<double>& noise,
                      std::vector<double>& first, std::vector<double>& second) {
  const std::size_t m = emb.circulant_size();
  const auto scale = emb.scale();
  for (std::size_t j = 0; j < first.size(); ++j) {
    std::complex<long double> acc = 0.0L;
    for (std::size_t k = 0; k < m; ++k) {
      const long double angle = -2.0L * std::numbers::pi_v<long double> *
                                static_cast<long double>((j * k) % m) / static_cast<long double>(m);
      const std::complex<long double> w(scale[k] * noise[2 * k], scale[k] * noise[2 * k + 1]);
      acc += w * std::complex<long double>(std::cos(angle), std::sin(angle));
    }
    first[j] = static_cast<double>(acc.real());
    second[j] = static_cast<double>(acc.imag());
  }
}

}  // namespace

TEST(GridSpec, Validation) {
  EXPECT_THROW((GridSpec{0.0, 4}.validate()), ConfigError);
  EXPECT_THROW((GridSpec{0.1, 0}.validate()), ConfigError);
  EXPECT_NO_THROW((GridSpec{0.1, 1}.validate()));
  EXPECT_DOUBLE_EQ((GridSpec{0.25, 5}.duration()), 1.0);
}

TEST(PlanEmbedding, CirculantSizeIsMinimalPowerOfTwo) {
  EXPECT_EQ(minimal_circulant_size(1), 2u);
  EXPECT_EQ(minimal_circulant_size(2), 2u);
  EXPECT_EQ(minimal_circulant_size(3), 4u);
  EXPECT_EQ(minimal_circulant_size(8), 16u);
  EXPECT_EQ(minimal_circulant_size(9), 16u);
  EXPECT_EQ(minimal_circulant_size(10), 32u);
}

TEST(PlanEmbedding, OuIsNonnegativeDefinite) {
  const auto rec = plan_embedding(CovarianceModel::stable_exp(1.0, 1.0), GridSpec{0.1, 1024});
  EXPECT_EQ(rec.circulant_size, 2048u);
  EXPECT_GE(rec.min_eigenvalue, 0.0);
  EXPECT_EQ(rec.clipped_mass, 0.0);
  EXPECT_TRUE(rec.exact());
}

TEST(PlanEmbedding, TwoPointClosedForm) {
  const auto model = CovarianceModel::stable_exp(1.5, 0.7);
  const auto rec = plan_embedding(model, GridSpec{0.3, 2});
  EXPECT_EQ(rec.circulant_size, 2u);
  EXPECT_NEAR(rec.min_eigenvalue, 1.0 - model.evaluate(0.3), 1e-15);
}

TEST(PlanEmbedding, GaussianCovarianceClipsOrFailsLoudly) {
  const auto model = CovarianceModel::stable_exp(2.0, 1.0);
  try {
    const auto rec = plan_embedding(model, GridSpec{0.05, 4096});
    EXPECT_LE(rec.clipped_mass, kMaxClippedMass);
    EXPECT_GE(rec.circulant_size, 8190u);
  } catch (const EmbeddingError& e) {
    EXPECT_NE(std::string(e.what()).find("stable_exp"), std::string::npos);
  }
}

TEST(PlanEmbedding, FailureNamesModelAndGrid) {
  // The 3x3 Toeplitz matrix of (1, 0.9, -0.9) is indefinite, so no circulant size helps.
  const auto bad = CovarianceModel::custom({0.0, 0.1, 0.2}, {1.0, 0.9, -0.9}, 1.0, 1.0);
  try {
    CirculantEmbedding(model_lag_covariance(bad, 0.1), 3, "custom on grid(step=0.1)", 64);
    FAIL() << "expected EmbeddingError";
  } catch (const EmbeddingError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("custom"), std::string::npos) << what;
    EXPECT_NE(what.find("step=0.1"), std::string::npos) << what;
  }
}

TEST(PathSampler, MarginalVarianceAndLagCorrelation) {
  for (double alpha : {0.5, 1.0, 1.9}) {
    const auto model = CovarianceModel::stable_exp(alpha, 1.0);
    const GridSpec grid{0.2, 2};
    PathSampler sampler(model, grid);
    MomentAccumulator x0;
    MomentAccumulator prod;
    constexpr int n = 50000;
    for (int i = 0; i < n; ++i) {
      RandomStream s(5, static_cast<std::uint64_t>(i));
      const auto [a, b] = sampler.sample_pair(s);
      for (const auto* p : {&a, &b}) {
        x0.add(p->values[0] * p->values[0]);
        prod.add(p->values[0] * p->values[1]);
      }
    }
    EXPECT_NEAR(x0.mean(), 1.0, 3.5 * x0.standard_error()) << alpha;
    EXPECT_NEAR(prod.mean(), model.evaluate(0.2), 3.5 * prod.standard_error()) << alpha;
  }
}

TEST(PathSampler, DeterministicGivenStream) {
  const auto model = CovarianceModel::stable_exp(1.0, 1.0);
  const GridSpec grid{0.01, 300};
  RandomStream s1(77, 3);
  RandomStream s2(77, 3);
  const auto a = sample_path(model, grid, s1);
  const auto b = sample_path(model, grid, s2);
  EXPECT_EQ(a.values, b.values);
}

TEST(PathSampler, RunningMaxAndLength) {
  const auto model = CovarianceModel::stable_exp(1.2, 2.0);
  const GridSpec grid{0.03, 257};
  PathSampler sampler(model, grid);
  for (std::uint64_t i = 0; i < 50; ++i) {
    RandomStream s(1, i);
    const auto p = sampler.sample(s);
    ASSERT_EQ(p.values.size(), grid.n_points);
    EXPECT_EQ(p.running_max, *std::max_element(p.values.begin(), p.values.end()));
  }
}

TEST(CirculantEmbedding, OddInItsNoise) {
  const auto model = CovarianceModel::stable_exp(1.0, 1.0);
  CirculantEmbedding emb(model_lag_covariance(model, 0.05), 40, "ou");
  RandomStream s(3, 0);
  std::vector<double> noise(emb.noise_size());
  s.fill_normal(noise);
  std::vector<double> neg(noise);
  for (double& z : neg) z = -z;
  std::vector<double> a(40), b(40), na(40), nb(40);
  SimWorkspace work;
  emb.synthesize(noise, a, b, work);
  emb.synthesize(neg, na, nb, work);
  for (std::size_t j = 0; j < a.size(); ++j) {
    EXPECT_EQ(na[j], -a[j]);
    EXPECT_EQ(nb[j], -b[j]);
  }
}

TEST(CirculantEmbedding, SampleEqualsSynthesizeOnStreamNoise) {
  const auto model = CovarianceModel::stable_exp(0.8, 1.5);
  CirculantEmbedding emb(model_lag_covariance(model, 0.1), 20, "m");
  RandomStream s1(4, 9);
  RandomStream s2(4, 9);
  std::vector<double> noise(emb.noise_size());
  s1.fill_normal(noise);
  std::vector<double> a(20), b(20), c(20), d(20);
  SimWorkspace work;
  emb.synthesize(noise, a, b, work);
  emb.sample(s2, c, d, work);
  EXPECT_EQ(a, c);
  EXPECT_EQ(b, d);
}

TEST(CirculantEmbedding, MatchesDenseTransformPathwise) {
  const auto model = CovarianceModel::stable_exp(1.0, 1.0);
  CirculantEmbedding emb(model_lag_covariance(model, 0.125), 33, "ou");
  SimWorkspace work;
  for (std::uint64_t i = 0; i < 20; ++i) {
    RandomStream s(8, i);
    std::vector<double> noise(emb.noise_size());
    s.fill_normal(noise);
    std::vector<double> a(33), b(33), ra(33), rb(33);
    emb.synthesize(noise, a, b, work);
    dense_synthesize(emb, noise, ra, rb);
    for (std::size_t j = 0; j < a.size(); ++j) {
      EXPECT_NEAR(a[j], ra[j], 1e-12 * std::max(1.0, std::fabs(ra[j])));
      EXPECT_NEAR(b[j], rb[j], 1e-12 * std::max(1.0, std::fabs(rb[j])));
    }
  }
}

TEST(CirculantEmbedding, RejectsOversizedOutput) {
  const auto model = CovarianceModel::stable_exp(1.0, 1.0);
  CirculantEmbedding emb(model_lag_covariance(model, 0.1), 5, "ou");
  std::vector<double> a(emb.capacity() + 1);
  SimWorkspace work;
  RandomStream s(1, 1);
  EXPECT_THROW(emb.sample(s, a, {}, work), ConfigError);
}

TEST(Fbm, BrownianIncrementsUncorrelated) {
  const GridSpec grid{0.01, 3};
  FbmSampler fbm(0.5, grid);
  MomentAccumulator lag1;
  MomentAccumulator var;
  for (std::uint64_t i = 0; i < 50000; ++i) {
    RandomStream s(2, i);
    const auto [a, b] = fbm.sample_pair(s);
    for (const auto* p : {&a, &b}) {
      const double d1 = p->values[1] - p->values[0];
      const double d2 = p->values[2] - p->values[1];
      lag1.add(d1 * d2 / 0.01);
      var.add(d1 * d1 / 0.01);
      ASSERT_EQ(p->values[0], 0.0);
    }
  }
  EXPECT_NEAR(lag1.mean(), 0.0, 3.5 * lag1.standard_error());
  EXPECT_NEAR(var.mean(), 1.0, 3.5 * var.standard_error());
}

TEST(Fbm, HurstOneIsALine) {
  const GridSpec grid{0.1, 11};
  RandomStream s(6, 6);
  const auto p = sample_fbm(1.0, grid, s);
  const double slope = p.values[1] / 0.1;
  for (std::size_t j = 0; j < p.values.size(); ++j)
    EXPECT_NEAR(p.values[j], slope * 0.1 * static_cast<double>(j), 1e-14);
  RandomStream s2(6, 6);
  EXPECT_NEAR(slope, s2.normal(), 1e-12);
}

TEST(Fbm, VarianceScalesAsPowerLaw) {
  for (double hurst : {0.3, 0.75}) {
    const GridSpec grid{0.05, 41};
    FbmSampler fbm(hurst, grid);
    std::vector<MomentAccumulator> var(grid.n_points);
    for (std::uint64_t i = 0; i < 50000; ++i) {
      RandomStream s(12, i);
      const auto [a, b] = fbm.sample_pair(s);
      for (std::size_t j = 0; j < grid.n_points; ++j) {
        var[j].add(a.values[j] * a.values[j]);
        var[j].add(b.values[j] * b.values[j]);
      }
    }
    for (std::size_t j : {5u, 20u, 40u}) {
      const double t = 0.05 * static_cast<double>(j);
      EXPECT_NEAR(var[j].mean(), std::pow(t, 2.0 * hurst), 3.5 * var[j].standard_error())
          << "hurst=" << hurst << " t=" << t;
    }
  }
}

TEST(Fbm, SinglePointGridIsZero) {
  RandomStream s(1, 1);
  const auto p = sample_fbm(0.5, GridSpec{0.01, 1}, s);
  ASSERT_EQ(p.values.size(), 1u);
  EXPECT_EQ(p.values[0], 0.0);
}

TEST(Fbm, RejectsHurstOutOfRange) {
  EXPECT_THROW(FbmSampler(0.0, GridSpec{0.01, 10}), ConfigError);
  EXPECT_THROW(FbmSampler(1.2, GridSpec{0.01, 10}), ConfigError);
}

TEST(WritePathCsv, TwoColumns) {
  PathSample p{GridSpec{0.5, 3}, {0.0, 1.0, -0.25}, 1.0};
  std::ostringstream os;
  write_path_csv(p, os);
  EXPECT_EQ(os.str(), "t,x\n0,0\n0.5,1\n1,-0.25\n");
}
