#include "suppsize/simulate.hpp"

#include <gtest/gtest.h>

#include <boost/math/distributions/poisson.hpp>

#include <cmath>
#include <numeric>

using namespace suppsize;

TEST(Random, DeriveSeedIsDeterministicAndPathSensitive) {
  EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_NE(derive_seed(1, {2}), derive_seed(2, {2}));
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);  // reference splitmix64 output for state 0
}

TEST(Random, UniformBelowStaysInRange) {
  Rng rng(5);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 70000; ++i) ++hits[uniform_below(rng, 7)];
  for (int h : hits) EXPECT_NEAR(h, 10000, 400);
}

class PoissonLaw : public ::testing::TestWithParam<double> {};

TEST_P(PoissonLaw, MatchesPmf) {
  const double mu = GetParam();
  const int draws = 40000;
  Rng rng(static_cast<std::uint64_t>(mu * 1000) + 1);
  std::map<std::uint64_t, int> hist;
  double sum = 0, sq = 0;
  for (int i = 0; i < draws; ++i) {
    const auto x = poisson(rng, mu);
    ++hist[x];
    sum += static_cast<double>(x);
    sq += static_cast<double>(x) * static_cast<double>(x);
  }
  const double mean = sum / draws;
  const double var = sq / draws - mean * mean;
  EXPECT_NEAR(mean, mu, 5 * std::sqrt(mu / draws));
  EXPECT_NEAR(var / mu, 1.0, 5 * std::sqrt(2.0 / draws) + 0.01);
  const boost::math::poisson_distribution<double> law(mu);
  for (const auto& [k, c] : hist) {
    const double p = boost::math::pdf(law, static_cast<double>(k));
    if (p < 0.01) continue;
    EXPECT_NEAR(static_cast<double>(c) / draws, p, 5 * std::sqrt(p * (1 - p) / draws)) << "mu=" << mu << " k=" << k;
  }
}

// Both sides of the Knuth/PTRS switch.
INSTANTIATE_TEST_SUITE_P(Means, PoissonLaw, ::testing::Values(0.3, 2.5, 9.5, 10.5, 40.0, 700.0));

TEST(Random, PoissonOfZeroIsZero) {
  Rng rng(1);
  EXPECT_EQ(poisson(rng, 0.0), 0u);
}

TEST(Histogram, Fingerprint) {
  const auto h = SampleHistogram::from_ids(std::vector<Id>{4, 4, 9, 9, 2, 7, 7, 7});
  const std::map<std::uint64_t, std::uint64_t> want{{1, 1}, {2, 2}, {3, 1}};
  EXPECT_EQ(h.fingerprint(), want);
  EXPECT_EQ(h.total(), 8u);
  EXPECT_EQ(h.distinct(), 4u);
}

TEST(Distributions, EffectiveSupportAndDistance) {
  EXPECT_EQ(eff_support(uniform_distribution(10), 0.25), 8);
  EXPECT_EQ(eff_support(uniform_distribution(1), 0.25), 1);
  EXPECT_EQ(tv_distance_to_supportsize(uniform_distribution(10), 8), Rational(1, 5));
  EXPECT_EQ(tv_distance_to_supportsize(uniform_distribution(10), 10), 0);
  const auto far = far_uniform_distribution(100, Rational(1, 4));
  EXPECT_EQ(far.size(), 134u);
  EXPECT_EQ(tv_distance_to_supportsize(far, 100), Rational(34, 134));
}

TEST(Distributions, EffectiveSupportIsTheDistanceThreshold) {
  // eff(p, eps) is the least k with tv(p, k) <= eps.
  for (const auto& d : {zipf_distribution(50, 1.1), two_level_distribution(30, 70, Rational(1, 3)), uniform_distribution(17)})
    for (double eps : {0.05, 0.2, 0.3}) {
      const auto k = eff_support(d, eps);
      EXPECT_LE(tv_distance_to_supportsize(d, k), rational_from_double(eps));
      EXPECT_GT(tv_distance_to_supportsize(d, k - 1), rational_from_double(eps));
    }
}

TEST(Distributions, FamiliesSumToOne) {
  for (const auto& d : {uniform_distribution(13), zipf_distribution(40, 0.7), two_level_distribution(3, 5, Rational(2, 7)),
                        far_uniform_distribution(20, Rational(1, 10), Rational(1, 20))}) {
    Rational total = 0;
    for (const auto& a : d.atoms()) total += a.mass;
    EXPECT_EQ(total, 1);
    EXPECT_NEAR(d.cumulative().back(), 1.0, 1e-12);
  }
  const auto t = two_level_distribution(2, 4, Rational(1, 5));
  EXPECT_EQ(t.atoms()[0].mass, Rational(2, 5));
  EXPECT_EQ(t.atoms()[5].mass, Rational(1, 20));
  EXPECT_THROW(two_level_distribution(0, 3, Rational(1, 2)), std::invalid_argument);
  EXPECT_THROW(uniform_distribution(0), std::invalid_argument);
}

TEST(Sampling, PerAtomAndLiteralPoissonizationAgree) {
  const SparseDistribution d({{1, Rational(1, 2)}, {2, Rational(1, 4)}, {3, Rational(1, 8)}, {4, Rational(1, 8)}});
  const double m = 16;
  const int reps = 20000;
  for (const auto method : {PoissonizationMethod::per_atom, PoissonizationMethod::literal}) {
    std::vector<double> s(5, 0), s2(5, 0);
    double cross = 0;
    for (int i = 0; i < reps; ++i) {
      const auto h = sample_poissonized(d, m, derive_seed(77, {static_cast<std::uint64_t>(method), static_cast<std::uint64_t>(i)}), method);
      std::vector<double> c(5, 0);
      for (const auto& [id, k] : h.counts()) c[static_cast<std::size_t>(id)] = static_cast<double>(k);
      for (int a = 1; a <= 4; ++a) {
        s[a] += c[a];
        s2[a] += c[a] * c[a];
      }
      cross += c[1] * c[2];
    }
    for (int a = 1; a <= 4; ++a) {
      const double mu = m * d.masses()[a - 1];
      const double mean = s[a] / reps;
      EXPECT_NEAR(mean, mu, 5 * std::sqrt(mu / reps));
      EXPECT_NEAR((s2[a] / reps - mean * mean) / mu, 1.0, 0.06);
    }
    // Independent counts: Cov(N_1, N_2) = 0.
    const double cov = cross / reps - (s[1] / reps) * (s[2] / reps);
    EXPECT_NEAR(cov, 0.0, 5 * std::sqrt(8.0 * 4.0 / reps));
  }
}

TEST(MonteCarlo, ThreadCountDoesNotChangeTheReport) {
  const TesterConfig cfg{100, 0.25, TesterMode::empirical, SamplingMode::poissonized};
  const auto d = two_level_distribution(60, 40, Rational(1, 5));
  const auto a = monte_carlo(cfg, d, 64, 123, 1);
  const auto b = monte_carlo(cfg, d, 64, 123, 4);
  EXPECT_EQ(a.accept_count, b.accept_count);
  EXPECT_EQ(a.mean_stat, b.mean_stat);
  EXPECT_EQ(a.var_stat, b.var_stat);
  EXPECT_EQ(a.max_samples, b.max_samples);
  const auto c = monte_carlo(cfg, d, 64, 124, 1);
  EXPECT_NE(a.mean_stat, c.mean_stat);
}

TEST(MonteCarlo, ReportFieldsOnChebyshevPath) {
  const TesterConfig cfg{100, 0.25, TesterMode::empirical, SamplingMode::poissonized};
  const auto rep = monte_carlo(cfg, uniform_distribution(100), 100, 9);
  EXPECT_EQ(rep.path, "chebyshev");
  EXPECT_EQ(rep.trials, 100);
  EXPECT_EQ(rep.accept_count, 100);
  EXPECT_NEAR(rep.analytic_mean, 100.0, 1e-3);
  EXPECT_DOUBLE_EQ(rep.analytic_var_bound, 0.0625 * 10000 / 64.0);
  EXPECT_FALSE(std::isnan(rep.exact_var));
  EXPECT_NEAR(rep.mean_samples, 1650.0, 30.0);
}

TEST(MonteCarlo, NaivePathHasNoAnalyticMean) {
  const TesterConfig cfg{100, 0.25, TesterMode::naive};
  const auto rep = monte_carlo(cfg, uniform_distribution(5), 10, 9);
  EXPECT_EQ(rep.path, "naive");
  EXPECT_TRUE(std::isnan(rep.analytic_mean));
  EXPECT_EQ(rep.accept_rate(), 1.0);
  EXPECT_THROW(monte_carlo(cfg, uniform_distribution(5), 0, 9), std::invalid_argument);
}

TEST(MonteCarlo, FixedSamplingTracksPoissonizedMean) {
  // The fixed run is a prefix of a Poi(m) draw, so its mean matches unless Poi(m) > 1.1 m.
  const auto d = zipf_distribution(120, 0.8);
  const TesterConfig fixed{100, 0.25, TesterMode::empirical, SamplingMode::fixed};
  const auto rep = monte_carlo(fixed, d, 300, 31);
  const double se = std::sqrt(std::max(rep.var_stat, rep.exact_var) / 300);
  EXPECT_NEAR(rep.mean_stat, rep.analytic_mean, 4 * se);
  EXPECT_EQ(rep.max_samples, 1815u);
}
