#include "suppsize/estimator.hpp"
#include "suppsize/verify.hpp"

#include <gtest/gtest.h>

#include <boost/math/distributions/poisson.hpp>

#include <cmath>

using namespace suppsize;

namespace {

// l = 1/4, r = 3/4, d = 1, m = 8: psi(0) = 2, so delta = 1/2 and
// P(x) = -(1/2)(2 - 4x) = 2x - 1.
EstimatorKernel linear_kernel() {
  return build_kernel(100, 0.25, {Rational(1, 4), Rational(3, 4), 1, BigInt(8), ParamMode::empirical});
}

}  // namespace

TEST(Estimator, LinearKernelByHand) {
  const auto k = linear_kernel();
  EXPECT_EQ(k.delta(), Rational(1, 2));
  ASSERT_EQ(k.a_coeffs().size(), 1u);
  EXPECT_EQ(k.a_coeffs()[0], 2);
  EXPECT_EQ(k.f_table()[1], Rational(1, 4));
  EXPECT_EQ(k.f_table()[0], -1);
  EXPECT_DOUBLE_EQ(k.f(7), 0.0);
  EXPECT_DOUBLE_EQ(k.threshold(), 112.5);
  EXPECT_NEAR(f_value_bound(k, 1), 0.75, 1e-14);  // formed in log space
  for (double x : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9}) EXPECT_NEAR(p_poly_eval(k, x), 2 * x - 1, 1e-14) << x;
  for (double x : {0.05, 0.2, 0.4, 0.6, 1.0}) {
    EXPECT_NEAR(q_eval(k, x), 1 + std::exp(-8 * x) * (2 * x - 1), 1e-14) << x;
    EXPECT_NEAR(one_minus_q_abs(k, x), std::exp(-8 * x) * std::fabs(2 * x - 1), 1e-14) << x;
  }
}

TEST(Estimator, StatisticSumsOverFingerprint) {
  const auto k = linear_kernel();
  SampleHistogram h;
  h.add(10);
  h.add(11);
  EXPECT_DOUBLE_EQ(statistic(k, h), 2.5);
  h.add(12, 2);
  EXPECT_DOUBLE_EQ(statistic(k, h), 3.5);  // 1 + f(2) = 1 beyond the degree
  EXPECT_DOUBLE_EQ(statistic(k, SampleHistogram{}), 0.0);
}

TEST(Estimator, DirectFValuesEqualCoefficientRoute) {
  for (const auto& spec : verification_kernels()) {
    if (spec.params.d > 60) continue;
    const auto k = build_kernel(spec.n, spec.eps, spec.params);
    EXPECT_EQ(f_values_direct(k.interval(), k.d(), k.m(), k.delta()), k.f_table()) << spec.name;
  }
}

TEST(Estimator, NormalisationIsExact) {
  const auto k = build_kernel(1000, 0.1, {Rational(1, 2000), Rational(7, 1000), 9, BigInt(9000), ParamMode::empirical});
  EXPECT_EQ(k.delta() * chebyshev::eval_recurrence(k.d(), psi(k.interval(), Rational(0))), 1);
  EXPECT_NEAR(k.normalization_log(), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(p_poly_eval(k, 0.0), -1.0);
  Rational sum = 0, pw = 1;
  for (const auto& a : k.a_coeffs()) sum += a * (pw *= k.interval().ell());
  EXPECT_EQ(sum - 1, -k.delta() * chebyshev::eval_recurrence(k.d(), Rational(1)));
}

TEST(Estimator, QShape) {
  const auto k = build_kernel(1000, 0.25, {Rational(1, 1000), Rational(1, 100), 11, BigInt(6723), ParamMode::empirical});
  EXPECT_EQ(q_eval(k, 0.0), 0.0);
  EXPECT_EQ(q_star_eval(k, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(q_star_eval(k, 0.5), 1.0 - k.delta_d());
  double prev = 0.0;
  for (int i = 1; i <= 200; ++i) {
    const double x = k.interval().ell_d() * i / 200.0;
    const double q = q_eval(k, x);
    EXPECT_GT(q, prev);
    EXPECT_LE(q_star_eval(k, x), q + 1e-15);
    prev = q;
  }
  EXPECT_THROW(q_eval(k, -1e-3), std::domain_error);
}

TEST(Estimator, CountMomentsMatchPoissonOracle) {
  const auto k = build_kernel(1000, 0.25, {Rational(1, 1000), Rational(1, 100), 11, BigInt(6723), ParamMode::empirical});
  for (double mu : {0.0, 0.3, 2.0, 9.0, 40.0}) {
    double e = 0, e2 = 0;
    if (mu == 0.0) {
      e = 0, e2 = 0;
    } else {
      const boost::math::poisson_distribution<double> poi(mu);
      for (unsigned j = 0; j < 400; ++j) {
        const double w = boost::math::pdf(poi, j);
        const double v = 1.0 + k.f(j);
        e += w * v;
        e2 += w * v * v;
      }
    }
    const auto m = poisson_count_moments(k, mu);
    EXPECT_NEAR(m.mean, e, 1e-12 * std::max(1.0, std::fabs(e))) << mu;
    EXPECT_NEAR(m.variance, e2 - e * e, 1e-9 * std::max(1.0, e2)) << mu;
    if (mu > 0) EXPECT_NEAR(m.mean, q_eval(k, mu / k.m_d()), 1e-9) << mu;
  }
}

TEST(Estimator, ExpectedStatisticOfUniformIsNearSupport) {
  const auto k = build_kernel(100, 0.25, {Rational(1, 200), Rational(1, 40), 6, BigInt(1650), ParamMode::empirical});
  const auto u = uniform_distribution(100);
  EXPECT_NEAR(expected_statistic(k, u), 100.0, 100.0 * k.delta_d());
  EXPECT_GT(statistic_variance(k, u), 0.0);
}

TEST(Estimator, EnvelopeInvariantsHoldOnShippedKernels) {
  for (const auto& spec : verification_kernels()) {
    const auto k = build_kernel(spec.n, spec.eps, spec.params);
    for (const auto& r : envelope_invariants(k, spec.name, 500))
      EXPECT_TRUE(r.passed) << r.check << " on " << r.subject << ": " << r.witness;
  }
}

TEST(Estimator, DoubledDeltaIsCaught) {
  const auto spec = verification_kernels().front();
  const auto bad = build_kernel(spec.n, spec.eps, spec.params).with_scaled_delta(2);
  int failed = 0;
  for (const auto& r : envelope_invariants(bad, "faulty", 500)) failed += !r.passed;
  EXPECT_GT(failed, 0);
}

TEST(Estimator, BuildRejectsBadInput) {
  const ParamSet ok{Rational(1, 4), Rational(3, 4), 1, BigInt(8), ParamMode::empirical};
  EXPECT_THROW(build_kernel(0, 0.25, ok), std::invalid_argument);
  EXPECT_THROW(build_kernel(100, 1.0, ok), std::invalid_argument);
  auto p = ok;
  p.r = Rational(1, 8);
  EXPECT_THROW(build_kernel(100, 0.25, p), std::invalid_argument);
  p = ok;
  p.m = 0;
  EXPECT_THROW(build_kernel(100, 0.25, p), std::invalid_argument);
  p = ok;
  p.d = 600;
  EXPECT_THROW(build_kernel(100, 0.25, p), KernelBuildError);
  EXPECT_THROW(f_value_bound(linear_kernel(), 2), std::out_of_range);
}
