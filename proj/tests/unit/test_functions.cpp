#include "suppsize/functions.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <memory>

using namespace suppsize;

namespace {

const SparseDistribution four_atoms({{1, Rational(2, 5)}, {2, Rational(3, 10)}, {3, Rational(1, 5)}, {4, Rational(1, 10)}});

std::shared_ptr<const FunctionDistributionPair> pair_of(std::set<Id> ones, const SparseDistribution& d = four_atoms) {
  return std::make_shared<const FunctionDistributionPair>(FunctionDistributionPair{std::move(ones), d});
}

DistTester empirical_tester(std::int64_t n, double eps) {
  auto provider = std::make_shared<KernelProvider>(TesterMode::empirical);
  return [=](Sampler& s) { return support_size_tester(n, eps, s, *provider); };
}

}  // namespace

TEST(Functions, FarnessByHand) {
  const auto p = pair_of({1, 3, 4});
  EXPECT_EQ(farness_from_class(*p, 3), 0);
  EXPECT_EQ(farness_from_class(*p, 2), Rational(1, 10));
  EXPECT_EQ(farness_from_class(*p, 1), Rational(3, 10));
  EXPECT_EQ(farness_from_class(*p, 0), Rational(7, 10));
  EXPECT_EQ(farness_from_class(*pair_of({}), 0), 0);
  EXPECT_EQ(farness_from_class(*pair_of({7, 8}), 0), 0);  // ones outside the support weigh nothing
}

TEST(Functions, CollapsedDistributionByHand) {
  const auto c = collapsed_distribution(*pair_of({1, 3}), 1);
  ASSERT_EQ(c.size(), 2u);
  std::map<Id, Rational> m;
  for (const auto& a : c.atoms()) m[a.id] = a.mass;
  EXPECT_EQ(m[1], Rational(4, 5));
  EXPECT_EQ(m[3], Rational(1, 5));

  // z outside the support takes exactly the zero mass.
  const auto c2 = collapsed_distribution(*pair_of({2, 9}), 9);
  std::map<Id, Rational> m2;
  for (const auto& a : c2.atoms()) m2[a.id] = a.mass;
  EXPECT_EQ(m2[9], Rational(7, 10));
  EXPECT_EQ(m2[2], Rational(3, 10));
  EXPECT_THROW(collapsed_distribution(*pair_of({1}), 2), std::invalid_argument);
}

TEST(Functions, CollapsedPairInClassHasSmallSupport) {
  // At most n ones in the support: p^(z) lives on at most n ids.
  for (std::set<Id> ones : {std::set<Id>{1}, std::set<Id>{2, 4}, std::set<Id>{1, 2, 3}})
    for (Id z : ones) {
      const auto p = pair_of(ones);
      EXPECT_EQ(tv_distance_to_supportsize(collapsed_distribution(*p, z), static_cast<std::int64_t>(ones.size())), 0);
    }
}

TEST(Functions, PairSamplerLabelsConsistently) {
  PairSampler s(pair_of({2, 4}), 11);
  const auto sample = s.draw(5000);
  EXPECT_TRUE(sample.consistent());
  EXPECT_EQ(s.samples_drawn(), 5000u);
  int ones = 0;
  for (const auto& p : sample.pairs) {
    EXPECT_EQ(p.label, (p.id == 2 || p.id == 4) ? 1 : 0);
    ones += p.label;
  }
  EXPECT_NEAR(ones / 5000.0, 0.4, 4 * std::sqrt(0.24 / 5000));
}

TEST(Functions, LabeledSampleConsistencyCheck) {
  LabeledSample s{{{1, 0}, {2, 1}, {1, 0}}};
  EXPECT_TRUE(s.consistent());
  s.pairs.push_back({2, 0});
  EXPECT_FALSE(s.consistent());
}

TEST(Functions, CollapsingSamplerRewritesZeros) {
  PairSampler inner(pair_of({1, 3}), 12);
  CollapsingSampler c(inner, 3);
  const auto ids = c.draw(1000);
  for (Id id : ids) EXPECT_TRUE(id == 1 || id == 3);
  EXPECT_EQ(c.samples_drawn(), 1000u);
  EXPECT_GT(c.replaced(), 0u);
}

TEST(Functions, AllZeroFunctionAlwaysAccepts) {
  const auto tester = empirical_tester(100, 0.25);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    PairSampler s(pair_of({}, uniform_distribution(1000)), seed);
    ReductionTrace tr;
    const auto v = fun_tester_from_dist_tester(tester, 0.25, 0.05, s, &tr);
    EXPECT_EQ(v.decision, Decision::Accept);
    EXPECT_EQ(v.path, "no-ones");
    EXPECT_FALSE(tr.saw_one);
    EXPECT_EQ(v.samples_drawn, phase1_sample_size(0.25, 0.05));
  }
}

TEST(Functions, PhaseOneSize) {
  EXPECT_EQ(phase1_sample_size(0.25, 0.05), 15u);  // ln 40 / 0.25 = 14.76
  EXPECT_EQ(phase1_sample_size(0.1, 0.5), 14u);    // ln 4 / 0.1 = 13.86
}

TEST(Functions, ReductionTraceRecordsZ) {
  const auto tester = empirical_tester(100, 0.25);
  std::set<Id> ones;
  for (Id i = 1; i <= 100; ++i) ones.insert(i);
  PairSampler s(pair_of(ones, uniform_distribution(200)), 3);
  ReductionTrace tr;
  fun_tester_from_dist_tester(tester, 0.25, 0.05, s, &tr);
  ASSERT_TRUE(tr.saw_one);  // P(no one in 15 draws) = 2^-15
  ASSERT_TRUE(tr.z.has_value());
  EXPECT_GE(*tr.z, 1);
  EXPECT_LE(*tr.z, 100);
  EXPECT_GT(tr.replaced, 0u);
  EXPECT_EQ(s.samples_drawn(), tr.phase1_samples + tr.phase2_samples);
}

TEST(Functions, FarPairIsRejected) {
  // 134 ones of mass 1/134 each: 1/4-far from H_100 and p^(z) keeps that.
  const auto tester = empirical_tester(100, 0.25);
  std::set<Id> ones;
  for (Id i = 1; i <= 134; ++i) ones.insert(i);
  auto p = pair_of(ones, uniform_distribution(134));
  EXPECT_GT(farness_from_class(*p, 100), Rational(1, 4));
  int rejects = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    PairSampler s(p, seed);
    rejects += fun_tester_from_dist_tester(tester, 0.25, 0.05, s).decision == Decision::Reject;
  }
  EXPECT_GE(rejects, 30);
}

TEST(Functions, AllOnesWrapperForwardsEverything) {
  const auto d = std::make_shared<const SparseDistribution>(uniform_distribution(7));
  DistributionSampler base(d, 4);
  std::uint64_t seen = 0;
  const FunTester counting = [&](LabeledSampler& s) {
    const auto sample = s.draw(25);
    for (const auto& p : sample.pairs) EXPECT_EQ(p.label, 1);
    seen = sample.pairs.size();
    return TestVerdict{};
  };
  dist_tester_from_fun_tester(counting, base);
  EXPECT_EQ(seen, 25u);
  EXPECT_EQ(base.samples_drawn(), 25u);
}

TEST(Functions, RecordedLabeledSamplerReplays) {
  RecordedLabeledSampler s(LabeledSample{{{3, 1}, {4, 0}, {3, 1}}}, 1);
  const auto a = s.draw(2);
  EXPECT_EQ(a.pairs[0].id, 3);
  EXPECT_EQ(a.pairs[1].label, 0);
  EXPECT_THROW(s.draw(2), std::out_of_range);
}
