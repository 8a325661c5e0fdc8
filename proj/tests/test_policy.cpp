#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "dpp/policy.hpp"

using namespace dpp;

namespace {

double sum(const PolicyPMF& p) { return std::accumulate(p.probabilities.begin(), p.probabilities.end(), 0.0); }

// Direct softmax with long double, as an independent reference.
std::vector<double> softmax_ref(const std::vector<double>& c, double lambda) {
  long double lo = c[0];
  for (double v : c) lo = std::min<long double>(lo, v);
  std::vector<long double> w;
  long double total = 0;
  for (double v : c) {
    w.push_back(std::exp(-static_cast<long double>(lambda) * (v - lo)));
    total += w.back();
  }
  std::vector<double> out;
  for (auto x : w) out.push_back(static_cast<double>(x / total));
  return out;
}

}  // namespace

TEST(Policy, EqualCostsAreUniform) {
  const auto p = build_pmf(std::vector<double>{1.0, 1.0}, 0.8);
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.5);
}

TEST(Policy, LogTwoRatio) {
  const auto p = build_pmf(std::vector<double>{0.0, std::log(2.0)}, 1.0);
  EXPECT_NEAR(p[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(p[1], 1.0 / 3.0, 1e-15);
}

TEST(Policy, InfiniteCostGetsZero) {
  const auto p = build_pmf(std::vector<double>{0.0, kInfinity, 0.0}, 3.0);
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_EQ(p[1], 0.0);
  EXPECT_DOUBLE_EQ(p[2], 0.5);
}

TEST(Policy, AllInfiniteThrows) {
  EXPECT_THROW(build_pmf(std::vector<double>{kInfinity, kInfinity}, 1.0), AllInfinite);
}

TEST(Policy, InvalidLambdaThrows) {
  EXPECT_THROW(build_pmf(std::vector<double>{0.0}, 0.0), InvalidArgument);
  EXPECT_THROW(build_pmf(std::vector<double>{0.0}, -1.0), InvalidArgument);
}

TEST(Policy, JointVanishingLambdaComponent) {
  const auto m = CostMatrix::from_rows({{0, 100}, {1, 0}});
  const auto p = build_joint_pmf(m, RationalityVector({1.0, 1e-9}));
  const double a = 1.0 / (1.0 + std::exp(-1.0));
  EXPECT_NEAR(p[0], a, 1e-6);
  EXPECT_NEAR(p[1], 1.0 - a, 1e-6);
  EXPECT_NEAR(p[0], 0.7311, 1e-4);
}

TEST(Policy, JointUniformAndIdenticalRows) {
  const auto p = build_joint_pmf(CostMatrix::from_rows({{0}, {0}, {0}}), RationalityVector({5.0}));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(p[i], 1.0 / 3.0, 1e-15);
  const auto q = build_joint_pmf(CostMatrix::from_rows({{1, 2}, {1, 2}}), RationalityVector({0.3, 0.7}));
  EXPECT_DOUBLE_EQ(q[0], 0.5);
}

TEST(Policy, JointDimensionErrors) {
  EXPECT_THROW(CostMatrix::from_rows({{0, 1}, {1}}), DimensionMismatch);
  EXPECT_THROW(build_joint_pmf(CostMatrix::from_rows({{0, 1}}), RationalityVector({1.0})), DimensionMismatch);
}

TEST(Policy, MatchesLongDoubleSoftmaxOnRandomInputs) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> cost(-50.0, 50.0);
  std::uniform_real_distribution<double> lam(0.01, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> c(1 + trial % 64);
    for (double& v : c) v = cost(gen);
    const double l = lam(gen);
    const auto p = build_pmf(c, l);
    const auto ref = softmax_ref(c, l);
    EXPECT_NEAR(sum(p), 1.0, 1e-12);
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(p[i], ref[i], 1e-12);
  }
}

TEST(Policy, ShiftInvariance) {
  const std::vector<double> c{0.3, -1.2, 4.0, 2.2};
  std::vector<double> shifted = c;
  for (double& v : shifted) v += 1234.5;
  const auto p = build_pmf(c, 0.9);
  const auto q = build_pmf(shifted, 0.9);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(p[i], q[i], 1e-12);
}

TEST(Policy, ScaleInvariance) {
  const std::vector<double> c{0.3, -1.2, 4.0, 2.2};
  std::vector<double> scaled = c;
  for (double& v : scaled) v *= 8.0;
  const auto p = build_pmf(c, 0.9);
  const auto q = build_pmf(scaled, 0.9 / 8.0);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(p[i], q[i], 1e-12);
}

TEST(Policy, TinyLambdaIsNearlyUniform) {
  const std::vector<double> c{0.0, 10.0, -30.0, 55.0, 7.0};
  const auto p = build_pmf(c, 1e-12);
  for (double v : p.probabilities) EXPECT_NEAR(v, 0.2, 1e-6);
}

TEST(Policy, Monotonicity) {
  const std::vector<double> c{3.0, 1.0, 2.0, 0.5};
  const auto p = build_pmf(c, 0.4);
  for (std::size_t a = 0; a < c.size(); ++a)
    for (std::size_t b = 0; b < c.size(); ++b)
      if (c[a] < c[b]) {
        EXPECT_GT(p[a], p[b]);
      }
}

TEST(Policy, LargeExponentsDoNotOverflow) {
  const auto p = build_pmf(std::vector<double>{1e6, 1e6 + 1.0}, 50.0);
  EXPECT_NEAR(p[0], 1.0, 1e-12);
  EXPECT_TRUE(std::isfinite(p[1]));
}

TEST(Policy, DegenerateSampleAlwaysZero) {
  PolicyPMF pmf{{1.0, 0.0, 0.0}};
  Rng rng(99);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample(pmf, rng), 0u);
}

TEST(Policy, SampleFrequencyFairCoin) {
  PolicyPMF pmf{{0.5, 0.5}};
  Rng rng(20240601);
  std::size_t zeros = 0;
  const std::size_t n = 1000000;
  for (std::size_t i = 0; i < n; ++i) zeros += sample(pmf, rng) == 0 ? 1 : 0;
  const double f = static_cast<double>(zeros) / static_cast<double>(n);
  EXPECT_GE(f, 0.498);
  EXPECT_LE(f, 0.502);
}

TEST(Policy, SampleIsDeterministicPerSeed) {
  PolicyPMF pmf{{0.2, 0.3, 0.5}};
  Rng a(5);
  Rng b(5);
  for (int i = 0; i < 500; ++i) EXPECT_EQ(sample(pmf, a), sample(pmf, b));
}

TEST(Policy, SampleNeverPicksZeroMass) {
  PolicyPMF pmf{{0.0, 0.6, 0.0, 0.4, 0.0}};
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const auto j = sample(pmf, rng);
    EXPECT_TRUE(j == 1 || j == 3);
  }
}

TEST(Policy, RngSplitGivesDistinctStreams) {
  EXPECT_NE(Rng::split(1, 0), Rng::split(1, 1));
  EXPECT_EQ(Rng::split(1, 7), Rng::split(1, 7));
  Rng r(0);
  const double u = r.uniform();
  EXPECT_GE(u, 0.0);
  EXPECT_LT(u, 1.0);
}
