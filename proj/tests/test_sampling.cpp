#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <occupancy/sampling.hpp>

using namespace occupancy;

TEST(Philox, KnownAnswerVectors) {
  using C = Philox4x32::Counter;
  EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}),
            (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                 {0xffffffff, 0xffffffff}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                 {0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RandomStream, DeterministicAndDistinct) {
  RandomStream a(7, 3);
  RandomStream b(7, 3);
  RandomStream c(7, 4);
  RandomStream d(8, 3);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
    EXPECT_NE(x, d());
  }
}

TEST(RandomStream, UniformRanges) {
  RandomStream rng(1, 0);
  double sum = 0.0;
  const int count = 200'000;
  for (int i = 0; i < count; ++i) {
    const double u = rng.uniform();
    const double v = rng.uniform_open();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / count, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / count));
}

TEST(MixSeed, SpreadsLabels) {
  EXPECT_NE(mix_seed(42, 10), mix_seed(42, 11));
  EXPECT_NE(mix_seed(42, 10), mix_seed(43, 10));
  EXPECT_EQ(mix_seed(42, 10), mix_seed(42, 10));
}

namespace {

// Pearson statistic of binomial draws against the exact pmf, cells pooled to expected >= 5.
double binomial_chi2(std::uint64_t n, double p, int draws, std::uint64_t seed, int& dof) {
  std::vector<double> observed(n + 1, 0.0);
  RandomStream rng(seed, 0);
  for (int i = 0; i < draws; ++i) observed[sample_binomial(rng, n, p)] += 1.0;
  double chi2 = 0.0;
  double obs_acc = 0.0;
  double exp_acc = 0.0;
  dof = -1;
  for (std::uint64_t k = 0; k <= n; ++k) {
    const double logpmf = log_factorial(n) - log_factorial(k) - log_factorial(n - k) +
                          static_cast<double>(k) * std::log(p) +
                          static_cast<double>(n - k) * std::log1p(-p);
    obs_acc += observed[k];
    exp_acc += draws * std::exp(logpmf);
    if (exp_acc >= 5.0 || k == n) {
      chi2 += (obs_acc - exp_acc) * (obs_acc - exp_acc) / std::max(exp_acc, 1e-300);
      obs_acc = exp_acc = 0.0;
      ++dof;
    }
  }
  return chi2;
}

}  // namespace

class BinomialDistribution
    : public ::testing::TestWithParam<std::tuple<std::uint64_t, double>> {};

TEST_P(BinomialDistribution, MatchesPmf) {
  const auto [n, p] = GetParam();
  int dof = 0;
  const double chi2 = binomial_chi2(n, p, 200'000, 99 + n, dof);
  ASSERT_GT(dof, 0);
  // Mean dof, sd sqrt(2 dof); 6 sd is far outside chance for a fixed seed.
  EXPECT_LT(chi2, dof + 6.0 * std::sqrt(2.0 * dof)) << "dof=" << dof;
}

INSTANTIATE_TEST_SUITE_P(InversionAndRejection, BinomialDistribution,
                         ::testing::Values(std::make_tuple(5u, 0.3), std::make_tuple(40u, 0.2),
                                           std::make_tuple(100u, 0.05),
                                           std::make_tuple(30u, 0.5),
                                           std::make_tuple(100u, 0.3),
                                           std::make_tuple(1000u, 0.5),
                                           std::make_tuple(5000u, 0.01),
                                           std::make_tuple(200u, 0.9),
                                           std::make_tuple(100000u, 0.37)));

TEST(Binomial, EdgeCases) {
  RandomStream rng(3, 0);
  EXPECT_EQ(sample_binomial(rng, 0, 0.4), 0u);
  EXPECT_EQ(sample_binomial(rng, 10, 0.0), 0u);
  EXPECT_EQ(sample_binomial(rng, 10, 1.0), 10u);
  for (int i = 0; i < 1000; ++i) EXPECT_LE(sample_binomial(rng, 12, 0.999), 12u);
}

TEST(Binomial, LargeCountMoments) {
  RandomStream rng(11, 0);
  const std::uint64_t n = 1'000'000;
  const double p = 0.5;
  const int draws = 20'000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double x = static_cast<double>(sample_binomial(rng, n, p));
    sum += x;
    sq += x * x;
  }
  const double mean = sum / draws;
  const double var = sq / draws - mean * mean;
  const double v = n * p * (1 - p);
  EXPECT_NEAR(mean, n * p, 5.0 * std::sqrt(v / draws));
  EXPECT_NEAR(var / v, 1.0, 5.0 * std::sqrt(2.0 / draws));
}

TEST(AliasTable, Frequencies) {
  const std::vector<double> w{0.5, 0.25, 0.125, 0.0625, 0.0625};
  const AliasTable table(w);
  EXPECT_EQ(table.size(), w.size());
  RandomStream rng(5, 0);
  const int draws = 400'000;
  std::vector<double> counts(w.size(), 0.0);
  for (int i = 0; i < draws; ++i) counts[table(rng)] += 1.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    EXPECT_NEAR(counts[k] / draws, w[k], 5.0 * std::sqrt(w[k] * (1 - w[k]) / draws)) << k;
  }
}

TEST(AliasTable, SingleColumn) {
  const std::vector<double> w{1.0};
  const AliasTable table(w);
  RandomStream rng(5, 0);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(table(rng), 0u);
}

TEST(AllocationSampler, StrategySelection) {
  EXPECT_EQ(AllocationSampler(AllocationModel(100, equiprobable_profile(10))).strategy(),
            AllocationSampler::Strategy::ConditionalBinomial);
  EXPECT_EQ(AllocationSampler(AllocationModel(5, equiprobable_profile(10))).strategy(),
            AllocationSampler::Strategy::AliasPerBall);
}

TEST(AllocationSampler, CountsSumToBalls) {
  for (std::uint64_t n : {0u, 1u, 7u, 50u, 333u}) {
    for (const auto& p : {equiprobable_profile(1), equiprobable_profile(20), powerlaw_profile(40, 1.0)}) {
      const AllocationModel m(n, p);
      for (std::uint64_t i = 0; i < 50; ++i) {
        RandomStream rng(17, i);
        const auto counts = sample_allocation(m, rng);
        ASSERT_EQ(counts.size(), p.box_count());
        EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}), n);
      }
    }
  }
}

TEST(AllocationSampler, SingleBoxTakesEverything) {
  RandomStream rng(1, 1);
  const auto counts = sample_allocation(AllocationModel(9, equiprobable_profile(1)), rng);
  EXPECT_EQ(counts, std::vector<std::uint64_t>{9});
}

TEST(AllocationSampler, MarginalMeansBothStrategies) {
  const auto p = make_profile({0.4, 0.3, 0.2, 0.1});
  for (std::uint64_t n : {2u, 20u}) {
    const AllocationModel m(n, p);
    const AllocationSampler sampler(m);
    const int draws = 100'000;
    std::vector<double> sums(4, 0.0);
    std::vector<std::uint64_t> counts(4);
    for (int i = 0; i < draws; ++i) {
      RandomStream rng(23, static_cast<std::uint64_t>(i));
      sampler(rng, counts);
      for (int k = 0; k < 4; ++k) sums[k] += static_cast<double>(counts[k]);
    }
    for (int k = 0; k < 4; ++k) {
      const double q = p.weights()[k];
      const double sd = std::sqrt(n * q * (1 - q) / draws);
      EXPECT_NEAR(sums[k] / draws, n * q, 5.0 * sd) << "n=" << n << " k=" << k;
    }
  }
}

TEST(AllocationSampler, TwoBoxesMillionBalls) {
  const AllocationModel m(1'000'000, equiprobable_profile(2));
  RandomStream rng(8, 0);
  const auto counts = sample_allocation(m, rng);
  EXPECT_EQ(counts[0] + counts[1], 1'000'000u);
  EXPECT_NEAR(static_cast<double>(counts[0]), 500'000.0, 5.0 * 500.0);
}
