#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "burrscan/errors.hpp"
#include "burrscan/ks.hpp"
#include "fixtures.hpp"

namespace {

using namespace burrscan;

std::map<int, std::uint64_t> rounded_normal_counts(std::uint64_t n, double mu, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> law(mu, sigma);
  std::map<int, std::uint64_t> counts;
  for (std::uint64_t i = 0; i < n; ++i) counts[static_cast<int>(std::lround(law(rng)))]++;
  return counts;
}

TEST(KsStatistic, IdenticalCurvesGiveZero) {
  const EmpiricalCdf s(fixtures::histogram_of({{3, 2}, {5, 5}, {9, 3}}));
  const auto r = ks_statistic(s, [&s](int x) { return s(x); }, {1, 12});
  EXPECT_EQ(r.d_stat, 0.0);
  EXPECT_EQ(r.at_length, 1);
}

TEST(KsStatistic, PointMassAgainstStandardNormal) {
  const EmpiricalCdf s(std::map<int, std::uint64_t>{{0, 10}});
  const auto r = ks_statistic(s, [](int x) { return normal_cdf(x, 0.0, 1.0); }, {-3, 3});
  EXPECT_DOUBLE_EQ(r.d_stat, 0.5);
  EXPECT_EQ(r.at_length, 0);
}

TEST(KsStatistic, EmptySupportRejected) {
  const EmpiricalCdf s(fixtures::histogram_of({{3, 1}}));
  EXPECT_THROW(ks_statistic(s, [](int) { return 0.0; }, {5, 4}), std::invalid_argument);
}

TEST(KsStatistic, DrawsFromTheLawPassAtNominalLevel) {
  const double crit = ks_critical_value(50'000, 0.05);
  int passes = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const EmpiricalCdf s(rounded_normal_counts(50'000, 15.0, 5.0, seed));
    const auto r = ks_statistic(s, [](int x) { return normal_cdf(x + 0.5, 15.0, 5.0); }, {s.min_length(), s.max_length()});
    EXPECT_GE(r.d_stat, 0.0);
    EXPECT_LE(r.d_stat, 1.0);
    if (r.d_stat < crit) ++passes;
  }
  EXPECT_GE(passes, 95);
}

TEST(KsStatistic, DependsOnlyOnHistogram) {
  std::vector<QueryRecord> records;
  std::mt19937_64 rng(4);
  for (int i = 0; i < 3000; ++i) {
    const int len = 4 + static_cast<int>(rng() % 20);
    records.push_back(QueryRecord::make(i, std::string(static_cast<std::size_t>(len) - 4, 'a' + i % 26) +
                                               std::to_string(i % 10) + ".io"));
  }
  auto shuffled = records;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto a = length_histogram(build_space(records, SpaceKind::kAdnss));
  const auto b = length_histogram(build_space(shuffled, SpaceKind::kAdnss));
  GaussianFit f;
  f.mu = 12;
  f.sigma = 5;
  EXPECT_EQ(ks_statistic(a, f).d_stat, ks_statistic(b, f).d_stat);
}

TEST(KsStatistic, SubsampleOfSpaceMatchesFullFit) {
  int passes = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    std::mt19937_64 rng(seed * 7919);
    std::normal_distribution<double> law(15.0, 5.0);
    std::vector<int> lengths(100'000);
    for (auto& l : lengths) l = std::clamp(static_cast<int>(std::lround(law(rng))), 4, 60);
    LengthHistogram full;
    for (int l : lengths) full.add(l);
    const auto fit = fit_gaussian(full);
    std::shuffle(lengths.begin(), lengths.end(), rng);
    LengthHistogram sub;
    for (std::size_t i = 0; i < 10'000; ++i) sub.add(lengths[i]);
    if (ks_statistic(sub, fit).d_stat < ks_critical_value(sub.n(), 0.05)) ++passes;
  }
  EXPECT_GE(passes, 45);
}

TEST(KsCritical, AsymptoticValue) {
  EXPECT_NEAR(ks_critical_value(1000, 0.05), 0.04301, 1e-5);
  EXPECT_NEAR(ks_critical_value(1000, 0.10), 1.22 / std::sqrt(1000.0), 1e-12);
  EXPECT_NEAR(ks_critical_value(1000, 0.01), 1.63 / std::sqrt(1000.0), 1e-12);
}

TEST(KsCritical, PublishedTable) {
  EXPECT_DOUBLE_EQ(ks_critical_value(5, 0.05), 0.565);
  EXPECT_DOUBLE_EQ(ks_critical_value(1, 0.05), 0.975);
}

TEST(KsCritical, TableAgreesWithExactDistribution) {
  // Exact one-sample quantiles, columns alpha = 0.10, 0.05, 0.01.
  const std::map<std::uint64_t, std::array<double, 3>> exact = {
      {2, {0.77639, 0.84189, 0.92929}},  {3, {0.63604, 0.70760, 0.82900}},  {5, {0.50945, 0.56328, 0.66853}},
      {10, {0.36866, 0.40925, 0.48893}}, {20, {0.26473, 0.29408, 0.35241}}, {35, {0.20185, 0.22425, 0.26897}},
      {36, {0.19910, 0.22119, 0.26532}},
  };
  const double alphas[] = {0.10, 0.05, 0.01};
  for (const auto& [n, row] : exact)
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(ks_critical_value(n, alphas[k]), row[k], 0.01) << n << " " << alphas[k];
}

TEST(KsCritical, Monotonicity) {
  for (double alpha : {0.10, 0.05, 0.01}) {
    double prev = 2.0;
    for (std::uint64_t n = 1; n <= 5000; ++n) {
      const double d = ks_critical_value(n, alpha);
      EXPECT_LE(d, prev) << n;
      prev = d;
    }
  }
  for (std::uint64_t n : {1u, 7u, 35u, 36u, 100u, 50000u}) {
    EXPECT_LE(ks_critical_value(n, 0.10), ks_critical_value(n, 0.05));
    EXPECT_LE(ks_critical_value(n, 0.05), ks_critical_value(n, 0.01));
  }
}

TEST(KsCritical, Errors) {
  EXPECT_THROW(ks_critical_value(100, 0.2), UnsupportedAlpha);
  EXPECT_THROW(ks_critical_value(100, 0.025), UnsupportedAlpha);
  EXPECT_THROW(ks_critical_value(0, 0.05), std::invalid_argument);
}

}  // namespace
