#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace moss_test;
using moss::Tally;

namespace {

Tally tally_with(Method m, std::uint64_t budget, std::vector<std::pair<int, std::uint64_t>> hits) {
  Tally t = Tally::empty(m);
  t.budget = budget;
  std::uint64_t used = 0;
  for (const auto& [id, h] : hits) {
    t.hits[static_cast<std::size_t>(id)] = h;
    used += h;
  }
  t.degenerate = budget - used;
  return t;
}

}  // namespace

TEST(Probabilities, MatchExactFractions) {
  for (const auto& [name, g] : small_graph_suite()) {
    const Indexed ix(g);
    for (const Method m : {Method::kMoss4, Method::kMoss4Min, Method::kT5, Method::kPath5}) {
      if (ix.index.total(moss::root_weight(m)) == 0) continue;
      const auto p = moss::inclusion_probabilities(m, ix.index);
      for (int id = 1; id <= moss::motif_count(m); ++id)
        EXPECT_DOUBLE_EQ(p[static_cast<std::size_t>(id)],
                         static_cast<double>(exact_probability(m, ix.index, id)))
            << name << ' ' << moss::to_string(m) << ' ' << id;
    }
  }
}

TEST(Moss4, HalfHitsOnK4GiveOneClique) {
  const Indexed ix(complete_graph(4));
  const auto rep = moss::estimate_moss4(tally_with(Method::kMoss4, 1000, {{6, 500}}), ix.index);
  EXPECT_DOUBLE_EQ(rep.value(6), 1.0);
  EXPECT_DOUBLE_EQ(rep.value(2), 4.0 - 4.0);  // Lambda_3 - 4 n_6
  EXPECT_DOUBLE_EQ(rep.variance(6), 1.0 / 1000);
}

TEST(Moss4, ZeroHitsGiveZeroEstimateAndVariance) {
  const Indexed ix(moss::erdos_renyi(12, 0.4, 1));
  const auto rep = moss::estimate_moss4(tally_with(Method::kMoss4, 100, {}), ix.index);
  for (const int id : {1, 3, 4, 5, 6}) {
    EXPECT_EQ(rep.value(id), 0.0);
    EXPECT_EQ(rep.variance(id), 0.0);
  }
}

TEST(Moss4, StarIdentityHoldsInsideReport) {
  const Indexed ix(moss::erdos_renyi(30, 0.3, 2));
  moss::Rng rng(3);
  const auto rep = moss::estimate_moss4(moss::run_sampler(Method::kMoss4, ix.index, 4000, rng), ix.index);
  const double rhs = static_cast<double>(ix.index.lambda3()) - rep.value(4) - 2 * rep.value(5) - 4 * rep.value(6);
  EXPECT_NEAR(rep.value(2), rhs, 1e-9 * std::abs(rhs) + 1e-9);
  for (const int id : rep.ids) EXPECT_GE(rep.variance(id), 0.0);
  // Var(n_2) = a' C a over the motifs it is built from
  const double a[7] = {0, 0, 0, 0, -1, -2, -4};
  double v = 0.0;
  for (int i = 4; i <= 6; ++i)
    for (int j = 4; j <= 6; ++j) v += a[i] * a[j] * rep.cov(i, j);
  EXPECT_NEAR(rep.variance(2), v, 1e-9 * v);
  EXPECT_NEAR(rep.cov(2, 4), -rep.cov(4, 4) - 2 * rep.cov(5, 4) - 4 * rep.cov(6, 4), 1e-9 * std::abs(rep.cov(4, 4)));
}

TEST(Moss4, AnalyticVarianceMatchesRepeatedRunsOnK4) {
  const Indexed ix(complete_graph(4));
  const std::uint64_t K = 100;
  const int runs = 10000;
  double sum = 0.0, sq = 0.0;
  for (int r = 0; r < runs; ++r) {
    const Tally t = moss::run_sampler_parallel(Method::kMoss4, ix.index, K, 1000 + r, 1);
    const double x = moss::estimate_moss4(t, ix.index).value(6);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / runs;
  const double var = (sq - runs * mean * mean) / (runs - 1);
  const auto truth = moss::moss4_covariance(ix.index, K, {0, 0, 0, 0, 0, 0, 1});
  EXPECT_DOUBLE_EQ(truth[6][6], 1.0 / K);
  EXPECT_NEAR(mean, 1.0, 4 * std::sqrt(truth[6][6] / runs));
  EXPECT_NEAR(var / truth[6][6], 1.0, 0.05);
}

TEST(Moss4Min, K4AndFourCycle) {
  const Indexed k4(complete_graph(4));
  EXPECT_DOUBLE_EQ(moss::estimate_moss4min(tally_with(Method::kMoss4Min, 1400, {{6, 600}}), k4.index).value(6), 1.0);
  const Indexed c4(cycle_graph(4));
  const double p3 = 2.0 / static_cast<double>(c4.index.gamma_check());
  const auto rep = moss::estimate_moss4min(
      tally_with(Method::kMoss4Min, 1000, {{3, static_cast<std::uint64_t>(std::llround(1000 * p3))}}), c4.index);
  EXPECT_NEAR(rep.value(3), 1.0, 1e-12);
  EXPECT_EQ(moss::estimate_moss4min(tally_with(Method::kMoss4Min, 10, {}), k4.index).value(3), 0.0);
}

TEST(Moss4Min, RejectsWrongTally) {
  const Indexed k4(complete_graph(4));
  EXPECT_THROW(moss::estimate_moss4min(tally_with(Method::kMoss4, 10, {}), k4.index), moss::ConfigError);
}

TEST(Mixing, Examples) {
  const auto same = moss::mix_estimates({1.0, 2.0}, {3.0, 2.0});
  EXPECT_DOUBLE_EQ(same.value, 2.0);
  EXPECT_DOUBLE_EQ(same.variance, 1.0);
  const auto skew = moss::mix_estimates({0.0, 1.0}, {4.0, 3.0});
  EXPECT_DOUBLE_EQ(skew.value, 1.0);
  EXPECT_DOUBLE_EQ(skew.variance, 0.75);
  const auto far = moss::mix_estimates({5.0, 1.0}, {0.0, 1e300});
  EXPECT_NEAR(far.value, 5.0, 1e-12);
}

TEST(Moss5, K5CliqueAndStarIdentity) {
  const Indexed ix(complete_graph(5));
  const auto p1 = moss::inclusion_probabilities(Method::kT5, ix.index);
  const auto p2 = moss::inclusion_probabilities(Method::kPath5, ix.index);
  const std::uint64_t K = 9000;  // K p1 = 3000 and K p2 = 2000 exactly
  const auto h1 = static_cast<std::uint64_t>(std::llround(K * p1[21]));
  const auto h2 = static_cast<std::uint64_t>(std::llround(K * p2[21]));
  const auto rep = moss::estimate_moss5(tally_with(Method::kT5, K, {{21, h1}}),
                                        tally_with(Method::kPath5, K, {{21, h2}}), ix.index);
  EXPECT_NEAR(rep.value(21), 1.0, 1e-12);
  EXPECT_NEAR(rep.value(2), 5.0 - 5.0 * rep.value(21), 1e-12);
}

TEST(Moss5, OneSidedMotifsTakeTheirOnlySource) {
  const Indexed ix(moss::erdos_renyi(25, 0.3, 8));
  moss::Rng rng(9);
  const auto t5 = moss::run_sampler(Method::kT5, ix.index, 3000, rng);
  const auto p5 = moss::run_sampler(Method::kPath5, ix.index, 5000, rng);
  const auto rep = moss::estimate_moss5(t5, p5, ix.index);
  EXPECT_EQ(rep.value(8), rep.estimate1[8]);
  EXPECT_EQ(rep.value(6), rep.estimate2[6]);
  const auto& cat = moss::catalog();
  for (int id = 1; id <= 21; ++id) {
    const auto a = static_cast<std::size_t>(id);
    if (cat.phi5(1, id) > 0 && cat.phi5(2, id) > 0) { EXPECT_NEAR(rep.lambda1[a] + rep.lambda2[a], 1.0, 1e-12); }
    EXPECT_GE(rep.variance(id), 0.0);
  }
  double rhs = static_cast<double>(ix.index.lambda4());
  for (const int i : cat.omega3_star()) rhs -= cat.phi5(3, i) * rep.value(i);
  EXPECT_NEAR(rep.value(2), rhs, 1e-9 * static_cast<double>(ix.index.lambda4()));
}

TEST(Moss5, DefaultMixUsesBothSources) {
  const Indexed ix(moss::erdos_renyi(25, 0.3, 8));
  std::vector<double> n(22, 0.0);
  for (int id = 1; id <= 21; ++id) n[static_cast<std::size_t>(id)] = 10.0 + id;
  const auto mix = moss::moss5_mix(ix.index, 1000, 1000, n);
  const auto cov = moss::moss5_covariance(ix.index, 1000, 1000, n);
  for (int id = 1; id <= 21; ++id) {
    const auto a = static_cast<std::size_t>(id);
    if (moss::catalog().phi5(1, id) > 0 && moss::catalog().phi5(2, id) > 0) {
      EXPECT_GT(mix.lambda1[a], 0.0);
      EXPECT_GT(mix.lambda2[a], 0.0);
    }
    if (id != 2) { EXPECT_GT(cov[a][a], 0.0); }
  }
}

TEST(Intervals, NormalAndTail) {
  EXPECT_EQ(moss::confidence_interval(0.0, 0.95), 0.0);
  EXPECT_NEAR(moss::confidence_interval(1.0, 0.95), 1.959964, 1e-6);
  EXPECT_NEAR(moss::gaussian_tail_bound(3.0), 1.48e-3, 0.01e-3);
  EXPECT_THROW(moss::confidence_interval(1.0, 1.0), moss::ConfigError);
}

TEST(Planning, BudgetFormula) {
  EXPECT_EQ(moss::plan_budget(1.0, 1.0, 0.1, 0.01), 1u);
  const double z = moss::normal_quantile(0.99);
  const auto k = moss::plan_budget(1e-3, 1.0, 0.1, 0.01);
  EXPECT_EQ(k, static_cast<std::uint64_t>(std::ceil(z * z * 999 / 0.01)));
  EXPECT_EQ(k, 662827u);
  const auto k2 = moss::plan_budget(1e-3, 1.0, 0.05, 0.01);
  EXPECT_NEAR(static_cast<double>(k2) / static_cast<double>(k), 4.0, 1e-5);
  EXPECT_THROW(moss::plan_budget(1e-3, 0.0, 0.1, 0.01), moss::ConfigError);
}

TEST(ErrorMetrics, ConstantAndK4) {
  const auto exact = moss::error_metrics({2.0, 2.0, 2.0}, 2.0, 0.0);
  EXPECT_EQ(*exact.nrmse, 0.0);
  const auto k4 = moss::error_metrics({1.0, 1.0}, 1.0, 1.0 / 100);
  EXPECT_DOUBLE_EQ(*k4.std_err, 0.1);
  const auto none = moss::error_metrics({1.0, 2.0}, 0.0, 1.0);
  EXPECT_FALSE(none.nrmse.has_value());
  EXPECT_THROW(moss::error_metrics({1.0}, 1.0, 1.0), moss::ConfigError);
}

TEST(ErrorMetrics, NrmseApproachesStdErrForUnbiasedDraws) {
  moss::Rng rng(4);
  std::normal_distribution<double> noise(10.0, 2.0);
  std::vector<double> runs(200000);
  for (auto& x : runs) x = noise(rng);
  const auto m = moss::error_metrics(runs, 10.0, 4.0);
  EXPECT_NEAR(*m.nrmse / *m.std_err, 1.0, 0.01);
}
