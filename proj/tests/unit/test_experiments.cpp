#include <gtest/gtest.h>

#include <cmath>

#include "bsf/experiments.hpp"

using namespace bsf;

TEST(Quartiles, LinearInterpolation) {
  const auto q = quartiles({4, 1, 3, 2});
  EXPECT_DOUBLE_EQ(q.q1, 1.75);
  EXPECT_DOUBLE_EQ(q.median, 2.5);
  EXPECT_DOUBLE_EQ(q.q3, 3.25);
  const auto one = quartiles({7});
  EXPECT_EQ(one.q1, 7);
  EXPECT_EQ(one.q3, 7);
  EXPECT_THROW(quartiles({}), InvalidArgument);
}

TEST(Seeds, ReplicateSeedsAreDistinctAndStable) {
  EXPECT_EQ(replicate_seed(1, 4, 0), replicate_seed(1, 4, 0));
  EXPECT_NE(replicate_seed(1, 4, 0), replicate_seed(1, 4, 1));
  EXPECT_NE(replicate_seed(1, 4, 0), replicate_seed(1, 5, 0));
  EXPECT_NE(replicate_seed(1, 4, 0), replicate_seed(2, 4, 0));
}

TEST(RunIndexed, OrderIndependentOfWorkers) {
  const std::function<int(int)> sq = [](int i) { return i * i; };
  EXPECT_EQ(run_indexed(50, 1, sq), run_indexed(50, 4, sq));
  const std::function<int(int)> bad = [](int i) -> int {
    if (i == 7) throw InvalidArgument("boom");
    return i;
  };
  EXPECT_THROW(run_indexed(20, 3, bad), InvalidArgument);
}

namespace {

ConsistencyPlan small_plan(int workers) {
  auto plan = gaussian_consistency_plan(GaussianOracleSpec::symmetric_pair(8.0, 2),
                                        ScheduleSpec{ScheduleSpec::Kind::corollary, 0.5, 1.0, {}});
  plan.n_grid = {4, 6};
  plan.replicates = 5;
  plan.master_seed = 77;
  plan.workers = workers;
  return plan;
}

}  // namespace

TEST(Consistency, DeterministicAcrossWorkers) {
  const auto a = small_plan(1);
  const auto r1 = consistency_experiment(a);
  const auto r4 = consistency_experiment(small_plan(4));
  ASSERT_EQ(r1.rows.size(), 10u);
  for (std::size_t i = 0; i < r1.rows.size(); ++i) {
    EXPECT_EQ(r1.rows[i].seed, r4.rows[i].seed);
    EXPECT_EQ(r1.rows[i].prob_truth, r4.rows[i].prob_truth);
    EXPECT_EQ(r1.rows[i].map_hamming, r4.rows[i].map_hamming);
  }
  EXPECT_EQ(r1.aggregates.size(), 2u);
  EXPECT_EQ(r1.rows[3].seed, replicate_seed(77, 4, 3));
}

TEST(Consistency, McmcModeTracksExact) {
  auto plan = small_plan(1);
  plan.n_grid = {5};
  plan.replicates = 2;
  const auto exact = consistency_experiment(plan);
  plan.mode = ExperimentMode::mcmc;
  plan.chain = ChainSchedule{6000, 500, 1, 1000};
  const auto mcmc = consistency_experiment(plan);
  for (int r = 0; r < 2; ++r) EXPECT_NEAR(mcmc.rows[r].prob_truth, exact.rows[r].prob_truth, 0.05);
}

TEST(Consistency, InvalidPlansRejected) {
  auto plan = small_plan(1);
  plan.replicates = 0;
  EXPECT_THROW(consistency_experiment(plan), InvalidArgument);
  plan = small_plan(1);
  plan.n_grid.clear();
  EXPECT_THROW(consistency_experiment(plan), InvalidArgument);
}

TEST(Misclass, SigmaRuleAndNoSignalLimit) {
  const auto spec = GaussianOracleSpec::symmetric_pair(2.0, 2);
  EXPECT_NEAR(misclass_sigma2(spec, 10, 0.25), 0.25 * std::min(4.0 / (10 * std::log(3.0)), 1.0), 1e-15);
  MisclassPlan plan;
  plan.base = spec;
  plan.snr_grid = {0.0, 20.0};
  plan.n = 8;
  plan.replicates = 3;
  plan.tail_draws = 500;
  const auto r = misclassification_experiment(plan);
  ASSERT_EQ(r.aggregates.size(), 2u);
  // balanced truth, no signal: E[d_H] is far from zero; strong signal: essentially zero
  EXPECT_GT(r.aggregates[0].expected_hamming.median, 1.0);
  EXPECT_LT(r.aggregates[1].expected_hamming.median, 1e-12);
}
