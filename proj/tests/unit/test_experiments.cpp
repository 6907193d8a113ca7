#include "densub/error.hpp"
#include "densub/experiments.hpp"
#include "densub/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace densub;

TEST(Recovered, ExactMatch) {
  const auto t = GroundTruth::make({0, 1}, {2, 3}, 5, 5);
  EXPECT_TRUE(recovered(t.X0, t.X0));
  EXPECT_TRUE(recovered(t.X0 + 0.3 * Matrix::Ones(5, 5), t.X0));
}

TEST(Recovered, OneFlippedEntryDependsOnScale) {
  // ||X0||_F = sqrt(mn); one flip gives relative error 1/sqrt(mn).
  const auto small = GroundTruth::make(iota_set(10), iota_set(10), 20, 20);
  Matrix X = small.X0;
  X(15, 15) = 1.0;
  EXPECT_FALSE(recovered(X, small.X0));  // 1/10 >= 1e-3

  const Index m = 1001;  // 1/1001 < 1e-3
  Matrix big = Matrix::Zero(m + 1, m + 1);
  big.topLeftCorner(m, m).setOnes();
  Matrix flipped = big;
  flipped(m, m) = 1.0;
  EXPECT_TRUE(recovered(flipped, big));
}

TEST(Recovered, ZeroIsNotRecovery) {
  const auto t = GroundTruth::make({0}, {0}, 3, 3);
  EXPECT_FALSE(recovered(Matrix::Zero(3, 3), t.X0));
  Matrix bad = t.X0;
  bad(1, 1) = std::nan("");
  EXPECT_FALSE(recovered(bad, t.X0));
}

TEST(RoundTopK, LargestDiagonalEntries) {
  Matrix X = Matrix::Zero(3, 3);
  X.diagonal() << 0.9, 0.1, 0.8;
  const auto r = round_topk_diagonal(X, 2);
  EXPECT_EQ(r.indices, (IndexSet{0, 2}));
  EXPECT_FALSE(r.degenerate);
}

TEST(RoundTopK, ZeroDiagonalIsDegenerate) {
  const auto r = round_topk_diagonal(Matrix::Zero(5, 5), 3);
  EXPECT_EQ(r.indices, (IndexSet{0, 1, 2}));
  EXPECT_TRUE(r.degenerate);
}

TEST(RoundTopK, RankOneCliqueIndicator) {
  const auto t = GroundTruth::make({1, 4, 6}, {1, 4, 6}, 8, 8);
  EXPECT_EQ(round_topk_diagonal(t.X0, 3).indices, (IndexSet{1, 4, 6}));
}

TEST(RoundTopK, TiesGoToSmallerIndex) {
  Matrix X = Matrix::Zero(4, 4);
  X.diagonal() << 0.5, 0.7, 0.5, 0.5;
  EXPECT_EQ(round_topk_diagonal(X, 2).indices, (IndexSet{0, 1}));
}

TEST(Spearman, PerfectAndReversed) {
  EXPECT_NEAR(spearman({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0, 1e-15);
  EXPECT_NEAR(spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0, 1e-15);
}

TEST(Spearman, TiesUseAverageRanks) {
  // Ranks of y: 1, 2.5, 2.5, 4. Pearson of (1,2,3,4) and those ranks.
  const double r = spearman({1, 2, 3, 4}, {0, 5, 5, 9});
  const double my = 2.5;
  const double sxy = (1 - 2.5) * (1 - my) + (2 - 2.5) * (2.5 - my) + (3 - 2.5) * (2.5 - my) +
                     (4 - 2.5) * (4 - my);
  const double sxx = 5.0, syy = 2.25 + 0 + 0 + 2.25;
  EXPECT_NEAR(r, sxy / std::sqrt(sxx * syy), 1e-14);
}

TEST(Spearman, ConstantSampleIsNaN) {
  EXPECT_TRUE(std::isnan(spearman({1, 2, 3}, {5, 5, 5})));
}

TEST(GridCell, GammaRules) {
  GridConfig c;
  c.experiment = 1;
  c.M = 200;
  const auto s1 = grid_cell_spec(c, 0.8, 40);
  // Smallest probability in the experiment-1 table is p_55 * p_44 = (1/16)(1/12).
  EXPECT_NEAR(grid_cell_gamma(c, s1, 0.8, 40), 6.0 / (40 * (0.8 - s1.probs.minCoeff())), 1e-15);
  EXPECT_NEAR(s1.probs.minCoeff(), 1.0 / 16 * 1.0 / 12, 1e-15);
  c.experiment = 2;
  const auto s2 = grid_cell_spec(c, 0.8, 40);
  EXPECT_NEAR(grid_cell_gamma(c, s2, 0.8, 40), 6.0 / (40 * 0.55), 1e-15);
  c.gamma_rule = GridGammaRule::Theorem;
  EXPECT_THROW(grid_cell_gamma(c, s2, 0.8, 40), Error);  // p22 = q leaves no gap
}

TEST(TrialSeed, DistinctAcrossCells) {
  EXPECT_NE(trial_seed(1, 1, 0.5, 40, 0), trial_seed(1, 1, 0.5, 40, 1));
  EXPECT_NE(trial_seed(1, 1, 0.5, 40, 0), trial_seed(1, 1, 0.65, 40, 0));
  EXPECT_NE(trial_seed(1, 1, 0.5, 40, 0), trial_seed(1, 2, 0.5, 40, 0));
  EXPECT_EQ(trial_seed(3, 1, 0.5, 40, 2), trial_seed(3, 1, 0.5, 40, 2));
}

TEST(RunGrid, EasyCellRecovers) {
  GridConfig c;
  c.M = 40;
  c.q_values = {1.0};
  c.m_values = {20};
  c.trials = 1;
  const auto g = run_grid(c);
  EXPECT_EQ(g.counts(0, 0), 1);
  ASSERT_EQ(g.records.size(), 1u);
  EXPECT_GT(g.records[0].iterations, 0);
}

TEST(RunGrid, NoGapCellNeverRecovers) {
  GridConfig c;
  c.experiment = 2;
  c.M = 40;
  c.q_values = {0.25};
  c.m_values = {10};
  c.trials = 10;
  EXPECT_LE(run_grid(c).counts(0, 0), 1);
}

TEST(RunGrid, EmptyQListGivesEmptyGrid) {
  GridConfig c;
  c.m_values = {10};
  const auto g = run_grid(c);
  EXPECT_EQ(g.counts.rows(), 0);
  EXPECT_TRUE(g.records.empty());
}

TEST(RunGrid, ParallelismDoesNotChangeResults) {
  GridConfig c;
  c.M = 30;
  c.q_values = {0.5, 0.9};
  c.m_values = {10, 15};
  c.trials = 3;
  c.solver.maxiter = 300;
  const auto a = run_grid(c);
  c.jobs = 4;
  const auto b = run_grid(c);
  EXPECT_TRUE(a.counts == b.counts);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_EQ(a.records[k].seed, b.records[k].seed);
    EXPECT_EQ(a.records[k].recovered, b.records[k].recovered);
    EXPECT_EQ(a.records[k].iterations, b.records[k].iterations);
  }
}

TEST(RunGrid, ResumeSkipsCompletedTrials) {
  GridConfig c;
  c.M = 30;
  c.q_values = {0.9};
  c.m_values = {10};
  c.trials = 4;
  const auto full = run_grid(c);
  std::vector<TrialRecord> partial(full.records.begin(), full.records.begin() + 3);
  int fresh = 0;
  const auto resumed = run_grid(c, partial, [&](const TrialRecord&) { ++fresh; });
  EXPECT_EQ(fresh, 1);
  EXPECT_TRUE(resumed.counts == full.counts);
}

TEST(TrialsCsv, RoundTripAndTornLine) {
  std::vector<TrialRecord> recs(2);
  recs[0] = {0.5, 40, 0, 123, true, 77, 1.25};
  recs[1] = {0.65, 60, 3, 456, false, 2000, 0.0};
  std::ostringstream out;
  write_trials_csv(out, recs);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "q,m,trial,seed,recovered,iters,seconds");
  std::istringstream in(text + "0.8,40,1,99");  // partial final line
  const auto back = read_trials_csv(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].seed, 456u);
  EXPECT_EQ(back[0].recovered, true);
  EXPECT_EQ(back[1].iterations, 2000);
  EXPECT_DOUBLE_EQ(back[0].seconds, 1.25);
}

TEST(GridOutputs, CountsCsvAndPgm) {
  RecoveryGrid g;
  g.q_values = {0.5, 0.9};
  g.m_values = {10, 20, 30};
  g.trials = 10;
  g.counts.resize(2, 3);
  g.counts << 0, 5, 10, 1, 2, 3;
  std::ostringstream csv;
  write_counts_csv(csv, g);
  EXPECT_EQ(csv.str(), "q,m,count\n0.5,10,0\n0.5,20,5\n0.5,30,10\n0.9,10,1\n0.9,20,2\n0.9,30,3\n");
  std::ostringstream pgm;
  write_pgm(pgm, g);
  std::istringstream in(pgm.str());
  std::string magic;
  int w, h, maxv;
  in >> magic >> w >> h >> maxv;
  EXPECT_EQ(magic, "P2");
  EXPECT_EQ(w, 3);
  EXPECT_EQ(h, 2);
  EXPECT_EQ(maxv, 255);
  std::vector<int> px(6);
  for (int& p : px) in >> p;
  EXPECT_EQ(px, (std::vector<int>{0, 128, 255, 26, 51, 77}));
}

TEST(GridConfig, Validation) {
  GridConfig c;
  c.q_values = {1.2};
  EXPECT_THROW(c.validate(), Error);
  c.q_values = {0.5};
  c.trials = 0;
  EXPECT_THROW(c.validate(), Error);
}
