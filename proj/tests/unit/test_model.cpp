#include "densub/error.hpp"
#include "densub/model.hpp"
#include "densub/rng.hpp"

#include <gtest/gtest.h>

#include <Eigen/LU>

#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

using namespace densub;

namespace {

PlantedModelSpec two_block(Index m1, Index M, double p11, double p12, double p22) {
  PlantedModelSpec s;
  s.partition = BlockPartition::contiguous({m1, M - m1}, {m1, M - m1});
  s.probs.resize(2, 2);
  s.probs << p11, p12, p12, p22;
  return s;
}

PlantedModelSpec one_block(Index M, Index N, double p) {
  PlantedModelSpec s;
  s.partition = BlockPartition::contiguous({M}, {N});
  s.probs = Matrix::Constant(1, 1, p);
  return s;
}

}  // namespace

TEST(BinaryMatrix, RejectsNonBinaryEntries) {
  Matrix v(2, 2);
  v << 0, 1, 1, 0.5;
  EXPECT_THROW(BinaryMatrix::from_real(v), Error);
  v(1, 1) = 1;
  const auto A = BinaryMatrix::from_real(v);
  EXPECT_EQ(A.count_ones(), 3);
  EXPECT_TRUE(A(0, 1));
  EXPECT_FALSE(A(0, 0));
}

TEST(BinaryMatrix, BinarizedMapsNonzeroToOne) {
  Matrix v(1, 3);
  v << 0, -2, 0.1;
  const auto A = BinaryMatrix::binarized(v);
  EXPECT_FALSE(A(0, 0));
  EXPECT_TRUE(A(0, 1));
  EXPECT_TRUE(A(0, 2));
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(a.next(), b.next());
}

TEST(Rng, BelowStaysInRange) {
  Rng r(7);
  std::vector<int> hits(5, 0);
  for (int k = 0; k < 5000; ++k) {
    const auto v = r.below(5);
    ASSERT_LT(v, 5u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Rng, DerivedSeedsDependOnEveryKey) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 10; ++a) {
    for (std::uint64_t b = 0; b < 10; ++b) seen.insert(derive_seed(1, {a, b}));
  }
  EXPECT_EQ(seen.size(), 100u);
  EXPECT_NE(derive_seed(1, {1, 2}), derive_seed(1, {2, 1}));
  EXPECT_NE(derive_seed(1, {3}), derive_seed(2, {3}));
}

TEST(BlockPartition, ValidateRejectsOverlapAndGaps) {
  BlockPartition p;
  p.rows = {{0, 1}, {1, 2}};
  p.cols = {{0}};
  EXPECT_THROW(p.validate(), Error);
  p.rows = {{0, 1}, {3}};
  EXPECT_THROW(p.validate(), Error);
  p.rows = {{0, 1}, {2}};
  EXPECT_NO_THROW(p.validate());
}

TEST(BlockPartition, PlantedSplitsIntoBlockAndRest) {
  const auto p = BlockPartition::planted({1, 3}, {0}, 5, 2);
  ASSERT_EQ(p.rows.size(), 2u);
  EXPECT_EQ(p.rows[0], (IndexSet{1, 3}));
  EXPECT_EQ(p.rows[1], (IndexSet{0, 2, 4}));
  ASSERT_EQ(p.cols.size(), 2u);
  EXPECT_EQ(p.cols[1], (IndexSet{1}));
  const auto full = BlockPartition::planted({0, 1}, {0, 1}, 2, 2);
  EXPECT_EQ(full.rows.size(), 1u);
}

TEST(SamplePsm, SingleBlockProbabilityOneGivesAllOnes) {
  const auto s = sample_psm(one_block(7, 5, 1.0), 3);
  EXPECT_EQ(s.A.count_ones(), 35);
}

TEST(SamplePsm, SingleBlockProbabilityZeroGivesAllZeros) {
  const auto s = sample_psm(one_block(7, 5, 0.0), 3);
  EXPECT_EQ(s.A.count_ones(), 0);
}

TEST(SamplePsm, DeterministicTwoBlockEqualsGroundTruth) {
  const auto s = sample_psm(two_block(3, 6, 1.0, 0.0, 0.0), 11);
  EXPECT_EQ(s.A.count_ones(), 9);
  EXPECT_TRUE(s.A.to_real() == s.truth.X0);
  EXPECT_EQ(s.truth.planted_rows, (IndexSet{0, 1, 2}));
}

TEST(SamplePsm, OverlappingPartitionIsInvalidSpec) {
  auto spec = two_block(3, 6, 1.0, 0.0, 0.0);
  spec.partition.rows[1].push_back(0);
  try {
    sample_psm(spec, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidSpec);
  }
}

TEST(SamplePsm, ProbabilityOutOfRangeIsInvalidSpec) {
  auto spec = one_block(3, 3, 1.5);
  EXPECT_THROW(spec.validate(), Error);
}

TEST(SamplePsm, FixedSeedIsBitReproducible) {
  const auto spec = experiment1_spec(0.6, 30, 100);
  const auto a = sample_psm(spec, 99);
  const auto b = sample_psm(spec, 99);
  const auto c = sample_psm(spec, 100);
  EXPECT_TRUE(a.A == b.A);
  EXPECT_FALSE(a.A == c.A);
}

TEST(SamplePsm, SymmetricSamplingIsExactlySymmetric) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = sample_psm(experiment2_spec(0.7, 20, 60), seed);
    EXPECT_TRUE(s.A.is_symmetric());
  }
}

TEST(SamplePsm, UnitPlantedDiagonal) {
  auto spec = two_block(10, 30, 0.0, 0.0, 0.0);
  spec.symmetric = true;
  spec.unit_planted_diagonal = true;
  const auto s = sample_psm(spec, 5);
  for (Index i = 0; i < 30; ++i) EXPECT_EQ(s.A(i, i), i < 10);
  EXPECT_EQ(s.A.count_ones(), 10);
}

// Empirical block densities sit within five standard errors of p_rs.
TEST(SamplePsm, BlockDensitiesConcentrate) {
  PlantedModelSpec spec;
  spec.partition = BlockPartition::contiguous({100, 150}, {100, 200});
  spec.probs.resize(2, 2);
  spec.probs << 0.9, 0.2, 0.35, 0.05;
  int good = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto s = sample_psm(spec, seed);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        const auto& R = spec.partition.rows[r];
        const auto& C = spec.partition.cols[c];
        double ones = 0;
        for (Index i : R) {
          for (Index j : C) ones += s.A(i, j);
        }
        const double area = static_cast<double>(R.size() * C.size());
        ASSERT_GE(area, 1e4);
        const double p = spec.probs(r, c);
        ++total;
        if (std::abs(ones / area - p) <= 5.0 * std::sqrt(p * (1 - p) / area)) ++good;
      }
    }
  }
  EXPECT_GE(good, static_cast<int>(std::ceil(0.99 * total)));
}

TEST(Experiment1Spec, FiveBlocksAtM500) {
  const auto s = experiment1_spec(0.9, 100, 500);
  ASSERT_EQ(s.probs.rows(), 5);
  EXPECT_DOUBLE_EQ(s.probs(0, 0), 0.9);
  EXPECT_DOUBLE_EQ(s.probs(1, 1), 0.25);
  EXPECT_DOUBLE_EQ(s.probs(2, 2), 1.0 / 8);
  EXPECT_DOUBLE_EQ(s.probs(1, 2), 1.0 / 32);
  EXPECT_DOUBLE_EQ(s.probs(0, 1), 0.9 * 0.25);
  EXPECT_TRUE(s.symmetric);
}

TEST(Experiment1Spec, TwoBlocks) {
  const auto s = experiment1_spec(1.0, 250, 500);
  ASSERT_EQ(s.probs.rows(), 2);
  EXPECT_DOUBLE_EQ(s.probs(1, 1), 0.25);
  EXPECT_DOUBLE_EQ(s.probs(0, 1), 0.25);
}

TEST(Experiment1Spec, RemainderBlockGetsNextProbability) {
  const auto s = experiment1_spec(0.5, 60, 200);
  ASSERT_EQ(s.probs.rows(), 3);
  EXPECT_EQ(s.partition.rows[2].size(), 80u);
  EXPECT_DOUBLE_EQ(s.probs(2, 2), 1.0 / 8);
}

TEST(Experiment1Spec, OversizedBlockIsRejected) {
  try {
    experiment1_spec(0.5, 501, 500);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}

TEST(Experiment2Spec, TwoBlocksWithQuarterOffDiagonal) {
  const auto s = experiment2_spec(0.8, 150, 500);
  ASSERT_EQ(s.probs.rows(), 2);
  EXPECT_DOUBLE_EQ(s.probs(0, 0), 0.8);
  EXPECT_DOUBLE_EQ(s.probs(1, 1), 0.8);
  EXPECT_DOUBLE_EQ(s.probs(0, 1), 0.25);
  EXPECT_DOUBLE_EQ(s.probs(1, 0), 0.25);
}

TEST(SpecKv, RoundTrip) {
  auto spec = experiment1_spec(0.65, 40, 200);
  const auto back = PlantedModelSpec::from_kv(spec.to_kv());
  EXPECT_EQ(back.partition.rows, spec.partition.rows);
  EXPECT_EQ(back.partition.cols, spec.partition.cols);
  EXPECT_TRUE(back.probs == spec.probs);
  EXPECT_EQ(back.symmetric, spec.symmetric);
}

TEST(SpecKv, PresetForm) {
  std::istringstream in("preset = experiment2\nq = 0.7\nm = 50\nM = 120\n");
  const auto s = PlantedModelSpec::from_kv(KeyValue::parse(in));
  EXPECT_EQ(s.rows(), 120);
  EXPECT_DOUBLE_EQ(s.probs(0, 0), 0.7);
}

// ---------------------------------------------------------------------------

namespace {

struct AdvFixture {
  BinaryMatrix A;
  GroundTruth truth;
  AdversarialBudget budget;
};

AdvFixture adv_fixture() {
  AdvFixture f;
  const auto part = BlockPartition::contiguous({10, 10}, {10, 10});
  f.A = planted_block_matrix(part);
  f.truth = GroundTruth::make(iota_set(10), iota_set(10), 20, 20);
  f.budget.delta = 0.2;
  f.budget.delta_tilde = 0.8;
  f.budget.r1 = f.budget.r2 = f.budget.r3 = 10;
  f.budget.r_diag = {10};
  f.budget.rbar11 = 10;
  return f;
}

std::optional<ErrorKind> kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace

TEST(ApplyAdversary, EmptyScriptLeavesMatrixUnchanged) {
  auto f = adv_fixture();
  EXPECT_TRUE(apply_adversary(f.A, f.truth, f.budget, {}) == f.A);
}

TEST(ApplyAdversary, SingleDeletionAccepted) {
  auto f = adv_fixture();
  EditScript e;
  e.deletions = {{2, 3}};
  const auto B = apply_adversary(f.A, f.truth, f.budget, e);
  EXPECT_FALSE(B(2, 3));
  EXPECT_EQ(B.count_ones(), 99);
}

TEST(ApplyAdversary, TooManyColumnAdditionsExceedBudget) {
  auto f = adv_fixture();
  // delta * m1 = 2, so three additions in one column of A[U1, V \ V1] fail.
  EditScript e;
  e.additions = {{0, 12}, {1, 12}, {2, 12}};
  EXPECT_EQ(kind_of([&] { apply_adversary(f.A, f.truth, f.budget, e); }),
            ErrorKind::BudgetExceeded);
  e.additions.pop_back();
  EXPECT_NO_THROW(apply_adversary(f.A, f.truth, f.budget, e));
}

TEST(ApplyAdversary, RetentionCapNamesTheViolatedCap) {
  auto f = adv_fixture();
  EditScript e;
  e.deletions = {{0, 0}, {1, 0}, {2, 0}};  // column keeps 7 < 8
  try {
    apply_adversary(f.A, f.truth, f.budget, e);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::BudgetExceeded);
    EXPECT_NE(std::string(err.what()).find("delta_tilde"), std::string::npos);
  }
}

TEST(ApplyAdversary, RejectsMisplacedEdits) {
  auto f = adv_fixture();
  EditScript del_outside;
  del_outside.deletions = {{15, 15}};
  EXPECT_TRUE(kind_of([&] { apply_adversary(f.A, f.truth, f.budget, del_outside); }));
  EditScript add_inside;
  add_inside.additions = {{1, 1}};
  EXPECT_TRUE(kind_of([&] { apply_adversary(f.A, f.truth, f.budget, add_inside); }));
}

TEST(ApplyAdversary, AggregateCapsAreEnforced) {
  auto f = adv_fixture();
  f.budget.r3 = 0;
  f.budget.r_diag = {1};
  EditScript e;
  e.additions = {{15, 15}, {16, 16}};
  try {
    apply_adversary(f.A, f.truth, f.budget, e);
    FAIL();
  } catch (const Error& err) {
    EXPECT_NE(std::string(err.what()).find("r_diag"), std::string::npos);
  }
}

TEST(ApplyAdversary, OutputDiffersExactlyAtEditPositions) {
  auto f = adv_fixture();
  const auto part = BlockPartition::planted(f.truth.planted_rows, f.truth.planted_cols, 20, 20);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto e = random_edit_script(f.A, part, f.budget, 0.5, seed);
    const auto B = apply_adversary(f.A, f.truth, f.budget, e);
    std::set<std::pair<Index, Index>> edits(e.deletions.begin(), e.deletions.end());
    edits.insert(e.additions.begin(), e.additions.end());
    EXPECT_EQ(edits.size(), e.deletions.size() + e.additions.size());
    for (Index i = 0; i < 20; ++i) {
      for (Index j = 0; j < 20; ++j) {
        EXPECT_EQ(f.A(i, j) != B(i, j), edits.count({i, j}) == 1);
      }
    }
  }
}

TEST(RandomEditScript, FillsHalfOfEachCap) {
  auto f = adv_fixture();
  const auto part = BlockPartition::planted(f.truth.planted_rows, f.truth.planted_cols, 20, 20);
  const auto e = random_edit_script(f.A, part, f.budget, 0.5, 1);
  EXPECT_EQ(e.deletions.size(), 5u);
  // r1, r2 and the single remaining diagonal block; no off-diagonal pool exists.
  EXPECT_EQ(e.additions.size(), 15u);
  EXPECT_TRUE(random_edit_script(f.A, part, f.budget, 0.5, 1).additions == e.additions);
}

// ---------------------------------------------------------------------------

TEST(MatrixFiles, DenseRoundTrip) {
  const auto s = sample_psm(experiment2_spec(0.6, 4, 9), 2);
  std::stringstream io;
  write_dense(io, s.A);
  EXPECT_TRUE(read_matrix(io) == s.A);
}

TEST(MatrixFiles, SparseRoundTripIsOneBased) {
  BinaryMatrix A(2, 3);
  A.set(0, 2, true);
  A.set(1, 0, true);
  std::stringstream io;
  write_sparse(io, A);
  EXPECT_EQ(io.str(), "2 3 2\n1 3\n2 1\n");
  EXPECT_TRUE(read_matrix(io) == A);
}

TEST(MatrixFiles, DenseLayoutText) {
  BinaryMatrix A(2, 2);
  A.set(0, 1, true);
  std::stringstream io;
  write_dense(io, A);
  EXPECT_EQ(io.str(), "2 2\n0 1\n0 0\n");
}

TEST(MatrixFiles, MalformedInputIsParseError) {
  std::istringstream bad_digit("2 2\n0 1\n0 2\n");
  EXPECT_EQ(kind_of([&] { read_matrix(bad_digit); }), ErrorKind::Parse);
  std::istringstream short_rows("2 2\n0 1\n");
  EXPECT_EQ(kind_of([&] { read_matrix(short_rows); }), ErrorKind::Parse);
  std::istringstream out_of_range("2 2 1\n3 1\n");
  EXPECT_EQ(kind_of([&] { read_matrix(out_of_range); }), ErrorKind::Parse);
}

TEST(TruthManifest, RoundTrip) {
  const auto spec = experiment2_spec(0.9, 5, 12);
  const auto s = sample_psm(spec, 4);
  const auto kv = truth_manifest(s.truth, spec, 4);
  const auto t = truth_from_manifest(kv);
  EXPECT_EQ(t.planted_rows, s.truth.planted_rows);
  EXPECT_EQ(t.planted_cols, s.truth.planted_cols);
  EXPECT_TRUE(t.X0 == s.truth.X0);
}

TEST(GroundTruth, IndicatorIsRankOne) {
  const auto t = GroundTruth::make({1, 4}, {0, 2, 3}, 6, 5);
  EXPECT_EQ(t.X0.sum(), 6.0);
  Eigen::FullPivLU<Matrix> lu(t.X0);
  EXPECT_EQ(lu.rank(), 1);
  EXPECT_EQ(t.X0(4, 3), 1.0);
  EXPECT_EQ(t.X0(4, 1), 0.0);
}
