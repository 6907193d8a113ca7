#include "densub/error.hpp"
#include "densub/oracle.hpp"
#include "densub/rng.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <fstream>
#include <sstream>
#include <numeric>

using namespace densub;

namespace {

BinaryMatrix random_binary(Rng& rng, Index r, Index c, double p) {
  BinaryMatrix A(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) A.set(i, j, rng.bernoulli(p));
  }
  return A;
}

// Exhaustive search over row and column bitmasks.
std::pair<Index, std::uint64_t> naive_best(const BinaryMatrix& A, Index m, Index n) {
  Index best = -1;
  std::uint64_t ties = 0;
  for (unsigned rm = 0; rm < (1u << A.rows()); ++rm) {
    if (std::popcount(rm) != m) continue;
    for (unsigned cm = 0; cm < (1u << A.cols()); ++cm) {
      if (std::popcount(cm) != n) continue;
      Index count = 0;
      for (Index i = 0; i < A.rows(); ++i) {
        for (Index j = 0; j < A.cols(); ++j) {
          if ((rm >> i & 1u) && (cm >> j & 1u) && A(i, j)) ++count;
        }
      }
      if (count > best) {
        best = count;
        ties = 1;
      } else if (count == best) {
        ++ties;
      }
    }
  }
  return {best, ties};
}

BinaryMatrix graph(Index n, const std::vector<std::pair<Index, Index>>& edges) {
  BinaryMatrix A(n, n);
  for (auto [u, v] : edges) {
    A.set(u, v, true);
    A.set(v, u, true);
  }
  return A;
}

}  // namespace

TEST(BruteForce, AllOnesSingleEntry) {
  const auto r = densest_submatrix_bruteforce(BinaryMatrix(4, 5, true), 1, 1, 8);
  EXPECT_EQ(r.best_count, 1);
  EXPECT_EQ(r.tie_count, 20u);
  EXPECT_EQ(r.ties.size(), 8u);
}

TEST(BruteForce, PlantedBlockIsUnique) {
  BinaryMatrix A(8, 8);
  for (Index i = 1; i < 4; ++i) {
    for (Index j = 5; j < 8; ++j) A.set(i, j, true);
  }
  const auto r = densest_submatrix_bruteforce(A, 3, 3);
  EXPECT_EQ(r.best_count, 9);
  EXPECT_EQ(r.tie_count, 1u);
  EXPECT_EQ(r.best_rows, (IndexSet{1, 2, 3}));
  EXPECT_EQ(r.best_cols, (IndexSet{5, 6, 7}));
}

TEST(BruteForce, DiagonalTwoByTwo) {
  BinaryMatrix A(2, 2);
  A.set(0, 0, true);
  A.set(1, 1, true);
  const auto r = densest_submatrix_bruteforce(A, 1, 1);
  EXPECT_EQ(r.best_count, 1);
  EXPECT_EQ(r.tie_count, 2u);
  EXPECT_EQ(r.ties.size(), 2u);
}

TEST(BruteForce, MatchesNaiveEnumeration) {
  Rng rng(5);
  for (int t = 0; t < 40; ++t) {
    const Index M = 2 + static_cast<Index>(rng.below(6));
    const Index N = 2 + static_cast<Index>(rng.below(6));
    const Index m = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(M)));
    const Index n = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(N)));
    const auto A = random_binary(rng, M, N, 0.5);
    const auto r = densest_submatrix_bruteforce(A, m, n, 1000);
    const auto [best, ties] = naive_best(A, m, n);
    EXPECT_EQ(r.best_count, best);
    EXPECT_EQ(r.tie_count, ties);
    EXPECT_EQ(r.ties.size(), std::min<std::size_t>(ties, 1000));
    Index count = 0;
    for (Index i : r.best_rows) {
      for (Index j : r.best_cols) count += A(i, j);
    }
    EXPECT_EQ(count, best);
  }
}

TEST(BruteForce, PermutationEquivariant) {
  Rng rng(8);
  for (int t = 0; t < 10; ++t) {
    const auto A = random_binary(rng, 7, 6, 0.45);
    std::vector<Index> pr(7), pc(6);
    std::iota(pr.begin(), pr.end(), 0);
    std::iota(pc.begin(), pc.end(), 0);
    for (Index k = 6; k > 0; --k) std::swap(pr[k], pr[rng.below(k + 1)]);
    for (Index k = 5; k > 0; --k) std::swap(pc[k], pc[rng.below(k + 1)]);
    BinaryMatrix B(7, 6);
    for (Index i = 0; i < 7; ++i) {
      for (Index j = 0; j < 6; ++j) B.set(pr[i], pc[j], A(i, j));
    }
    const auto ra = densest_submatrix_bruteforce(A, 3, 2);
    const auto rb = densest_submatrix_bruteforce(B, 3, 2);
    EXPECT_EQ(ra.best_count, rb.best_count);
    EXPECT_EQ(ra.tie_count, rb.tie_count);
  }
}

TEST(BruteForce, GuardRejectsHugeSearch) {
  try {
    densest_submatrix_bruteforce(BinaryMatrix(60, 60), 10, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooLarge);
  }
  EXPECT_GT(support_count(60, 60, 10, 10), 1e8);
  EXPECT_DOUBLE_EQ(support_count(5, 4, 2, 2), 60.0);
}

TEST(BruteForce, CliqueSupportCountsMatchDiagonalConvention) {
  auto A = graph(6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}});
  EXPECT_EQ(densest_submatrix_bruteforce(A, 3, 3).best_count, 6);
  for (Index i = 0; i < 6; ++i) A.set(i, i, true);
  EXPECT_EQ(densest_submatrix_bruteforce(A, 3, 3).best_count, 9);
}

TEST(Cliques, Triangle) {
  const auto c = maximal_cliques(graph(3, {{0, 1}, {1, 2}, {0, 2}}));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0], (IndexSet{0, 1, 2}));
}

TEST(Cliques, Path) {
  const auto c = maximal_cliques(graph(3, {{0, 1}, {1, 2}}));
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], (IndexSet{0, 1}));
  EXPECT_EQ(c[1], (IndexSet{1, 2}));
}

TEST(Cliques, DiagonalIgnoredAndAsymmetryRejected) {
  auto A = graph(3, {{0, 1}, {1, 2}});
  A.set(0, 0, true);
  EXPECT_EQ(maximal_cliques(A).size(), 2u);
  A.set(2, 0, true);
  try {
    maximal_cliques(A);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}

TEST(Cliques, MaximalCliquesAreMaximal) {
  Rng rng(13);
  for (int t = 0; t < 20; ++t) {
    const Index n = 12;
    BinaryMatrix A(n, n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        const bool e = rng.bernoulli(0.5);
        A.set(i, j, e);
        A.set(j, i, e);
      }
    }
    const auto cliques = maximal_cliques(A);
    // Count maximal cliques by brute force over all subsets.
    std::size_t expected = 0;
    for (unsigned s = 1; s < (1u << n); ++s) {
      IndexSet nodes;
      for (Index i = 0; i < n; ++i) {
        if (s >> i & 1u) nodes.push_back(i);
      }
      if (!is_clique(A, nodes)) continue;
      bool maximal = true;
      for (Index v = 0; v < n && maximal; ++v) {
        if (s >> v & 1u) continue;
        IndexSet bigger = nodes;
        bigger.push_back(v);
        if (is_clique(A, bigger)) maximal = false;
      }
      if (maximal) ++expected;
    }
    EXPECT_EQ(cliques.size(), expected);
    for (const auto& c : cliques) EXPECT_TRUE(is_clique(A, c));
  }
}

TEST(Cliques, KarateHasTwoMaximumFiveCliques) {
  BinaryMatrix A(34, 34);
  std::ifstream in(std::string(DENSUB_TEST_DATA) + "/karate.edges");
  ASSERT_TRUE(in);
  Index edges = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    Index u, v;
    ASSERT_TRUE(fields >> u >> v);
    A.set(u, v, true);
    A.set(v, u, true);
    ++edges;
  }
  EXPECT_EQ(edges, 78);
  const auto best = maximum_cliques(A);
  ASSERT_EQ(best.size(), 2u);
  EXPECT_EQ(best[0], (IndexSet{0, 1, 2, 3, 7}));
  EXPECT_EQ(best[1], (IndexSet{0, 1, 2, 3, 13}));
}
