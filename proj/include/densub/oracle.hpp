#pragma once

#include "densub/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace densub {

struct OracleResult {
  IndexSet best_rows;
  IndexSet best_cols;
  Index best_count = 0;
  /// Co-optimal supports including the best one, at most tie_cap of them.
  std::vector<std::pair<IndexSet, IndexSet>> ties;
  /// Exact number of co-optimal supports (saturates at UINT64_MAX).
  std::uint64_t tie_count = 0;
};

/// Number of m-subsets times number of n-subsets, as a double.
double support_count(Index M, Index N, Index m, Index n);

/// Exhaustive densest m x n submatrix. Throws TooLarge when more than 1e8
/// supports would have to be examined.
OracleResult densest_submatrix_bruteforce(const BinaryMatrix& A, Index m, Index n,
                                          std::size_t tie_cap = 64);

/// All maximal cliques of a symmetric adjacency matrix (the diagonal is
/// ignored), each sorted ascending, in lexicographic order.
std::vector<IndexSet> maximal_cliques(const BinaryMatrix& adjacency);

/// The largest of the maximal cliques.
std::vector<IndexSet> maximum_cliques(const BinaryMatrix& adjacency);

bool is_clique(const BinaryMatrix& adjacency, const IndexSet& nodes);

}  // namespace densub
