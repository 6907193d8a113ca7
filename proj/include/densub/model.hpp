#pragma once

#include "densub/kv.hpp"
#include "densub/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace densub {

/// Row and column block structure shared by the random and adversarial
/// models. Block 0 on each side is the planted block.
struct BlockPartition {
  std::vector<IndexSet> rows;
  std::vector<IndexSet> cols;

  Index num_rows() const;
  Index num_cols() const;
  /// Throws InvalidSpec unless both sides are disjoint and cover [0, size).
  void validate() const;
  /// Block id of every row / column.
  std::vector<int> row_labels() const;
  std::vector<int> col_labels() const;

  /// Contiguous blocks with the given sizes.
  static BlockPartition contiguous(const std::vector<Index>& row_sizes,
                                   const std::vector<Index>& col_sizes);
  /// {U1, rest} x {V1, rest}; a side without a remainder has one block.
  static BlockPartition planted(const IndexSet& rows, const IndexSet& cols,
                                Index M, Index N);
};

struct PlantedModelSpec {
  BlockPartition partition;
  Matrix probs;  // k1 x k2 table of p_rs
  /// Sample the upper triangle and mirror it. Requires M = N and equal
  /// partitions.
  bool symmetric = false;
  /// In symmetric mode, force the diagonal inside the planted block to 1
  /// (graph self-loops) instead of sampling it.
  bool unit_planted_diagonal = false;

  Index rows() const { return partition.num_rows(); }
  Index cols() const { return partition.num_cols(); }
  void validate() const;

  KeyValue to_kv() const;
  /// Reads contiguous `row_blocks` / `col_blocks` sizes plus `probs`
  /// (row-major), or a `preset = experiment1|experiment2` with q, m, M.
  static PlantedModelSpec from_kv(const KeyValue& kv);
};

struct GroundTruth {
  IndexSet planted_rows;
  IndexSet planted_cols;
  Matrix X0;  // indicator of planted_rows x planted_cols

  static GroundTruth make(const IndexSet& rows, const IndexSet& cols, Index M,
                          Index N);
};

struct SampledInstance {
  BinaryMatrix A;
  GroundTruth truth;
};

SampledInstance sample_psm(const PlantedModelSpec& spec, std::uint64_t seed);

/// Block sizes m, ..., m, remainder with p_11 = q, p_jj = 1/(4(j-1)),
/// p_ij = p_ii p_jj. Symmetric.
PlantedModelSpec experiment1_spec(double q, Index m, Index M);

/// Two blocks of sizes m and M - m, p_11 = p_22 = q, p_12 = p_21 = 0.25.
PlantedModelSpec experiment2_spec(double q, Index m, Index M);

// ---------------------------------------------------------------------------
// Adversarial model

struct AdversarialBudget {
  double delta = 0.0;        // addition fraction, in [0, 1)
  double delta_tilde = 1.0;  // retention fraction, in (0, 1]
  Index r1 = 0;  // additions in A[U1, V \ V1]
  Index r2 = 0;  // additions in A[U \ U1, V1]
  Index r3 = 0;  // additions in off-diagonal blocks (r != s, r, s >= 2)
  std::vector<Index> r_diag;  // additions in block (k, k), k >= 2
  Index rbar11 = 0;           // deletions inside A[U1, V1]

  void validate() const;
  Index max_cap() const;
};

struct EditScript {
  std::vector<std::pair<Index, Index>> deletions;
  std::vector<std::pair<Index, Index>> additions;

  bool empty() const { return deletions.empty() && additions.empty(); }
};

/// Applies `edits` to A after checking every cap of `budget`. A violated cap
/// raises BudgetExceeded naming it. `partition` defaults to
/// BlockPartition::planted(truth).
BinaryMatrix apply_adversary(const BinaryMatrix& A, const GroundTruth& truth,
                             const AdversarialBudget& budget,
                             const EditScript& edits);
BinaryMatrix apply_adversary(const BinaryMatrix& A, const GroundTruth& truth,
                             const AdversarialBudget& budget,
                             const EditScript& edits,
                             const BlockPartition& partition);

/// Edit script that uses floor(fill * cap) of every cap with positions drawn
/// uniformly among those that keep the per-row and per-column limits.
EditScript random_edit_script(const BinaryMatrix& A,
                              const BlockPartition& partition,
                              const AdversarialBudget& budget, double fill,
                              std::uint64_t seed);

/// Matrix with an all-ones planted block and zeros elsewhere.
BinaryMatrix planted_block_matrix(const BlockPartition& partition);

// ---------------------------------------------------------------------------
// Matrix files

/// "M N" header then M lines of N digits.
void write_dense(std::ostream& out, const BinaryMatrix& A);
/// "M N nnz" header then one "i j" line per one, 1-based.
void write_sparse(std::ostream& out, const BinaryMatrix& A);
/// Dense real matrix in the dense layout, 12 significant digits.
void write_real(std::ostream& out, const Matrix& X);

/// Detects the layout from the header field count.
BinaryMatrix read_matrix(std::istream& in);
BinaryMatrix load_matrix(const std::string& path);
void save_matrix(const std::string& path, const BinaryMatrix& A, bool sparse);

/// Ground-truth manifest: planted indices (0-based) plus the generating spec.
KeyValue truth_manifest(const GroundTruth& truth, const PlantedModelSpec& spec,
                        std::uint64_t seed);
GroundTruth truth_from_manifest(const KeyValue& kv);

}  // namespace densub
