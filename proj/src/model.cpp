#include "densub/model.hpp"

#include "densub/error.hpp"
#include "densub/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace densub {

namespace {

constexpr double kFractionSlack = 1e-9;

void validate_side(const std::vector<IndexSet>& blocks, const char* side) {
  require(!blocks.empty(), ErrorKind::InvalidSpec,
          std::string(side) + " partition is empty");
  Index total = 0;
  for (const auto& b : blocks) {
    require(!b.empty(), ErrorKind::InvalidSpec,
            std::string(side) + " partition has an empty block");
    total += static_cast<Index>(b.size());
  }
  std::vector<char> seen(static_cast<std::size_t>(total), 0);
  for (const auto& b : blocks) {
    for (Index i : b) {
      require(i >= 0 && i < total, ErrorKind::InvalidSpec,
              std::string(side) + " partition does not cover [0," +
                  std::to_string(total) + ")");
      require(!seen[static_cast<std::size_t>(i)], ErrorKind::InvalidSpec,
              std::string(side) + " partition blocks overlap at index " +
                  std::to_string(i));
      seen[static_cast<std::size_t>(i)] = 1;
    }
  }
}

std::vector<int> labels_of(const std::vector<IndexSet>& blocks) {
  Index total = 0;
  for (const auto& b : blocks) total += static_cast<Index>(b.size());
  std::vector<int> out(static_cast<std::size_t>(total), -1);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    for (Index i : blocks[k]) out[static_cast<std::size_t>(i)] = static_cast<int>(k);
  }
  return out;
}

std::vector<IndexSet> contiguous_blocks(const std::vector<Index>& sizes) {
  std::vector<IndexSet> out;
  Index offset = 0;
  for (Index s : sizes) {
    require(s >= 1, ErrorKind::InvalidSpec, "block sizes must be positive");
    out.push_back(iota_set(s, offset));
    offset += s;
  }
  return out;
}

std::vector<IndexSet> read_side(const KeyValue& kv, const std::string& prefix) {
  if (kv.has(prefix + "_blocks")) {
    std::vector<Index> sizes;
    for (auto s : kv.get_ints(prefix + "_blocks")) sizes.push_back(s);
    return contiguous_blocks(sizes);
  }
  std::vector<IndexSet> out;
  for (int k = 0;; ++k) {
    const std::string key = prefix + "_block." + std::to_string(k);
    if (!kv.has(key)) break;
    IndexSet b;
    for (auto i : kv.get_ints(key)) b.push_back(i);
    out.push_back(std::move(b));
  }
  require(!out.empty(), ErrorKind::InvalidSpec,
          "spec needs '" + prefix + "_blocks' or '" + prefix + "_block.0'");
  return out;
}

std::vector<std::int64_t> to_int64(const IndexSet& s) {
  return {s.begin(), s.end()};
}

void shuffle(std::vector<std::pair<Index, Index>>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

Index floor_cap(double value) {
  return static_cast<Index>(std::floor(value + kFractionSlack));
}

}  // namespace

// ---------------------------------------------------------------------------

Index BlockPartition::num_rows() const {
  Index n = 0;
  for (const auto& b : rows) n += static_cast<Index>(b.size());
  return n;
}

Index BlockPartition::num_cols() const {
  Index n = 0;
  for (const auto& b : cols) n += static_cast<Index>(b.size());
  return n;
}

void BlockPartition::validate() const {
  validate_side(rows, "row");
  validate_side(cols, "column");
}

std::vector<int> BlockPartition::row_labels() const { return labels_of(rows); }
std::vector<int> BlockPartition::col_labels() const { return labels_of(cols); }

BlockPartition BlockPartition::contiguous(const std::vector<Index>& row_sizes,
                                          const std::vector<Index>& col_sizes) {
  return {contiguous_blocks(row_sizes), contiguous_blocks(col_sizes)};
}

BlockPartition BlockPartition::planted(const IndexSet& rows, const IndexSet& cols,
                                       Index M, Index N) {
  auto complement = [](const IndexSet& s, Index size) {
    std::vector<char> in(static_cast<std::size_t>(size), 0);
    for (Index i : s) {
      require(i >= 0 && i < size, ErrorKind::InvalidArgument,
              "planted index out of range");
      in[static_cast<std::size_t>(i)] = 1;
    }
    IndexSet out;
    for (Index i = 0; i < size; ++i) {
      if (!in[static_cast<std::size_t>(i)]) out.push_back(i);
    }
    return out;
  };
  BlockPartition p;
  p.rows.push_back(normalized(rows));
  p.cols.push_back(normalized(cols));
  auto rest_rows = complement(rows, M);
  auto rest_cols = complement(cols, N);
  if (!rest_rows.empty()) p.rows.push_back(std::move(rest_rows));
  if (!rest_cols.empty()) p.cols.push_back(std::move(rest_cols));
  return p;
}

// ---------------------------------------------------------------------------

void PlantedModelSpec::validate() const {
  partition.validate();
  require(probs.rows() == static_cast<Index>(partition.rows.size()) &&
              probs.cols() == static_cast<Index>(partition.cols.size()),
          ErrorKind::InvalidSpec, "probability table does not match the partition");
  for (Index r = 0; r < probs.rows(); ++r) {
    for (Index s = 0; s < probs.cols(); ++s) {
      const double p = probs(r, s);
      require(p >= 0.0 && p <= 1.0, ErrorKind::InvalidSpec,
              "block probability outside [0,1]");
    }
  }
  if (symmetric) {
    require(rows() == cols(), ErrorKind::InvalidSpec,
            "symmetric sampling needs a square matrix");
    require(partition.rows.size() == partition.cols.size(), ErrorKind::InvalidSpec,
            "symmetric sampling needs identical row and column partitions");
    for (std::size_t k = 0; k < partition.rows.size(); ++k) {
      require(normalized(partition.rows[k]) == normalized(partition.cols[k]),
              ErrorKind::InvalidSpec,
              "symmetric sampling needs identical row and column partitions");
    }
    require(probs.isApprox(probs.transpose(), 0.0), ErrorKind::InvalidSpec,
            "symmetric sampling needs a symmetric probability table");
  }
}

KeyValue PlantedModelSpec::to_kv() const {
  KeyValue kv;
  kv.set("M", static_cast<std::int64_t>(rows()));
  kv.set("N", static_cast<std::int64_t>(cols()));
  for (std::size_t k = 0; k < partition.rows.size(); ++k) {
    kv.set("row_block." + std::to_string(k), to_int64(partition.rows[k]));
  }
  for (std::size_t k = 0; k < partition.cols.size(); ++k) {
    kv.set("col_block." + std::to_string(k), to_int64(partition.cols[k]));
  }
  std::vector<double> flat;
  for (Index r = 0; r < probs.rows(); ++r) {
    for (Index s = 0; s < probs.cols(); ++s) flat.push_back(probs(r, s));
  }
  kv.set("probs", flat);
  kv.set("symmetric", symmetric ? std::string("true") : std::string("false"));
  kv.set("unit_planted_diagonal",
         unit_planted_diagonal ? std::string("true") : std::string("false"));
  return kv;
}

PlantedModelSpec PlantedModelSpec::from_kv(const KeyValue& kv) {
  PlantedModelSpec spec;
  if (auto preset = kv.find("preset")) {
    const double q = kv.get_double("q");
    const Index m = kv.get_int("m");
    const Index M = kv.get_int("M");
    if (*preset == "experiment1") {
      spec = experiment1_spec(q, m, M);
    } else if (*preset == "experiment2") {
      spec = experiment2_spec(q, m, M);
    } else {
      fail(ErrorKind::InvalidSpec, "unknown preset '" + *preset + "'");
    }
    spec.unit_planted_diagonal = kv.get_bool("unit_planted_diagonal", false);
    return spec;
  }
  spec.partition.rows = read_side(kv, "row");
  spec.partition.cols = read_side(kv, "col");
  const auto flat = kv.get_doubles("probs");
  const auto k1 = static_cast<Index>(spec.partition.rows.size());
  const auto k2 = static_cast<Index>(spec.partition.cols.size());
  require(static_cast<Index>(flat.size()) == k1 * k2, ErrorKind::InvalidSpec,
          "probs needs " + std::to_string(k1 * k2) + " entries");
  spec.probs.resize(k1, k2);
  for (Index r = 0; r < k1; ++r) {
    for (Index s = 0; s < k2; ++s) spec.probs(r, s) = flat[static_cast<std::size_t>(r * k2 + s)];
  }
  spec.symmetric = kv.get_bool("symmetric", false);
  spec.unit_planted_diagonal = kv.get_bool("unit_planted_diagonal", false);
  spec.validate();
  return spec;
}

GroundTruth GroundTruth::make(const IndexSet& rows, const IndexSet& cols, Index M,
                              Index N) {
  GroundTruth t;
  t.planted_rows = normalized(rows);
  t.planted_cols = normalized(cols);
  t.X0 = indicator(t.planted_rows, M) * indicator(t.planted_cols, N).transpose();
  return t;
}

SampledInstance sample_psm(const PlantedModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  const Index M = spec.rows();
  const Index N = spec.cols();
  const auto rl = spec.partition.row_labels();
  const auto cl = spec.partition.col_labels();
  BinaryMatrix A(M, N);
  Rng rng(seed);
  for (Index j = 0; j < N; ++j) {
    const int s = cl[static_cast<std::size_t>(j)];
    const Index top = spec.symmetric ? j + 1 : M;
    for (Index i = 0; i < top; ++i) {
      const int r = rl[static_cast<std::size_t>(i)];
      const bool one = rng.bernoulli(spec.probs(r, s));
      A.set(i, j, one);
      if (spec.symmetric) A.set(j, i, one);
    }
  }
  if (spec.symmetric && spec.unit_planted_diagonal) {
    for (Index i : spec.partition.rows[0]) A.set(i, i, true);
  }
  return {std::move(A), GroundTruth::make(spec.partition.rows[0],
                                          spec.partition.cols[0], M, N)};
}

PlantedModelSpec experiment1_spec(double q, Index m, Index M) {
  require(m >= 1 && m <= M, ErrorKind::InvalidArgument,
          "experiment 1 needs 1 <= m <= M");
  require(q >= 0.0 && q <= 1.0, ErrorKind::InvalidArgument, "q must lie in [0,1]");
  const Index k = M / m;
  std::vector<Index> sizes;
  if (k == 1) {
    sizes.push_back(m);
    if (M > m) sizes.push_back(M - m);
  } else {
    for (Index b = 0; b + 1 < k; ++b) sizes.push_back(m);
    sizes.push_back(M - (k - 1) * m);
  }
  const auto K = static_cast<Index>(sizes.size());
  Vector diag(K);
  diag(0) = q;
  for (Index j = 1; j < K; ++j) diag(j) = 1.0 / (4.0 * static_cast<double>(j));
  PlantedModelSpec spec;
  spec.partition = BlockPartition::contiguous(sizes, sizes);
  spec.probs = diag * diag.transpose();
  spec.probs.diagonal() = diag;
  spec.symmetric = true;
  return spec;
}

PlantedModelSpec experiment2_spec(double q, Index m, Index M) {
  require(m >= 1 && m <= M, ErrorKind::InvalidArgument,
          "experiment 2 needs 1 <= m <= M");
  require(q >= 0.0 && q <= 1.0, ErrorKind::InvalidArgument, "q must lie in [0,1]");
  PlantedModelSpec spec;
  if (m == M) {
    spec.partition = BlockPartition::contiguous({M}, {M});
    spec.probs = Matrix::Constant(1, 1, q);
  } else {
    spec.partition = BlockPartition::contiguous({m, M - m}, {m, M - m});
    spec.probs.resize(2, 2);
    spec.probs << q, 0.25, 0.25, q;
  }
  spec.symmetric = true;
  return spec;
}

// ---------------------------------------------------------------------------

void AdversarialBudget::validate() const {
  require(delta >= 0.0 && delta < 1.0, ErrorKind::InvalidArgument,
          "delta must lie in [0,1)");
  require(delta_tilde > 0.0 && delta_tilde <= 1.0, ErrorKind::InvalidArgument,
          "delta_tilde must lie in (0,1]");
  require(r1 >= 0 && r2 >= 0 && r3 >= 0 && rbar11 >= 0, ErrorKind::InvalidArgument,
          "edit caps must be nonnegative");
  for (Index r : r_diag) {
    require(r >= 0, ErrorKind::InvalidArgument, "edit caps must be nonnegative");
  }
}

Index AdversarialBudget::max_cap() const {
  Index out = std::max({r1, r2, r3, rbar11});
  for (Index r : r_diag) out = std::max(out, r);
  return out;
}

BinaryMatrix apply_adversary(const BinaryMatrix& A, const GroundTruth& truth,
                             const AdversarialBudget& budget,
                             const EditScript& edits) {
  return apply_adversary(
      A, truth, budget, edits,
      BlockPartition::planted(truth.planted_rows, truth.planted_cols, A.rows(),
                              A.cols()));
}

BinaryMatrix apply_adversary(const BinaryMatrix& A, const GroundTruth& truth,
                             const AdversarialBudget& budget,
                             const EditScript& edits,
                             const BlockPartition& partition) {
  budget.validate();
  partition.validate();
  require(partition.num_rows() == A.rows() && partition.num_cols() == A.cols(),
          ErrorKind::InvalidArgument, "partition does not match the matrix");
  require(normalized(partition.rows[0]) == normalized(truth.planted_rows) &&
              normalized(partition.cols[0]) == normalized(truth.planted_cols),
          ErrorKind::InvalidArgument,
          "first partition block must be the planted block");
  const auto rl = partition.row_labels();
  const auto cl = partition.col_labels();
  const Index m1 = static_cast<Index>(truth.planted_rows.size());
  const Index n1 = static_cast<Index>(truth.planted_cols.size());
  for (Index i : truth.planted_rows) {
    for (Index j : truth.planted_cols) {
      require(A(i, j), ErrorKind::InvalidArgument,
              "planted block must be all ones before adversarial edits");
    }
  }

  const Index M = A.rows();
  const Index N = A.cols();
  std::vector<char> touched(static_cast<std::size_t>(M * N), 0);
  auto mark = [&](Index i, Index j) {
    require(i >= 0 && i < M && j >= 0 && j < N, ErrorKind::InvalidArgument,
            "edit position out of range");
    auto& t = touched[static_cast<std::size_t>(j * M + i)];
    require(!t, ErrorKind::InvalidArgument,
            "edit script repeats position (" + std::to_string(i) + "," +
                std::to_string(j) + ")");
    t = 1;
  };

  std::vector<Index> del_row(static_cast<std::size_t>(M), 0);
  std::vector<Index> del_col(static_cast<std::size_t>(N), 0);
  for (auto [i, j] : edits.deletions) {
    mark(i, j);
    require(rl[static_cast<std::size_t>(i)] == 0 && cl[static_cast<std::size_t>(j)] == 0,
            ErrorKind::InvalidArgument, "deletion outside the planted block");
    ++del_row[static_cast<std::size_t>(i)];
    ++del_col[static_cast<std::size_t>(j)];
  }
  require(static_cast<Index>(edits.deletions.size()) <= budget.rbar11,
          ErrorKind::BudgetExceeded, "rbar11: too many deletions in the planted block");
  for (Index j : truth.planted_cols) {
    const double kept = static_cast<double>(m1 - del_col[static_cast<std::size_t>(j)]);
    require(kept + kFractionSlack >= budget.delta_tilde * static_cast<double>(m1),
            ErrorKind::BudgetExceeded,
            "delta_tilde: column " + std::to_string(j) + " keeps fewer than " +
                format_number(budget.delta_tilde * static_cast<double>(m1)) + " ones");
  }
  for (Index i : truth.planted_rows) {
    const double kept = static_cast<double>(n1 - del_row[static_cast<std::size_t>(i)]);
    require(kept + kFractionSlack >= budget.delta_tilde * static_cast<double>(n1),
            ErrorKind::BudgetExceeded,
            "delta_tilde: row " + std::to_string(i) + " keeps fewer than " +
                format_number(budget.delta_tilde * static_cast<double>(n1)) + " ones");
  }

  const auto K = partition.rows.size();
  std::vector<Index> add_col(static_cast<std::size_t>(N), 0);
  std::vector<Index> add_row(static_cast<std::size_t>(M), 0);
  std::vector<Index> add_diag(std::max<std::size_t>(K, partition.cols.size()), 0);
  Index add_r1 = 0, add_r2 = 0, add_r3 = 0;
  for (auto [i, j] : edits.additions) {
    mark(i, j);
    require(!A(i, j), ErrorKind::InvalidArgument,
            "addition at (" + std::to_string(i) + "," + std::to_string(j) +
                ") which is already one");
    const int r = rl[static_cast<std::size_t>(i)];
    const int s = cl[static_cast<std::size_t>(j)];
    require(!(r == 0 && s == 0), ErrorKind::InvalidArgument,
            "addition inside the planted block");
    if (r == 0) {
      ++add_r1;
      ++add_col[static_cast<std::size_t>(j)];
    } else if (s == 0) {
      ++add_r2;
      ++add_row[static_cast<std::size_t>(i)];
    } else if (r == s) {
      ++add_diag[static_cast<std::size_t>(r)];
    } else {
      ++add_r3;
    }
  }
  require(add_r1 <= budget.r1, ErrorKind::BudgetExceeded,
          "r1: too many additions in the planted rows");
  require(add_r2 <= budget.r2, ErrorKind::BudgetExceeded,
          "r2: too many additions in the planted columns");
  require(add_r3 <= budget.r3, ErrorKind::BudgetExceeded,
          "r3: too many additions in off-diagonal blocks");
  for (std::size_t k = 1; k < add_diag.size(); ++k) {
    const Index cap = k - 1 < budget.r_diag.size() ? budget.r_diag[k - 1] : 0;
    require(add_diag[k] <= cap, ErrorKind::BudgetExceeded,
            "r_diag[" + std::to_string(k + 1) + "]: too many additions in block (" +
                std::to_string(k + 1) + "," + std::to_string(k + 1) + ")");
  }
  const double col_cap = budget.delta * static_cast<double>(m1);
  for (Index j = 0; j < N; ++j) {
    require(static_cast<double>(add_col[static_cast<std::size_t>(j)]) <= col_cap + kFractionSlack,
            ErrorKind::BudgetExceeded,
            "delta: column " + std::to_string(j) + " gains more than " +
                format_number(col_cap) + " ones in the planted rows");
  }
  const double row_cap = budget.delta * static_cast<double>(n1);
  for (Index i = 0; i < M; ++i) {
    require(static_cast<double>(add_row[static_cast<std::size_t>(i)]) <= row_cap + kFractionSlack,
            ErrorKind::BudgetExceeded,
            "delta: row " + std::to_string(i) + " gains more than " +
                format_number(row_cap) + " ones in the planted columns");
  }

  BinaryMatrix out = A;
  for (auto [i, j] : edits.deletions) out.set(i, j, false);
  for (auto [i, j] : edits.additions) out.set(i, j, true);
  return out;
}

EditScript random_edit_script(const BinaryMatrix& A,
                              const BlockPartition& partition,
                              const AdversarialBudget& budget, double fill,
                              std::uint64_t seed) {
  budget.validate();
  partition.validate();
  require(fill >= 0.0 && fill <= 1.0, ErrorKind::InvalidArgument,
          "fill must lie in [0,1]");
  const auto rl = partition.row_labels();
  const auto cl = partition.col_labels();
  const Index m1 = static_cast<Index>(partition.rows[0].size());
  const Index n1 = static_cast<Index>(partition.cols[0].size());
  const Index M = A.rows();
  const Index N = A.cols();
  Rng rng(seed);

  // Candidate pools keyed by cap; index 0..2 are rbar11, r1, r2, 3 is r3 and
  // 4.. are the diagonal blocks.
  const std::size_t K = std::max(partition.rows.size(), partition.cols.size());
  std::vector<std::vector<std::pair<Index, Index>>> pools(4 + K);
  for (Index j = 0; j < N; ++j) {
    const int s = cl[static_cast<std::size_t>(j)];
    for (Index i = 0; i < M; ++i) {
      const int r = rl[static_cast<std::size_t>(i)];
      if (r == 0 && s == 0) {
        if (A(i, j)) pools[0].emplace_back(i, j);
      } else if (!A(i, j)) {
        if (r == 0) pools[1].emplace_back(i, j);
        else if (s == 0) pools[2].emplace_back(i, j);
        else if (r == s) pools[4 + static_cast<std::size_t>(r)].emplace_back(i, j);
        else pools[3].emplace_back(i, j);
      }
    }
  }
  std::vector<Index> caps(4 + K, 0);
  caps[0] = budget.rbar11;
  caps[1] = budget.r1;
  caps[2] = budget.r2;
  caps[3] = budget.r3;
  for (std::size_t k = 1; k < K; ++k) {
    caps[4 + k] = k - 1 < budget.r_diag.size() ? budget.r_diag[k - 1] : 0;
  }

  const Index del_col_cap = floor_cap((1.0 - budget.delta_tilde) * static_cast<double>(m1));
  const Index del_row_cap = floor_cap((1.0 - budget.delta_tilde) * static_cast<double>(n1));
  const Index add_col_cap = floor_cap(budget.delta * static_cast<double>(m1));
  const Index add_row_cap = floor_cap(budget.delta * static_cast<double>(n1));
  std::vector<Index> row_used(static_cast<std::size_t>(M), 0);
  std::vector<Index> col_used(static_cast<std::size_t>(N), 0);

  EditScript script;
  for (std::size_t p = 0; p < pools.size(); ++p) {
    const Index target = floor_cap(fill * static_cast<double>(caps[p]));
    if (target == 0) continue;
    shuffle(pools[p], rng);
    Index taken = 0;
    for (auto [i, j] : pools[p]) {
      if (taken == target) break;
      auto& ru = row_used[static_cast<std::size_t>(i)];
      auto& cu = col_used[static_cast<std::size_t>(j)];
      if (p == 0) {
        if (ru >= del_row_cap || cu >= del_col_cap) continue;
        ++ru;
        ++cu;
        script.deletions.emplace_back(i, j);
      } else {
        if (p == 1) {
          if (cu >= add_col_cap) continue;
          ++cu;
        } else if (p == 2) {
          if (ru >= add_row_cap) continue;
          ++ru;
        }
        script.additions.emplace_back(i, j);
      }
      ++taken;
    }
  }
  return script;
}

BinaryMatrix planted_block_matrix(const BlockPartition& partition) {
  partition.validate();
  BinaryMatrix A(partition.num_rows(), partition.num_cols());
  for (Index i : partition.rows[0]) {
    for (Index j : partition.cols[0]) A.set(i, j, true);
  }
  return A;
}

// ---------------------------------------------------------------------------

void write_dense(std::ostream& out, const BinaryMatrix& A) {
  out << A.rows() << ' ' << A.cols() << '\n';
  std::string line;
  for (Index i = 0; i < A.rows(); ++i) {
    line.clear();
    for (Index j = 0; j < A.cols(); ++j) {
      if (j) line += ' ';
      line += A(i, j) ? '1' : '0';
    }
    out << line << '\n';
  }
}

void write_sparse(std::ostream& out, const BinaryMatrix& A) {
  out << A.rows() << ' ' << A.cols() << ' ' << A.count_ones() << '\n';
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = 0; j < A.cols(); ++j) {
      if (A(i, j)) out << i + 1 << ' ' << j + 1 << '\n';
    }
  }
}

void write_real(std::ostream& out, const Matrix& X) {
  out << X.rows() << ' ' << X.cols() << '\n';
  for (Index i = 0; i < X.rows(); ++i) {
    for (Index j = 0; j < X.cols(); ++j) {
      if (j) out << ' ';
      out << format_number(X(i, j));
    }
    out << '\n';
  }
}

BinaryMatrix read_matrix(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next_line = [&](std::vector<std::string>& fields) {
    while (std::getline(in, line)) {
      ++lineno;
      fields = split_fields(line);
      if (!fields.empty() && fields[0][0] != '#') return true;
    }
    return false;
  };
  auto where = [&] { return "line " + std::to_string(lineno); };

  std::vector<std::string> fields;
  if (!next_line(fields)) fail(ErrorKind::Parse, "empty matrix file");
  require(fields.size() == 2 || fields.size() == 3, ErrorKind::Parse,
          where() + ": header must be 'M N' or 'M N nnz'");
  const Index M = parse_int(fields[0], where());
  const Index N = parse_int(fields[1], where());
  require(M >= 1 && N >= 1, ErrorKind::Parse, where() + ": dimensions must be positive");
  BinaryMatrix A(M, N);
  if (fields.size() == 2) {
    for (Index i = 0; i < M; ++i) {
      require(next_line(fields), ErrorKind::Parse,
              "expected " + std::to_string(M) + " rows, found " + std::to_string(i));
      // Rows may be written without separators ("0110").
      if (fields.size() == 1 && N > 1 && static_cast<Index>(fields[0].size()) == N) {
        std::vector<std::string> digits;
        for (char c : fields[0]) digits.emplace_back(1, c);
        fields = std::move(digits);
      }
      require(static_cast<Index>(fields.size()) == N, ErrorKind::Parse,
              where() + ": expected " + std::to_string(N) + " entries");
      for (Index j = 0; j < N; ++j) {
        const auto& f = fields[static_cast<std::size_t>(j)];
        require(f == "0" || f == "1", ErrorKind::Parse,
                where() + ": entry '" + f + "' is not 0 or 1");
        A.set(i, j, f == "1");
      }
    }
  } else {
    const Index nnz = parse_int(fields[2], where());
    require(nnz >= 0 && nnz <= M * N, ErrorKind::Parse, where() + ": bad nnz");
    for (Index k = 0; k < nnz; ++k) {
      require(next_line(fields), ErrorKind::Parse,
              "expected " + std::to_string(nnz) + " entries, found " + std::to_string(k));
      require(fields.size() == 2, ErrorKind::Parse, where() + ": expected 'i j'");
      const Index i = parse_int(fields[0], where());
      const Index j = parse_int(fields[1], where());
      require(i >= 1 && i <= M && j >= 1 && j <= N, ErrorKind::Parse,
              where() + ": index out of range");
      A.set(i - 1, j - 1, true);
    }
  }
  require(!next_line(fields), ErrorKind::Parse, where() + ": trailing data");
  return A;
}

BinaryMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  try {
    return read_matrix(in);
  } catch (const Error& e) {
    fail(e.kind(), path + ": " + e.what());
  }
}

void save_matrix(const std::string& path, const BinaryMatrix& A, bool sparse) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  if (sparse) write_sparse(out, A);
  else write_dense(out, A);
}

KeyValue truth_manifest(const GroundTruth& truth, const PlantedModelSpec& spec,
                        std::uint64_t seed) {
  KeyValue kv;
  kv.set("index_base", static_cast<std::int64_t>(0));
  kv.set("seed", std::to_string(seed));
  kv.set("planted_rows", to_int64(truth.planted_rows));
  kv.set("planted_cols", to_int64(truth.planted_cols));
  const KeyValue spec_kv = spec.to_kv();
  for (const auto& [k, v] : spec_kv.entries()) kv.set("spec." + k, v);
  return kv;
}

GroundTruth truth_from_manifest(const KeyValue& kv) {
  const Index M = kv.get_int("spec.M");
  const Index N = kv.get_int("spec.N");
  IndexSet rows, cols;
  for (auto i : kv.get_ints("planted_rows")) rows.push_back(i);
  for (auto j : kv.get_ints("planted_cols")) cols.push_back(j);
  return GroundTruth::make(rows, cols, M, N);
}

}  // namespace densub
