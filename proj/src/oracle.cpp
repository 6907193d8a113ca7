#include "densub/oracle.hpp"

#include "densub/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace densub {

namespace {

constexpr double kSupportGuard = 1e8;

double binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double out = 1.0;
  for (Index i = 1; i <= k; ++i) {
    out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return std::round(out);
}

std::uint64_t binomial_u64(Index n, Index k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 out = 1;
  for (Index i = 1; i <= k; ++i) {
    out = out * static_cast<unsigned __int128>(n - k + i) / static_cast<unsigned __int128>(i);
    if (out > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(out);
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t s = a + b;
  return s < a ? std::numeric_limits<std::uint64_t>::max() : s;
}

// Advances `idx` to the next k-combination of [0, n); false when exhausted.
bool next_combination(std::vector<Index>& idx, Index n) {
  const auto k = static_cast<Index>(idx.size());
  for (Index i = k - 1; i >= 0; --i) {
    if (idx[static_cast<std::size_t>(i)] < n - k + i) {
      ++idx[static_cast<std::size_t>(i)];
      for (Index j = i + 1; j < k; ++j) {
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
      }
      return true;
    }
  }
  return false;
}

using NodeList = std::vector<int>;

NodeList intersect(const NodeList& a, const NodeList& b) {
  NodeList out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

struct BronKerbosch {
  const std::vector<NodeList>& adj;
  std::vector<IndexSet>& out;

  void run(NodeList& R, NodeList P, NodeList X) {
    if (P.empty()) {
      if (X.empty()) {
        IndexSet c(R.begin(), R.end());
        std::sort(c.begin(), c.end());
        out.push_back(std::move(c));
      }
      return;
    }
    // Pivot: the vertex of P or X with the most neighbours in P.
    int pivot = -1;
    std::size_t best = 0;
    for (const NodeList* S : {&P, &X}) {
      for (int u : *S) {
        const std::size_t k = intersect(P, adj[static_cast<std::size_t>(u)]).size();
        if (pivot < 0 || k > best) {
          pivot = u;
          best = k;
        }
      }
    }
    NodeList candidates;
    std::set_difference(P.begin(), P.end(), adj[static_cast<std::size_t>(pivot)].begin(),
                        adj[static_cast<std::size_t>(pivot)].end(),
                        std::back_inserter(candidates));
    for (int v : candidates) {
      const NodeList& nv = adj[static_cast<std::size_t>(v)];
      R.push_back(v);
      run(R, intersect(P, nv), intersect(X, nv));
      R.pop_back();
      P.erase(std::lower_bound(P.begin(), P.end(), v));
      X.insert(std::lower_bound(X.begin(), X.end(), v), v);
    }
  }
};

}  // namespace

double support_count(Index M, Index N, Index m, Index n) {
  return binomial(M, m) * binomial(N, n);
}

OracleResult densest_submatrix_bruteforce(const BinaryMatrix& A, Index m, Index n,
                                          std::size_t tie_cap) {
  const Index M = A.rows();
  const Index N = A.cols();
  require(m >= 1 && m <= M && n >= 1 && n <= N, ErrorKind::InvalidArgument,
          "oracle needs 1 <= m <= M and 1 <= n <= N");
  const double count = support_count(M, N, m, n);
  require(count <= kSupportGuard, ErrorKind::TooLarge,
          "exhaustive search over " + std::to_string(count) +
              " supports exceeds the 1e8 guard");

  OracleResult res;
  res.best_count = -1;
  std::vector<Index> rows(static_cast<std::size_t>(m));
  std::iota(rows.begin(), rows.end(), Index{0});
  std::vector<Index> sums(static_cast<std::size_t>(N));
  std::vector<Index> order(static_cast<std::size_t>(N));

  do {
    for (Index j = 0; j < N; ++j) {
      Index s = 0;
      for (Index i : rows) s += A(i, j) ? 1 : 0;
      sums[static_cast<std::size_t>(j)] = s;
    }
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      return sums[static_cast<std::size_t>(a)] > sums[static_cast<std::size_t>(b)];
    });
    Index total = 0;
    for (Index k = 0; k < n; ++k) total += sums[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
    if (total < res.best_count) continue;

    const Index cut = sums[static_cast<std::size_t>(order[static_cast<std::size_t>(n - 1)])];
    IndexSet above, level;
    for (Index j = 0; j < N; ++j) {
      const Index s = sums[static_cast<std::size_t>(j)];
      if (s > cut) above.push_back(j);
      else if (s == cut) level.push_back(j);
    }
    const Index need = n - static_cast<Index>(above.size());
    const std::uint64_t here = binomial_u64(static_cast<Index>(level.size()), need);

    if (total > res.best_count) {
      res.best_count = total;
      res.ties.clear();
      res.tie_count = 0;
      res.best_rows.assign(rows.begin(), rows.end());
      IndexSet cols = above;
      cols.insert(cols.end(), level.begin(), level.begin() + need);
      std::sort(cols.begin(), cols.end());
      res.best_cols = cols;
    }
    res.tie_count = saturating_add(res.tie_count, here);
    // Enumerate this row set's co-optimal column sets until the cap.
    std::vector<Index> pick(static_cast<std::size_t>(need));
    std::iota(pick.begin(), pick.end(), Index{0});
    while (res.ties.size() < tie_cap) {
      IndexSet cols = above;
      for (Index p : pick) cols.push_back(level[static_cast<std::size_t>(p)]);
      std::sort(cols.begin(), cols.end());
      res.ties.emplace_back(IndexSet(rows.begin(), rows.end()), std::move(cols));
      if (!next_combination(pick, static_cast<Index>(level.size()))) break;
    }
  } while (next_combination(rows, M));
  return res;
}

std::vector<IndexSet> maximal_cliques(const BinaryMatrix& adjacency) {
  require(adjacency.is_symmetric(), ErrorKind::InvalidArgument,
          "clique enumeration needs a symmetric adjacency matrix");
  const Index n = adjacency.rows();
  std::vector<NodeList> adj(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j && adjacency(i, j)) adj[static_cast<std::size_t>(i)].push_back(static_cast<int>(j));
    }
  }

  // Degeneracy ordering by repeated removal of a minimum-degree vertex.
  std::vector<int> degree(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) degree[static_cast<std::size_t>(i)] = static_cast<int>(adj[static_cast<std::size_t>(i)].size());
  std::vector<char> removed(static_cast<std::size_t>(n), 0);
  std::vector<int> order;
  for (Index step = 0; step < n; ++step) {
    int v = -1;
    for (Index i = 0; i < n; ++i) {
      if (!removed[static_cast<std::size_t>(i)] &&
          (v < 0 || degree[static_cast<std::size_t>(i)] < degree[static_cast<std::size_t>(v)])) {
        v = static_cast<int>(i);
      }
    }
    removed[static_cast<std::size_t>(v)] = 1;
    order.push_back(v);
    for (int u : adj[static_cast<std::size_t>(v)]) {
      if (!removed[static_cast<std::size_t>(u)]) --degree[static_cast<std::size_t>(u)];
    }
  }
  std::vector<int> position(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < order.size(); ++k) position[static_cast<std::size_t>(order[k])] = static_cast<int>(k);

  std::vector<IndexSet> out;
  BronKerbosch bk{adj, out};
  for (int v : order) {
    NodeList P, X;
    for (int u : adj[static_cast<std::size_t>(v)]) {
      (position[static_cast<std::size_t>(u)] > position[static_cast<std::size_t>(v)] ? P : X).push_back(u);
    }
    NodeList R{v};
    bk.run(R, std::move(P), std::move(X));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<IndexSet> maximum_cliques(const BinaryMatrix& adjacency) {
  auto all = maximal_cliques(adjacency);
  std::size_t best = 0;
  for (const auto& c : all) best = std::max(best, c.size());
  std::vector<IndexSet> out;
  for (auto& c : all) {
    if (c.size() == best) out.push_back(std::move(c));
  }
  return out;
}

bool is_clique(const BinaryMatrix& adjacency, const IndexSet& nodes) {
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      if (nodes[a] == nodes[b] || !adjacency(nodes[a], nodes[b])) return false;
    }
  }
  return true;
}

}  // namespace densub
