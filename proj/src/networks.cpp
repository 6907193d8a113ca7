#include "densub/networks.hpp"

#include "densub/error.hpp"
#include "densub/experiments.hpp"
#include "densub/kv.hpp"
#include "densub/oracle.hpp"
#include "densub/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <unordered_map>

namespace densub {

BinaryMatrix Graph::adjacency() const {
  return BinaryMatrix::binarized((weights.array() > 0.0).cast<double>().matrix());
}

Graph Graph::from_adjacency(const BinaryMatrix& A) {
  require(A.is_symmetric(), ErrorKind::InvalidArgument, "adjacency must be symmetric");
  Graph g;
  for (Index i = 0; i < A.rows(); ++i) g.labels.push_back(std::to_string(i));
  g.weights = A.to_real();
  return g;
}

Graph parse_edge_list(std::istream& in) {
  std::unordered_map<std::string, Index> ids;
  std::vector<std::string> labels;
  struct Edge {
    Index u, v;
    double w;
  };
  std::vector<Edge> edges;
  auto id_of = [&](const std::string& label) {
    auto [it, inserted] = ids.emplace(label, static_cast<Index>(labels.size()));
    if (inserted) labels.push_back(label);
    return it->second;
  };

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto f = split_fields(line);
    if (f.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    require(f.size() == 2 || f.size() == 3, ErrorKind::Parse,
            where + ": expected 'u v' or 'u v w'");
    double w = 1.0;
    if (f.size() == 3) {
      w = parse_double(f[2], where);
      require(std::isfinite(w) && w >= 0.0, ErrorKind::Parse,
              where + ": weight must be a nonnegative number");
    }
    edges.push_back({id_of(f[0]), id_of(f[1]), w});
  }

  Graph g;
  g.labels = std::move(labels);
  const Index n = g.size();
  g.weights = Matrix::Zero(n, n);
  for (const auto& e : edges) {
    const double w = std::max(g.weights(e.u, e.v), e.w);
    g.weights(e.u, e.v) = w;
    g.weights(e.v, e.u) = w;
  }
  return g;
}

Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  try {
    return parse_edge_list(in);
  } catch (const Error& e) {
    fail(e.kind(), path + ": " + e.what());
  }
}

Graph binarize(const Graph& g, double t) {
  Graph out = g;
  out.weights = (g.weights.array() > t).cast<double>().matrix();
  return out;
}

Graph two_walk_closure(const Graph& g) {
  Matrix A = (g.weights.array() > 0.0).cast<double>().matrix();
  A.diagonal().setZero();
  const Matrix A2 = A * A;
  Graph out = g;
  out.weights = ((A.array() > 0.0) || (A2.array() >= 1.0)).cast<double>().matrix();
  out.weights.diagonal().setZero();
  return out;
}

namespace {

// Members of `set` not adjacent to `v`, excluding v itself.
Index misses(const BinaryMatrix& adj, const IndexSet& set, Index v) {
  Index k = 0;
  for (Index u : set) {
    if (u != v && !adj(u, v)) ++k;
  }
  return k;
}

}  // namespace

CliqueResult find_max_clique_via_relaxation(const Graph& g, Index m, double gamma,
                                            SolveConfig config) {
  const Index n = g.size();
  require(m >= 2 && m <= n, ErrorKind::InvalidArgument,
          "clique size must lie in [2, number of nodes]");
  BinaryMatrix adj = g.adjacency();
  for (Index i = 0; i < n; ++i) adj.set(i, i, false);
  require(adj.is_symmetric(), ErrorKind::InvalidArgument, "graph must be undirected");

  BinaryMatrix A = adj;
  for (Index i = 0; i < n; ++i) A.set(i, i, true);
  config.gamma = gamma;
  const SolveResult res = solve(ProblemInstance(A, m, m), config);

  CliqueResult out;
  out.X = res.X;
  out.iterations = res.iterations;
  out.converged = res.converged;
  const TopK top = round_topk_diagonal(res.X, m);
  out.degenerate_rounding = top.degenerate;
  out.clique = top.indices;

  const Vector diag = res.X.diagonal();
  while (!is_clique(adj, out.clique) && out.swaps < m) {
    // Drop the member with the most missing edges, lowest diagonal first.
    std::size_t worst = 0;
    for (std::size_t k = 1; k < out.clique.size(); ++k) {
      const Index a = misses(adj, out.clique, out.clique[k]);
      const Index b = misses(adj, out.clique, out.clique[worst]);
      if (a > b || (a == b && diag(out.clique[k]) < diag(out.clique[worst]))) worst = k;
    }
    IndexSet rest = out.clique;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(worst));
    // Bring in the outside node with the fewest missing edges to the rest,
    // highest diagonal first.
    Index best = -1;
    for (Index v = 0; v < n; ++v) {
      if (std::find(out.clique.begin(), out.clique.end(), v) != out.clique.end()) continue;
      if (best < 0) {
        best = v;
        continue;
      }
      const Index a = misses(adj, rest, v);
      const Index b = misses(adj, rest, best);
      if (a < b || (a == b && diag(v) > diag(best))) best = v;
    }
    if (best < 0) break;
    rest.push_back(best);
    std::sort(rest.begin(), rest.end());
    out.clique = std::move(rest);
    out.repaired = true;
    ++out.swaps;
  }
  out.verified = is_clique(adj, out.clique);
  for (Index i : out.clique) out.labels.push_back(g.labels[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace densub
