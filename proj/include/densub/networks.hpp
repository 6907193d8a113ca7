#pragma once

#include "densub/admm.hpp"
#include "densub/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace densub {

/// Undirected weighted graph with dense symmetric weights.
struct Graph {
  std::vector<std::string> labels;
  Matrix weights;

  Index size() const { return static_cast<Index>(labels.size()); }
  /// Adjacency of the positive weights, diagonal included as stored.
  BinaryMatrix adjacency() const;
  static Graph from_adjacency(const BinaryMatrix& A);
};

/// "u v" or "u v w" per line, whitespace or comma separated, '#' comments.
/// Nodes are numbered in order of first appearance. Repeated edges keep the
/// larger weight.
Graph parse_edge_list(std::istream& in);
Graph load_edge_list(const std::string& path);

/// Weight 1 where weight > t, 0 otherwise.
Graph binarize(const Graph& g, double t);

/// u ~ v iff A[u,v] = 1 or (A^2)[u,v] >= 1, computed on the graph without
/// self-loops; the output has a zero diagonal.
Graph two_walk_closure(const Graph& g);

struct CliqueResult {
  IndexSet clique;
  std::vector<std::string> labels;
  bool verified = false;
  /// The rounded set was not a clique and greedy swaps were applied.
  bool repaired = false;
  Index swaps = 0;
  bool degenerate_rounding = false;
  Matrix X;
  int iterations = 0;
  bool converged = false;
};

/// Solves the relaxation on the adjacency with unit diagonal for an m x m
/// block, keeps the m largest diagonal entries of X, and checks that they
/// form a clique. A failed check triggers at most m greedy swaps.
CliqueResult find_max_clique_via_relaxation(const Graph& g, Index m, double gamma,
                                            SolveConfig config = {});

}  // namespace densub
