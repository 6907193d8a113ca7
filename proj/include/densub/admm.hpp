#pragma once

#include "densub/relaxation.hpp"
#include "densub/types.hpp"

#include <vector>

namespace densub {

enum class SvdBackend {
  /// Symmetric eigensolver when the input is exactly symmetric, BDCSVD
  /// otherwise.
  Auto,
  Bdc,
  /// Requires an exactly symmetric input.
  SymmetricEigen,
};

double soft_threshold(double x, double phi);

/// Singular value soft-thresholding: U max(S - phi, 0) V^T.
Matrix matrix_shrink(const Matrix& Mt, double phi,
                     SvdBackend backend = SvdBackend::Auto);

/// X - Y + mu LambdaQ with entries on Omega set to zero.
Matrix update_Q(const Matrix& X, const Matrix& Y, const Matrix& LambdaQ,
                double mu, const BinaryMatrix& A);
/// X + mu LambdaW shifted by a constant so the entries sum to m n.
Matrix update_W(const Matrix& X, const Matrix& LambdaW, double mu, Index m,
                Index n);
/// X + mu LambdaZ clipped to [0, 1].
Matrix update_Z(const Matrix& X, const Matrix& LambdaZ, double mu);

struct SolveConfig {
  double gamma = 0.0;
  double tau = 2.0;  // augmented Lagrangian penalty; mu = 1 / tau
  double epsilon = 1e-4;
  int maxiter = 2000;
  SvdBackend svd = SvdBackend::Auto;
  /// Wall-clock cap in seconds; 0 disables it.
  double time_limit = 0.0;

  double mu() const { return 1.0 / tau; }
  void validate() const;
};

struct SolveResult {
  Matrix X, Y, Q, W, Z;
  int iterations = 0;
  std::vector<double> primal_residuals;
  std::vector<double> dual_residuals;
  bool converged = false;
  bool timed_out = false;
  double seconds = 0.0;
};

SolveResult solve(const ProblemInstance& instance, const SolveConfig& config);

}  // namespace densub
