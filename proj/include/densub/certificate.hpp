#pragma once

#include "densub/model.hpp"
#include "densub/types.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace densub {

/// Ones counts around a candidate block (U1, V1).
struct BlockCounts {
  Vector mu;      // length M: ones of row i within columns V1
  Vector nu;      // length N: ones of column j within rows U1
  Vector mu_bar;  // length m1: n1 - mu_i for the k-th row of U1
  Vector nu_bar;  // length n1: m1 - nu_j for the k-th column of V1
};

BlockCounts block_counts(const BinaryMatrix& A, const IndexSet& U1,
                         const IndexSet& V1);

/// Closed-form (y, z) with Lambda(U1, V1) = y 1^T + 1 z^T making W u = 0 and
/// W^T v = 0 inside the planted rows and columns.
std::pair<Vector, Vector> yz_closed_form(const Vector& mu_bar, const Vector& nu_bar,
                                         double gamma, double lambda_bar);

struct Certificate {
  enum class Kind { Random, Adversarial };

  Kind kind = Kind::Random;
  IndexSet U1;
  IndexSet V1;
  double lambda = 0.0;
  double lambda_bar = 0.0;
  Matrix Lambda;
  Matrix Xi;
  Matrix W;
  Vector y;
  Vector z;
  double tau_used = 0.0;
  double gamma_used = 0.0;
  /// Columns/rows whose branch was switched because the count hit a
  /// boundary where the nominal branch divides by zero.
  Index boundary_switches = 0;
};

/// Multipliers for the random planted model. `spec` supplies the block
/// partition (block 0 must be (U1, V1)) and the probabilities p_rs.
Certificate build_random_certificate(const BinaryMatrix& A, const IndexSet& U1,
                                     const IndexSet& V1,
                                     const PlantedModelSpec& spec, double gamma,
                                     double c_tau = 6.0);

/// Multipliers for the adversarial model; gamma is fixed by the budget.
Certificate build_adversarial_certificate(const BinaryMatrix& A, const IndexSet& U1,
                                          const IndexSet& V1,
                                          const AdversarialBudget& budget);

/// Largest singular value. Exact SVD up to 2000 rows or columns, power
/// iteration on W^T W beyond that.
double spectral_norm(const Matrix& W);
double spectral_norm_power(const Matrix& W, int max_steps = 500, double rtol = 1e-8);

struct KktTolerances {
  double stationarity = 1e-6;
  double slackness = 1e-6;
  double orthogonality = 1e-6;
  double sign = 1e-6;

  static KktTolerances uniform(double tol) { return {tol, tol, tol, tol}; }
};

struct KktCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  /// Reported but not part of the overall verdict.
  bool informational = false;
};

struct VerificationReport {
  std::vector<KktCheck> checks;
  bool pass = false;

  const KktCheck& get(const std::string& name) const;
  /// One line per check: name value threshold PASS|FAIL|INFO.
  void write(std::ostream& out) const;
};

VerificationReport verify_kkt(const BinaryMatrix& A, const Matrix& X_bar,
                              const Matrix& Y_bar, const Certificate& cert,
                              const KktTolerances& tol = {});
VerificationReport verify_kkt(const BinaryMatrix& A, const Matrix& X_bar,
                              const Matrix& Y_bar, const Certificate& cert,
                              double tol);

/// X_bar = u v^T and Y_bar = P_Omega(X_bar) for the certificate's block.
std::pair<Matrix, Matrix> candidate_solution(const BinaryMatrix& A,
                                             const IndexSet& U1, const IndexSet& V1);

}  // namespace densub
