#pragma once

#include "densub/types.hpp"

namespace densub {

/// Input of the convex relaxation: A, the target size, and the cached mask of
/// observed ones (the complement of Omega).
class ProblemInstance {
 public:
  ProblemInstance(BinaryMatrix A, Index m, Index n);

  const BinaryMatrix& A() const { return A_; }
  Index m() const { return m_; }
  Index n() const { return n_; }
  Index rows() const { return A_.rows(); }
  Index cols() const { return A_.cols(); }

  /// 1.0 where A is one, 0.0 on Omega.
  const Matrix& mask() const { return mask_; }
  bool in_omega(Index i, Index j) const { return !A_(i, j); }
  Index omega_size() const { return rows() * cols() - A_.count_ones(); }

 private:
  BinaryMatrix A_;
  Index m_;
  Index n_;
  Matrix mask_;
};

/// Fraction of ones of A on rows x cols.
double density(const IndexSet& rows, const IndexSet& cols, const BinaryMatrix& A);
/// Same, binarizing a real matrix first.
double density(const IndexSet& rows, const IndexSet& cols, const Matrix& A);

double nuclear_norm(const Matrix& X);

/// ||X||_* + gamma * sum(Y).
double objective(const Matrix& X, const Matrix& Y, double gamma);

struct GammaRule {
  enum class Kind { Explicit, ExperimentHeuristic, TheoremInterval, Adversarial };

  Kind kind = Kind::Explicit;
  double value = 0.0;  // explicit
  double q = 0.0;      // planted density p11
  double p_ref = 0.0;  // background density (p_min or p*)
  double m = 0.0;
  double n = 0.0;
  double delta = 0.0;
  double delta_tilde = 1.0;
  double c2 = 6.0;

  static GammaRule explicit_value(double gamma);
  /// 6 / (m (q - p_ref)).
  static GammaRule experiment(double q, double p_ref, double m);
  /// Geometric mean of (2, c2) / ((q - p_ref) sqrt(m n)).
  static GammaRule theorem(double q, double p_ref, double m, double n,
                           double c2 = 6.0);
  /// 1 / ((2 delta_tilde - delta - 1) sqrt(m n)).
  static GammaRule adversarial(double delta, double delta_tilde, double m,
                               double n);
};

double gamma_select(const GammaRule& rule);

}  // namespace densub
