#include "densub/relaxation.hpp"

#include "densub/error.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace densub {

ProblemInstance::ProblemInstance(BinaryMatrix A, Index m, Index n)
    : A_(std::move(A)), m_(m), n_(n) {
  require(A_.rows() >= 1 && A_.cols() >= 1, ErrorKind::InvalidArgument,
          "problem matrix is empty");
  require(m >= 1 && m <= A_.rows(), ErrorKind::InvalidArgument,
          "target row count must lie in [1, M]");
  require(n >= 1 && n <= A_.cols(), ErrorKind::InvalidArgument,
          "target column count must lie in [1, N]");
  mask_ = A_.to_real();
}

double density(const IndexSet& rows, const IndexSet& cols, const BinaryMatrix& A) {
  require(!rows.empty() && !cols.empty(), ErrorKind::InvalidArgument,
          "density needs nonempty row and column sets");
  const IndexSet r = normalized(rows);
  const IndexSet c = normalized(cols);
  require(r.size() == rows.size() && c.size() == cols.size(),
          ErrorKind::InvalidArgument, "density support has repeated indices");
  Index ones = 0;
  for (Index i : r) {
    require(i >= 0 && i < A.rows(), ErrorKind::InvalidArgument, "row index out of range");
    for (Index j : c) {
      require(j >= 0 && j < A.cols(), ErrorKind::InvalidArgument,
              "column index out of range");
      ones += A(i, j) ? 1 : 0;
    }
  }
  return static_cast<double>(ones) / static_cast<double>(r.size() * c.size());
}

double density(const IndexSet& rows, const IndexSet& cols, const Matrix& A) {
  return density(rows, cols, BinaryMatrix::binarized(A));
}

double nuclear_norm(const Matrix& X) {
  if (X.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(X);
  if (svd.info() != Eigen::Success) {
    fail(ErrorKind::NumericalFailure, "SVD failed in nuclear norm");
  }
  return svd.singularValues().sum();
}

double objective(const Matrix& X, const Matrix& Y, double gamma) {
  require(X.rows() == Y.rows() && X.cols() == Y.cols(), ErrorKind::InvalidArgument,
          "objective needs X and Y of the same shape");
  return nuclear_norm(X) + gamma * Y.sum();
}

GammaRule GammaRule::explicit_value(double gamma) {
  GammaRule r;
  r.kind = Kind::Explicit;
  r.value = gamma;
  return r;
}

GammaRule GammaRule::experiment(double q, double p_ref, double m) {
  GammaRule r;
  r.kind = Kind::ExperimentHeuristic;
  r.q = q;
  r.p_ref = p_ref;
  r.m = m;
  return r;
}

GammaRule GammaRule::theorem(double q, double p_ref, double m, double n, double c2) {
  GammaRule r;
  r.kind = Kind::TheoremInterval;
  r.q = q;
  r.p_ref = p_ref;
  r.m = m;
  r.n = n;
  r.c2 = c2;
  return r;
}

GammaRule GammaRule::adversarial(double delta, double delta_tilde, double m, double n) {
  GammaRule r;
  r.kind = Kind::Adversarial;
  r.delta = delta;
  r.delta_tilde = delta_tilde;
  r.m = m;
  r.n = n;
  return r;
}

double gamma_select(const GammaRule& rule) {
  double gamma = 0.0;
  switch (rule.kind) {
    case GammaRule::Kind::Explicit:
      gamma = rule.value;
      break;
    case GammaRule::Kind::ExperimentHeuristic:
      require(rule.q > rule.p_ref, ErrorKind::InfeasibleRule,
              "experiment gamma rule needs q > p_ref");
      require(rule.m > 0, ErrorKind::InvalidArgument, "gamma rule needs m > 0");
      gamma = 6.0 / (rule.m * (rule.q - rule.p_ref));
      break;
    case GammaRule::Kind::TheoremInterval: {
      require(rule.q > rule.p_ref, ErrorKind::InfeasibleRule,
              "theorem gamma interval needs p11 > p*");
      require(rule.m > 0 && rule.n > 0, ErrorKind::InvalidArgument,
              "gamma rule needs m, n > 0");
      require(rule.c2 > 2.0, ErrorKind::InfeasibleRule,
              "theorem gamma interval needs c2 > 2");
      const double scale = (rule.q - rule.p_ref) * std::sqrt(rule.m * rule.n);
      gamma = std::sqrt((2.0 / scale) * (rule.c2 / scale));
      break;
    }
    case GammaRule::Kind::Adversarial: {
      const double gap = 2.0 * rule.delta_tilde - rule.delta - 1.0;
      require(gap > 0.0, ErrorKind::InfeasibleRule,
              "adversarial gamma rule needs 2 delta_tilde - delta > 1");
      require(rule.m > 0 && rule.n > 0, ErrorKind::InvalidArgument,
              "gamma rule needs m, n > 0");
      gamma = 1.0 / (gap * std::sqrt(rule.m * rule.n));
      break;
    }
  }
  require(std::isfinite(gamma) && gamma > 0.0, ErrorKind::InfeasibleRule,
          "gamma must be a positive finite number");
  return gamma;
}

}  // namespace densub
