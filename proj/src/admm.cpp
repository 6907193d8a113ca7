#include "densub/admm.hpp"

#include "densub/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <chrono>
#include <cmath>

namespace densub {

namespace {

bool exactly_symmetric(const Matrix& M) {
  if (M.rows() != M.cols()) return false;
  for (Index j = 0; j < M.cols(); ++j) {
    for (Index i = j + 1; i < M.rows(); ++i) {
      if (M(i, j) != M(j, i)) return false;
    }
  }
  return true;
}

Matrix shrink_symmetric(const Matrix& Mt, double phi) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Mt);
  if (eig.info() != Eigen::Success) {
    fail(ErrorKind::NumericalFailure, "symmetric eigendecomposition failed");
  }
  const Vector& lambda = eig.eigenvalues();
  std::vector<Index> keep;
  for (Index k = 0; k < lambda.size(); ++k) {
    if (std::abs(lambda(k)) > phi) keep.push_back(k);
  }
  Matrix V(Mt.rows(), static_cast<Index>(keep.size()));
  Vector s(static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const Index k = keep[c];
    V.col(static_cast<Index>(c)) = eig.eigenvectors().col(k);
    s(static_cast<Index>(c)) = soft_threshold(lambda(k), phi);
  }
  Matrix R = V * s.asDiagonal() * V.transpose();
  // Restore exact symmetry lost to round-off in the product.
  return 0.5 * (R + R.transpose());
}

Matrix shrink_general(const Matrix& Mt, double phi) {
  Eigen::BDCSVD<Matrix> svd(Mt, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    fail(ErrorKind::NumericalFailure, "SVD failed in matrix shrink");
  }
  const Vector& sv = svd.singularValues();
  Index k = 0;
  while (k < sv.size() && sv(k) > phi) ++k;
  const Vector s = (sv.head(k).array() - phi).matrix();
  return svd.matrixU().leftCols(k) * s.asDiagonal() *
         svd.matrixV().leftCols(k).transpose();
}

void check_shapes(const Matrix& a, const Matrix& b, const char* what) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::InvalidArgument,
          std::string(what) + ": shape mismatch");
}

}  // namespace

double soft_threshold(double x, double phi) {
  if (x > phi) return x - phi;
  if (x < -phi) return x + phi;
  return 0.0;
}

Matrix matrix_shrink(const Matrix& Mt, double phi, SvdBackend backend) {
  require(phi >= 0.0, ErrorKind::InvalidArgument, "shrink threshold must be >= 0");
  if (Mt.size() == 0) return Mt;
  require(Mt.allFinite(), ErrorKind::NumericalFailure,
          "matrix shrink input has non-finite entries");
  switch (backend) {
    case SvdBackend::Auto:
      return exactly_symmetric(Mt) ? shrink_symmetric(Mt, phi)
                                   : shrink_general(Mt, phi);
    case SvdBackend::Bdc:
      return shrink_general(Mt, phi);
    case SvdBackend::SymmetricEigen:
      require(exactly_symmetric(Mt), ErrorKind::InvalidArgument,
              "symmetric eigen backend needs a symmetric matrix");
      return shrink_symmetric(Mt, phi);
  }
  return shrink_general(Mt, phi);
}

Matrix update_Q(const Matrix& X, const Matrix& Y, const Matrix& LambdaQ, double mu,
                const BinaryMatrix& A) {
  check_shapes(X, Y, "update_Q");
  check_shapes(X, LambdaQ, "update_Q");
  require(X.rows() == A.rows() && X.cols() == A.cols(), ErrorKind::InvalidArgument,
          "update_Q: mask shape mismatch");
  Matrix Q = X - Y + mu * LambdaQ;
  for (Index j = 0; j < Q.cols(); ++j) {
    for (Index i = 0; i < Q.rows(); ++i) {
      if (!A(i, j)) Q(i, j) = 0.0;
    }
  }
  return Q;
}

Matrix update_W(const Matrix& X, const Matrix& LambdaW, double mu, Index m, Index n) {
  check_shapes(X, LambdaW, "update_W");
  Matrix W = X + mu * LambdaW;
  const double c = (static_cast<double>(m) * static_cast<double>(n) - W.sum()) /
                   static_cast<double>(W.size());
  W.array() += c;
  return W;
}

Matrix update_Z(const Matrix& X, const Matrix& LambdaZ, double mu) {
  check_shapes(X, LambdaZ, "update_Z");
  return (X + mu * LambdaZ).cwiseMax(0.0).cwiseMin(1.0);
}

void SolveConfig::validate() const {
  require(std::isfinite(gamma) && gamma > 0.0, ErrorKind::InvalidArgument,
          "gamma must be positive");
  require(std::isfinite(tau) && tau > 0.0, ErrorKind::InvalidArgument,
          "tau must be positive");
  require(epsilon > 0.0, ErrorKind::InvalidArgument, "epsilon must be positive");
  require(maxiter >= 1, ErrorKind::InvalidArgument, "maxiter must be at least 1");
  require(time_limit >= 0.0, ErrorKind::InvalidArgument,
          "time limit must be nonnegative");
}

SolveResult solve(const ProblemInstance& instance, const SolveConfig& config) {
  config.validate();
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  const Index M = instance.rows();
  const Index N = instance.cols();
  const double mu = config.mu();
  const double tau = config.tau;
  const double init = static_cast<double>(instance.m()) *
                      static_cast<double>(instance.n()) /
                      (static_cast<double>(M) * static_cast<double>(N));
  const BinaryMatrix& A = instance.A();

  SolveResult r;
  r.X = Matrix::Constant(M, N, init);
  r.Y = r.X;
  r.Z = r.X;
  r.W = r.X;
  r.Q = Matrix::Zero(M, N);
  Matrix LQ = Matrix::Zero(M, N);
  Matrix LW = Matrix::Zero(M, N);
  Matrix LZ = Matrix::Zero(M, N);
  Matrix Q_old, W_old, Z_old;

  const double shrink = 1.0 / (3.0 * tau);
  for (int iter = 1; iter <= config.maxiter; ++iter) {
    Q_old = r.Q;
    W_old = r.W;
    Z_old = r.Z;

    r.Q = update_Q(r.X, r.Y, LQ, mu, A);
    r.X = matrix_shrink((r.Y + r.Q + r.Z + r.W - mu * (LQ + LW + LZ)) / 3.0, shrink,
                        config.svd);
    r.Y = ((r.X - r.Q + mu * LQ).array() - config.gamma * mu).cwiseMax(0.0).matrix();
    r.W = update_W(r.X, LW, mu, instance.m(), instance.n());
    r.Z = update_Z(r.X, LZ, mu);

    const Matrix RQ = r.X - r.Y - r.Q;
    const Matrix RW = r.X - r.W;
    const Matrix RZ = r.X - r.Z;
    LQ += tau * RQ;
    LW += tau * RW;
    LZ += tau * RZ;

    const double xnorm = r.X.norm();
    // The unnormalized residuals are used for an iteration where X vanishes.
    const double scale = xnorm == 0.0 ? 1.0 : std::max(xnorm, 1e-12);
    const double eps_p = std::max({RZ.norm(), RW.norm(), RQ.norm()}) / scale;
    const double eps_d =
        std::max({(r.Z - Z_old).norm(), (r.W - W_old).norm(), (r.Q - Q_old).norm()}) /
        scale;
    if (!std::isfinite(eps_p) || !std::isfinite(eps_d) || !r.X.allFinite() ||
        !r.Y.allFinite()) {
      fail(ErrorKind::NumericalFailure,
           "non-finite iterate at iteration " + std::to_string(iter));
    }
    r.primal_residuals.push_back(eps_p);
    r.dual_residuals.push_back(eps_d);
    r.iterations = iter;

    if (eps_p < config.epsilon && eps_d < config.epsilon) {
      r.converged = true;
      break;
    }
    if (config.time_limit > 0.0 &&
        std::chrono::duration<double>(Clock::now() - start).count() >
            config.time_limit) {
      r.timed_out = true;
      break;
    }
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

}  // namespace densub
