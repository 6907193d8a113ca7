#include "densub/certificate.hpp"

#include "densub/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace densub {

namespace {

void check_block(const BinaryMatrix& A, const IndexSet& U1, const IndexSet& V1) {
  require(!U1.empty() && !V1.empty(), ErrorKind::InvalidArgument,
          "candidate block must be nonempty");
  require(normalized(U1).size() == U1.size() && normalized(V1).size() == V1.size(),
          ErrorKind::InvalidArgument, "candidate block has repeated indices");
  for (Index i : U1) {
    require(i >= 0 && i < A.rows(), ErrorKind::InvalidArgument,
            "candidate row out of range");
  }
  for (Index j : V1) {
    require(j >= 0 && j < A.cols(), ErrorKind::InvalidArgument,
            "candidate column out of range");
  }
}

// Branch selection for Cases 4 and 5. `low` is the p <= 1/2 branch, which
// divides by (size - count); the other branch divides by count.
bool use_low_branch(bool low_by_probability, double count, double size,
                    Index& switches) {
  if (low_by_probability && count >= size) {
    ++switches;
    return false;
  }
  if (!low_by_probability && count <= 0.0) {
    ++switches;
    return true;
  }
  return low_by_probability;
}

struct EdgeEntry {
  double W;
  double Xi;
};

// Case 4 (column j outside V1, count = nu_j, size = m1) and Case 5 (row i
// outside U1, count = mu_i, size = n1).
EdgeEntry edge_entry(bool low, bool omega, double count, double size, double lambda,
                     double gamma) {
  if (low) {
    if (!omega) return {lambda, gamma};
    return {-lambda * count / (size - count), gamma - lambda * size / (size - count)};
  }
  if (!omega) return {lambda * (count - size) / count, gamma - lambda * size / count};
  return {lambda, gamma};
}

// Shared assembly of the planted block (Cases 1 and 2) and Lambda.
void fill_block(const BinaryMatrix& A, Certificate& c, const BlockCounts& counts) {
  auto [y, z] = yz_closed_form(counts.mu_bar, counts.nu_bar, c.gamma_used, c.lambda_bar);
  c.y = std::move(y);
  c.z = std::move(z);
  for (std::size_t a = 0; a < c.U1.size(); ++a) {
    const Index i = c.U1[a];
    for (std::size_t b = 0; b < c.V1.size(); ++b) {
      const Index j = c.V1[b];
      const double lam = c.y(static_cast<Index>(a)) + c.z(static_cast<Index>(b));
      c.Lambda(i, j) = lam;
      if (A(i, j)) {
        c.Xi(i, j) = c.gamma_used;
        c.W(i, j) = c.lambda_bar - lam;
      } else {
        c.Xi(i, j) = 0.0;
        c.W(i, j) = c.lambda_bar - c.gamma_used - lam;
      }
    }
  }
}

Certificate empty_certificate(const BinaryMatrix& A, const IndexSet& U1,
                              const IndexSet& V1) {
  Certificate c;
  c.U1 = U1;
  c.V1 = V1;
  c.Lambda = Matrix::Zero(A.rows(), A.cols());
  c.Xi = Matrix::Zero(A.rows(), A.cols());
  c.W = Matrix::Zero(A.rows(), A.cols());
  return c;
}

}  // namespace

BlockCounts block_counts(const BinaryMatrix& A, const IndexSet& U1,
                         const IndexSet& V1) {
  check_block(A, U1, V1);
  BlockCounts c;
  c.mu = Vector::Zero(A.rows());
  c.nu = Vector::Zero(A.cols());
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j : V1) c.mu(i) += A(i, j) ? 1.0 : 0.0;
  }
  for (Index j = 0; j < A.cols(); ++j) {
    for (Index i : U1) c.nu(j) += A(i, j) ? 1.0 : 0.0;
  }
  const auto m1 = static_cast<double>(U1.size());
  const auto n1 = static_cast<double>(V1.size());
  c.mu_bar.resize(static_cast<Index>(U1.size()));
  c.nu_bar.resize(static_cast<Index>(V1.size()));
  for (std::size_t a = 0; a < U1.size(); ++a) c.mu_bar(static_cast<Index>(a)) = n1 - c.mu(U1[a]);
  for (std::size_t b = 0; b < V1.size(); ++b) c.nu_bar(static_cast<Index>(b)) = m1 - c.nu(V1[b]);
  return c;
}

std::pair<Vector, Vector> yz_closed_form(const Vector& mu_bar, const Vector& nu_bar,
                                         double gamma, double lambda_bar) {
  require(mu_bar.size() >= 1 && nu_bar.size() >= 1, ErrorKind::InvalidArgument,
          "y/z need a nonempty block");
  const auto m1 = static_cast<double>(mu_bar.size());
  const auto n1 = static_cast<double>(nu_bar.size());
  const double total = m1 + n1;
  const double sum_mu = mu_bar.sum();
  const double sum_nu = nu_bar.sum();
  Vector y = (-gamma * mu_bar.array() + gamma * sum_mu / total +
              n1 * n1 * lambda_bar / total) /
             n1;
  Vector z = (-gamma * nu_bar.array() + gamma * sum_nu / total +
              m1 * m1 * lambda_bar / total) /
             m1;
  return {std::move(y), std::move(z)};
}

Certificate build_random_certificate(const BinaryMatrix& A, const IndexSet& U1,
                                     const IndexSet& V1, const PlantedModelSpec& spec,
                                     double gamma, double c_tau) {
  check_block(A, U1, V1);
  spec.validate();
  require(gamma > 0.0 && std::isfinite(gamma), ErrorKind::InvalidArgument,
          "gamma must be positive");
  require(c_tau >= 0.0, ErrorKind::InvalidArgument, "c_tau must be nonnegative");
  require(spec.rows() == A.rows() && spec.cols() == A.cols(), ErrorKind::InvalidArgument,
          "model spec does not match the matrix");
  require(normalized(spec.partition.rows[0]) == normalized(U1) &&
              normalized(spec.partition.cols[0]) == normalized(V1),
          ErrorKind::InvalidArgument, "first block of the model must be (U1, V1)");

  const double M = static_cast<double>(A.rows());
  const double N = static_cast<double>(A.cols());
  const double m1 = static_cast<double>(U1.size());
  const double n1 = static_cast<double>(V1.size());
  const double n_star = std::max(M, N);
  const double n1_star = std::min(m1, n1);
  const double p11 = spec.probs(0, 0);
  const double sigma11 = p11 * (1.0 - p11);
  const double logn = std::log(n_star);

  Certificate c = empty_certificate(A, U1, V1);
  c.kind = Certificate::Kind::Random;
  c.gamma_used = gamma;
  c.tau_used = c_tau * std::max(std::sqrt(sigma11 * logn / n1_star), logn / n1_star);
  c.lambda = 1.0 / std::sqrt(m1 * n1) + gamma * (1.0 - p11) + gamma * c.tau_used;
  c.lambda_bar = c.lambda - 1.0 / std::sqrt(m1 * n1);

  const BlockCounts counts = block_counts(A, U1, V1);
  fill_block(A, c, counts);

  const auto rl = spec.partition.row_labels();
  const auto cl = spec.partition.col_labels();
  const double lam = c.lambda;

  // Case 4 branch per column, Case 5 branch per row.
  std::vector<char> col_low(static_cast<std::size_t>(A.cols()), 0);
  std::vector<char> row_low(static_cast<std::size_t>(A.rows()), 0);
  for (Index j = 0; j < A.cols(); ++j) {
    const int s = cl[static_cast<std::size_t>(j)];
    if (s == 0) continue;
    col_low[static_cast<std::size_t>(j)] =
        use_low_branch(spec.probs(0, s) <= 0.5, counts.nu(j), m1, c.boundary_switches);
  }
  for (Index i = 0; i < A.rows(); ++i) {
    const int r = rl[static_cast<std::size_t>(i)];
    if (r == 0) continue;
    row_low[static_cast<std::size_t>(i)] =
        use_low_branch(spec.probs(r, 0) <= 0.5, counts.mu(i), n1, c.boundary_switches);
  }

  for (Index j = 0; j < A.cols(); ++j) {
    const int s = cl[static_cast<std::size_t>(j)];
    for (Index i = 0; i < A.rows(); ++i) {
      const int r = rl[static_cast<std::size_t>(i)];
      const bool omega = !A(i, j);
      if (r == 0 && s == 0) continue;
      if (r == 0) {
        const auto e = edge_entry(col_low[static_cast<std::size_t>(j)], omega,
                                  counts.nu(j), m1, lam, gamma);
        c.W(i, j) = e.W;
        c.Xi(i, j) = e.Xi;
      } else if (s == 0) {
        const auto e = edge_entry(row_low[static_cast<std::size_t>(i)], omega,
                                  counts.mu(i), n1, lam, gamma);
        c.W(i, j) = e.W;
        c.Xi(i, j) = e.Xi;
      } else {
        const double p = spec.probs(r, s);
        double w;
        if (p <= 1.0 - p) {
          w = omega ? -lam * p / (1.0 - p) : lam;
        } else {
          w = omega ? lam : -lam * (1.0 - p) / p;
        }
        c.W(i, j) = w;
        c.Xi(i, j) = w - lam + gamma;
      }
    }
  }
  return c;
}

Certificate build_adversarial_certificate(const BinaryMatrix& A, const IndexSet& U1,
                                          const IndexSet& V1,
                                          const AdversarialBudget& budget) {
  check_block(A, U1, V1);
  budget.validate();
  const double gap = 2.0 * budget.delta_tilde - budget.delta - 1.0;
  require(gap > 0.0, ErrorKind::InfeasibleCertificate,
          "adversarial certificate needs 2 delta_tilde - delta > 1");

  const double m1 = static_cast<double>(U1.size());
  const double n1 = static_cast<double>(V1.size());
  const double root = std::sqrt(m1 * n1);
  const double c_tilde = 2.0 / gap;

  Certificate c = empty_certificate(A, U1, V1);
  c.kind = Certificate::Kind::Adversarial;
  c.gamma_used = 1.0 / (gap * root);
  c.lambda = 1.0 / root + c_tilde * (1.0 - budget.delta_tilde) / root;
  c.lambda_bar = c.lambda - 1.0 / root;

  const BlockCounts counts = block_counts(A, U1, V1);
  fill_block(A, c, counts);

  std::vector<char> in_u(static_cast<std::size_t>(A.rows()), 0);
  std::vector<char> in_v(static_cast<std::size_t>(A.cols()), 0);
  for (Index i : U1) in_u[static_cast<std::size_t>(i)] = 1;
  for (Index j : V1) in_v[static_cast<std::size_t>(j)] = 1;
  std::vector<char> col_low(static_cast<std::size_t>(A.cols()), 1);
  std::vector<char> row_low(static_cast<std::size_t>(A.rows()), 1);
  for (Index j = 0; j < A.cols(); ++j) {
    if (!in_v[static_cast<std::size_t>(j)]) {
      col_low[static_cast<std::size_t>(j)] =
          use_low_branch(true, counts.nu(j), m1, c.boundary_switches);
    }
  }
  for (Index i = 0; i < A.rows(); ++i) {
    if (!in_u[static_cast<std::size_t>(i)]) {
      row_low[static_cast<std::size_t>(i)] =
          use_low_branch(true, counts.mu(i), n1, c.boundary_switches);
    }
  }

  const double lam = c.lambda;
  const double gamma = c.gamma_used;
  for (Index j = 0; j < A.cols(); ++j) {
    const bool jv = in_v[static_cast<std::size_t>(j)];
    for (Index i = 0; i < A.rows(); ++i) {
      const bool iu = in_u[static_cast<std::size_t>(i)];
      const bool omega = !A(i, j);
      if (iu && jv) continue;
      EdgeEntry e{};
      if (iu) {
        e = edge_entry(col_low[static_cast<std::size_t>(j)], omega, counts.nu(j), m1,
                       lam, gamma);
      } else if (jv) {
        e = edge_entry(row_low[static_cast<std::size_t>(i)], omega, counts.mu(i), n1,
                       lam, gamma);
      } else {
        e.W = omega ? 0.0 : lam;
        e.Xi = e.W - lam + gamma;
      }
      c.W(i, j) = e.W;
      c.Xi(i, j) = e.Xi;
    }
  }
  return c;
}

double spectral_norm_power(const Matrix& W, int max_steps, double rtol) {
  if (W.size() == 0) return 0.0;
  Vector v(W.cols());
  for (Index k = 0; k < v.size(); ++k) v(k) = 1.0 + 0.01 * static_cast<double>(k % 7);
  v.normalize();
  double estimate = 0.0;
  for (int step = 0; step < max_steps; ++step) {
    Vector w = W.transpose() * (W * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    const double next = std::sqrt(v.dot(w));
    v = w / norm;
    if (std::abs(next - estimate) <= rtol * next) return next;
    estimate = next;
  }
  return estimate;
}

double spectral_norm(const Matrix& W) {
  if (W.size() == 0) return 0.0;
  if (std::min(W.rows(), W.cols()) <= 2000) {
    Eigen::BDCSVD<Matrix> svd(W);
    if (svd.info() != Eigen::Success) {
      fail(ErrorKind::NumericalFailure, "SVD failed in spectral norm");
    }
    return svd.singularValues()(0);
  }
  return spectral_norm_power(W);
}

std::pair<Matrix, Matrix> candidate_solution(const BinaryMatrix& A, const IndexSet& U1,
                                             const IndexSet& V1) {
  check_block(A, U1, V1);
  Matrix X = indicator(U1, A.rows()) * indicator(V1, A.cols()).transpose();
  Matrix Y = X.cwiseProduct((1.0 - A.to_real().array()).matrix());
  return {std::move(X), std::move(Y)};
}

const KktCheck& VerificationReport::get(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  fail(ErrorKind::InvalidArgument, "no check named '" + name + "'");
}

void VerificationReport::write(std::ostream& out) const {
  for (const auto& c : checks) {
    out << c.name << ' ' << format_number(c.value) << ' ' << format_number(c.threshold)
        << ' ' << (c.informational ? "INFO" : (c.pass ? "PASS" : "FAIL")) << '\n';
  }
  out << "overall " << (pass ? "PASS" : "FAIL") << '\n';
}

VerificationReport verify_kkt(const BinaryMatrix& A, const Matrix& X_bar,
                              const Matrix& Y_bar, const Certificate& cert,
                              double tol) {
  return verify_kkt(A, X_bar, Y_bar, cert, KktTolerances::uniform(tol));
}

VerificationReport verify_kkt(const BinaryMatrix& A, const Matrix& X_bar,
                              const Matrix& Y_bar, const Certificate& cert,
                              const KktTolerances& tol) {
  const Index M = A.rows();
  const Index N = A.cols();
  auto same = [&](const Matrix& X) { return X.rows() == M && X.cols() == N; };
  require(same(X_bar) && same(Y_bar) && same(cert.Lambda) && same(cert.Xi) &&
              same(cert.W),
          ErrorKind::InvalidArgument, "verify_kkt: shape mismatch");
  check_block(A, cert.U1, cert.V1);

  const double m1 = static_cast<double>(cert.U1.size());
  const double n1 = static_cast<double>(cert.V1.size());
  const double root = std::sqrt(m1 * n1);
  const Vector u = indicator(cert.U1, M);
  const Vector v = indicator(cert.V1, N);

  Matrix residual = (u * v.transpose()) / root + cert.W + cert.Lambda - cert.Xi;
  residual.array() += cert.gamma_used - cert.lambda;

  VerificationReport rep;
  auto add = [&](std::string name, double value, double threshold, bool pass,
                 bool info = false) {
    rep.checks.push_back({std::move(name), value, threshold, pass, info});
  };

  const double stat = residual.cwiseAbs().maxCoeff();
  add("stationarity", stat, tol.stationarity, stat <= tol.stationarity);

  const double slack_lambda =
      std::abs((cert.Lambda.array() * (X_bar.array() - 1.0)).sum());
  add("slackness_lambda", slack_lambda, tol.slackness, slack_lambda <= tol.slackness);
  const double slack_xi = std::abs((cert.Xi.array() * Y_bar.array()).sum());
  add("slackness_xi", slack_xi, tol.slackness, slack_xi <= tol.slackness);
  add("slackness_xi_scaled", slack_xi / root, tol.slackness,
      slack_xi / root <= tol.slackness, true);

  const double wu = (cert.W.transpose() * u).cwiseAbs().maxCoeff();
  const double wv = (cert.W * v).cwiseAbs().maxCoeff();
  add("orthogonality_Wt_u", wu, tol.orthogonality, wu <= tol.orthogonality);
  add("orthogonality_W_v", wv, tol.orthogonality, wv <= tol.orthogonality);

  const double wnorm = spectral_norm(cert.W);
  add("spectral_norm_W", wnorm, 1.0, wnorm < 1.0);

  add("lambda_scalar", cert.lambda, -tol.sign, cert.lambda >= -tol.sign);
  const double min_lambda = cert.Lambda.minCoeff();
  add("min_Lambda", min_lambda, -tol.sign, min_lambda >= -tol.sign);
  const double min_xi = cert.Xi.minCoeff();
  add("min_Xi", min_xi, -tol.sign, min_xi >= -tol.sign);

  rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(),
                         [](const KktCheck& c) { return c.informational || c.pass; });
  return rep;
}

}  // namespace densub
