#include "densub/bounds.hpp"

#include "densub/certificate.hpp"
#include "densub/error.hpp"
#include "densub/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace densub {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// min{(1-p)/p, p/(1-p)}, with the finite ratio at p in {0, 1}.
double two_sided_proxy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return std::min((1.0 - p) / p, p / (1.0 - p));
}

double odds(double p) { return p >= 1.0 ? kInf : p / (1.0 - p); }

Condition at_most(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, threshold - value, value <= threshold};
}

Condition at_least(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, value - threshold, value >= threshold};
}

void finish(RecoveryConditionReport& r) {
  r.pass = std::all_of(r.conditions.begin(), r.conditions.end(),
                       [](const Condition& c) { return c.pass; });
}

std::vector<Index> block_sizes(const std::vector<IndexSet>& blocks) {
  std::vector<Index> out;
  for (const auto& b : blocks) out.push_back(static_cast<Index>(b.size()));
  return out;
}

}  // namespace

double bernstein_radius(double rho, double k, double t) {
  require(rho >= 0.0 && rho <= 1.0, ErrorKind::InvalidArgument, "rho must lie in [0,1]");
  require(k >= 0.0, ErrorKind::InvalidArgument, "k must be nonnegative");
  require(t > 1.0, ErrorKind::InvalidArgument, "t must exceed 1");
  const double lt = std::log(t);
  return 6.0 * std::max(std::sqrt(rho * (1.0 - rho) * k * lt), lt);
}

const Condition& RecoveryConditionReport::get(const std::string& name) const {
  for (const auto& c : conditions) {
    if (c.name == name) return c;
  }
  fail(ErrorKind::InvalidArgument, "no condition named '" + name + "'");
}

double RecoveryConditionReport::quantity(const std::string& name) const {
  for (const auto& [k, v] : quantities) {
    if (k == name) return v;
  }
  fail(ErrorKind::InvalidArgument, "no quantity named '" + name + "'");
}

KeyValue RecoveryConditionReport::to_kv() const {
  KeyValue kv;
  for (const auto& [k, v] : quantities) kv.set(k, v);
  for (const auto& c : conditions) {
    kv.set(c.name + ".value", c.value);
    kv.set(c.name + ".threshold", c.threshold);
    kv.set(c.name + ".margin", c.margin);
    kv.set(c.name + ".pass", std::string(c.pass ? "true" : "false"));
  }
  kv.set("pass", std::string(pass ? "true" : "false"));
  return kv;
}

std::string RecoveryConditionReport::csv_header() const {
  std::string out;
  for (const auto& [k, v] : quantities) out += k + ",";
  for (const auto& c : conditions) out += c.name + "_margin," + c.name + "_pass,";
  return out + "pass";
}

std::string RecoveryConditionReport::csv_row() const {
  std::string out;
  for (const auto& [k, v] : quantities) out += format_number(v) + ",";
  for (const auto& c : conditions) {
    out += format_number(c.margin) + "," + (c.pass ? "1," : "0,");
  }
  return out + (pass ? "1" : "0");
}

RecoveryConditionReport check_random_conditions(const PlantedModelSpec& spec,
                                                double c1) {
  spec.validate();
  const auto rows = block_sizes(spec.partition.rows);
  const auto cols = block_sizes(spec.partition.cols);
  const double M = static_cast<double>(spec.rows());
  const double N = static_cast<double>(spec.cols());
  const double m1 = static_cast<double>(rows[0]);
  const double n1 = static_cast<double>(cols[0]);
  const double n_star = std::max(M, N);
  const double n1_star = std::min(m1, n1);
  const double logn = std::log(n_star);
  const double p11 = spec.probs(0, 0);
  const double sigma11 = p11 * (1.0 - p11);

  double sigma_tilde = 0.0;
  double p_star = -kInf;
  double min_area = kInf;
  double min_side = kInf;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t s = 0; s < cols.size(); ++s) {
      if (r == 0 && s == 0) continue;
      const double p = spec.probs(static_cast<Index>(r), static_cast<Index>(s));
      sigma_tilde = std::max(sigma_tilde, two_sided_proxy(p));
      p_star = std::max(p_star, p);
      const double mr = static_cast<double>(rows[r]);
      const double ns = static_cast<double>(cols[s]);
      min_area = std::min(min_area, mr * ns);
      min_side = std::min({min_side, mr, ns});
    }
  }

  RecoveryConditionReport rep;
  rep.quantities = {{"c1", c1},
                    {"N_star", n_star},
                    {"n1_star", n1_star},
                    {"p11", p11},
                    {"sigma11_sq", sigma11},
                    {"sigma_tilde_sq", sigma_tilde}};
  if (p_star == -kInf) {
    // A single block has no competitors; only the planted block exists.
    rep.quantities.emplace_back("p_star", 0.0);
    finish(rep);
    return rep;
  }
  const double threshold =
      c1 * std::max({std::sqrt(sigma_tilde * n_star * logn / (m1 * n1)),
                     std::sqrt(sigma11 * logn / n1_star), logn / n1_star});
  rep.quantities.emplace_back("p_star", p_star);
  rep.conditions.push_back(at_most("size_area", m1 * n1, min_area));
  rep.conditions.push_back(at_most("size_log", std::pow(logn, 3.0), min_side * min_side));
  rep.conditions.push_back(at_least("gap", p11 - p_star, threshold));
  finish(rep);
  return rep;
}

RecoveryConditionReport check_balanced_conditions(const PlantedModelSpec& spec,
                                                  double c) {
  spec.validate();
  const auto rows = block_sizes(spec.partition.rows);
  const auto cols = block_sizes(spec.partition.cols);
  require(rows == cols && std::all_of(rows.begin(), rows.end(),
                                      [&](Index s) { return s == rows[0]; }),
          ErrorKind::InvalidSpec, "balanced model needs equal square blocks");
  const double N = static_cast<double>(spec.rows());
  const double m = static_cast<double>(rows[0]);
  const double logn = std::log(N);
  const double p11 = spec.probs(0, 0);
  const double sigma11 = p11 * (1.0 - p11);

  double sigma_tilde = 0.0;
  double p_star = -kInf;
  for (Index r = 0; r < spec.probs.rows(); ++r) {
    for (Index s = 0; s < spec.probs.cols(); ++s) {
      if (r == 0 && s == 0) continue;
      sigma_tilde = std::max(sigma_tilde, odds(spec.probs(r, s)));
      p_star = std::max(p_star, spec.probs(r, s));
    }
  }
  RecoveryConditionReport rep;
  rep.quantities = {{"c", c},          {"N", N},
                    {"m", m},          {"p11", p11},
                    {"sigma11_sq", sigma11}, {"sigma_tilde_sq", sigma_tilde}};
  rep.conditions.push_back(at_most("size_log", std::pow(logn, 3.0), m * m));
  if (p_star == -kInf) {
    rep.quantities.emplace_back("p_star", 0.0);
    finish(rep);
    return rep;
  }
  const double threshold =
      c * std::max({std::sqrt(sigma_tilde * N * logn / (m * m)),
                    std::sqrt(sigma11 * logn / m), logn / m});
  rep.quantities.emplace_back("p_star", p_star);
  rep.conditions.push_back(at_least("gap", p11 - p_star, threshold));
  finish(rep);
  return rep;
}

RecoveryConditionReport check_adversarial_conditions(const AdversarialBudget& budget,
                                                     Index m1, Index n1, double c) {
  budget.validate();
  require(m1 >= 1 && n1 >= 1, ErrorKind::InvalidArgument, "block sizes must be positive");
  RecoveryConditionReport rep;
  rep.quantities = {{"c", c},
                    {"delta", budget.delta},
                    {"delta_tilde", budget.delta_tilde},
                    {"m1", static_cast<double>(m1)},
                    {"n1", static_cast<double>(n1)}};
  const double gap = 2.0 * budget.delta_tilde - budget.delta;
  rep.conditions.push_back(
      {"gap", gap, 1.0, gap - 1.0, gap > 1.0});
  rep.conditions.push_back(at_most("size_caps", static_cast<double>(budget.max_cap()),
                                   c * static_cast<double>(m1 * n1)));
  finish(rep);
  return rep;
}

ConcentrationResult concentration_trial(Index n, const std::vector<Index>& col_sizes,
                                        const std::vector<double>& probs, double c,
                                        std::uint64_t seed) {
  require(n >= 1, ErrorKind::InvalidArgument, "concentration trial needs n >= 1");
  require(!col_sizes.empty() && col_sizes.size() == probs.size(),
          ErrorKind::InvalidArgument, "column blocks and probabilities must match");
  Index N = 0;
  double s2 = 0.0;
  for (std::size_t s = 0; s < col_sizes.size(); ++s) {
    require(col_sizes[s] >= 1, ErrorKind::InvalidArgument, "column blocks must be nonempty");
    require(probs[s] >= 0.0 && probs[s] <= 0.5, ErrorKind::InvalidArgument,
            "concentration trial needs p_s in [0, 1/2]");
    N += col_sizes[s];
    s2 = std::max(s2, odds(probs[s]));
  }

  Rng rng(seed);
  Matrix diff = Matrix::Zero(n, N);
  ConcentrationResult res;
  Index j = 0;
  for (std::size_t s = 0; s < col_sizes.size(); ++s) {
    const double p = probs[s];
    const double low = -p / (1.0 - p);
    for (Index b = 0; b < col_sizes[s]; ++b, ++j) {
      std::vector<char> one(static_cast<std::size_t>(n));
      Index nj = 0;
      for (Index i = 0; i < n; ++i) {
        one[static_cast<std::size_t>(i)] = rng.bernoulli(p);
        nj += one[static_cast<std::size_t>(i)];
      }
      if (nj == n) {
        ++res.degenerate_columns;
        continue;
      }
      const double replacement =
          -static_cast<double>(nj) / static_cast<double>(n - nj);
      for (Index i = 0; i < n; ++i) {
        if (!one[static_cast<std::size_t>(i)]) diff(i, j) = low - replacement;
      }
    }
  }
  const double logn = std::log(static_cast<double>(N));
  res.norm = spectral_norm(diff);
  res.base_threshold = std::max(std::sqrt(s2 * static_cast<double>(N) * logn),
                                std::pow(std::max(logn, 0.0), 1.5));
  res.threshold = c * res.base_threshold;
  res.pass = res.norm <= res.threshold;
  return res;
}

}  // namespace densub
