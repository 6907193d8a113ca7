#include "densub/experiments.hpp"

#include "densub/error.hpp"
#include "densub/kv.hpp"
#include "densub/relaxation.hpp"
#include "densub/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>
#include <tuple>

namespace densub {

namespace {

using CellKey = std::tuple<std::int64_t, Index, int>;

std::int64_t q_key(double q) { return std::llround(q * 1e9); }

CellKey key_of(double q, Index m, int trial) { return {q_key(q), m, trial}; }

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

Matrix round_nearest(const Matrix& X) { return X.array().round().matrix(); }

bool recovered(const Matrix& X, const Matrix& X0) {
  require(X.rows() == X0.rows() && X.cols() == X0.cols(), ErrorKind::InvalidArgument,
          "recovered: shape mismatch");
  const double ref = X0.norm();
  require(ref > 0.0, ErrorKind::InvalidArgument, "recovered: X0 is zero");
  if (!X.allFinite()) return false;
  return (round_nearest(X) - X0).norm() / ref < 1e-3;
}

TopK round_topk_diagonal(const Matrix& X, Index m) {
  const Index n = std::min(X.rows(), X.cols());
  require(m >= 1 && m <= n, ErrorKind::InvalidArgument,
          "top-k diagonal needs 1 <= m <= min(M, N)");
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Index a, Index b) { return X(a, a) > X(b, b); });
  TopK out;
  out.indices.assign(idx.begin(), idx.begin() + m);
  for (Index i : out.indices) {
    if (!(X(i, i) > 0.0)) out.degenerate = true;
  }
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

void GridConfig::validate() const {
  require(experiment == 1 || experiment == 2, ErrorKind::InvalidArgument,
          "experiment must be 1 or 2");
  require(trials >= 1, ErrorKind::InvalidArgument, "trials must be at least 1");
  require(M >= 1, ErrorKind::InvalidArgument, "M must be positive");
  require(jobs >= 1, ErrorKind::InvalidArgument, "jobs must be at least 1");
  for (double q : q_values) {
    require(q > 0.0 && q <= 1.0, ErrorKind::InvalidArgument, "q values must lie in (0,1]");
  }
  for (Index m : m_values) {
    require(m >= 1 && m <= M, ErrorKind::InvalidArgument, "m values must lie in [1, M]");
  }
}

PlantedModelSpec grid_cell_spec(const GridConfig& config, double q, Index m) {
  return config.experiment == 1 ? experiment1_spec(q, m, config.M)
                                : experiment2_spec(q, m, config.M);
}

double grid_cell_gamma(const GridConfig& config, const PlantedModelSpec& spec, double q,
                       Index m) {
  const double md = static_cast<double>(m);
  double p_star = 0.0;
  for (Index r = 0; r < spec.probs.rows(); ++r) {
    for (Index s = 0; s < spec.probs.cols(); ++s) {
      if (r || s) p_star = std::max(p_star, spec.probs(r, s));
    }
  }
  if (config.gamma_rule == GridGammaRule::Theorem) {
    return gamma_select(GammaRule::theorem(q, p_star, md, md, config.c2));
  }
  const double p_ref = config.experiment == 1 ? spec.probs.minCoeff() : 0.25;
  return gamma_select(GammaRule::experiment(q, p_ref, md));
}

std::uint64_t trial_seed(std::uint64_t master, int experiment, double q, Index m,
                         int trial) {
  return derive_seed(master, {static_cast<std::uint64_t>(experiment),
                              static_cast<std::uint64_t>(q_key(q)),
                              static_cast<std::uint64_t>(m),
                              static_cast<std::uint64_t>(trial)});
}

TrialRecord run_trial(const GridConfig& config, double q, Index m, int trial) {
  TrialRecord rec;
  rec.q = q;
  rec.m = m;
  rec.trial = trial;
  rec.seed = trial_seed(config.master_seed, config.experiment, q, m, trial);
  const PlantedModelSpec spec = grid_cell_spec(config, q, m);
  auto sample = sample_psm(spec, rec.seed);
  SolveConfig sc = config.solver;
  sc.time_limit = config.trial_time_limit;
  try {
    sc.gamma = grid_cell_gamma(config, spec, q, m);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InfeasibleRule) throw;
    return rec;  // no valid gamma: counted as non-recovery
  }
  try {
    const SolveResult res = solve(ProblemInstance(std::move(sample.A), m, m), sc);
    rec.iterations = res.iterations;
    rec.seconds = res.seconds;
    rec.recovered = !res.timed_out && recovered(res.X, sample.truth.X0);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NumericalFailure) throw;
  }
  return rec;
}

RecoveryGrid run_grid(const GridConfig& config, const std::vector<TrialRecord>& completed,
                      const std::function<void(const TrialRecord&)>& on_trial) {
  config.validate();
  std::map<CellKey, TrialRecord> done;
  for (const auto& r : completed) done[key_of(r.q, r.m, r.trial)] = r;

  struct Task {
    double q;
    Index m;
    int trial;
  };
  std::vector<Task> tasks;
  for (double q : config.q_values) {
    for (Index m : config.m_values) {
      for (int t = 0; t < config.trials; ++t) {
        if (!done.count(key_of(q, m, t))) tasks.push_back({q, m, t});
      }
    }
  }

  std::vector<TrialRecord> fresh(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= tasks.size()) return;
      try {
        fresh[k] = run_trial(config, tasks[k].q, tasks[k].m, tasks[k].trial);
        if (on_trial) {
          std::lock_guard<std::mutex> lock(callback_mutex);
          on_trial(fresh[k]);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(callback_mutex);
        if (!error) error = std::current_exception();
        next = tasks.size();
        return;
      }
    }
  };
  const int workers = std::max(1, std::min<int>(config.jobs, static_cast<int>(tasks.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  for (const auto& r : fresh) done[key_of(r.q, r.m, r.trial)] = r;

  RecoveryGrid grid;
  grid.q_values = config.q_values;
  grid.m_values = config.m_values;
  grid.trials = config.trials;
  const auto nq = static_cast<Index>(config.q_values.size());
  const auto nm = static_cast<Index>(config.m_values.size());
  grid.counts = Eigen::MatrixXi::Zero(nq, nm);
  grid.mean_iterations = Matrix::Zero(nq, nm);
  grid.mean_seconds = Matrix::Zero(nq, nm);
  for (Index a = 0; a < nq; ++a) {
    for (Index b = 0; b < nm; ++b) {
      for (int t = 0; t < config.trials; ++t) {
        const auto& r = done.at(key_of(config.q_values[static_cast<std::size_t>(a)],
                                       config.m_values[static_cast<std::size_t>(b)], t));
        grid.records.push_back(r);
        grid.counts(a, b) += r.recovered ? 1 : 0;
        grid.mean_iterations(a, b) += r.iterations;
        grid.mean_seconds(a, b) += r.seconds;
      }
    }
  }
  grid.mean_iterations /= static_cast<double>(config.trials);
  grid.mean_seconds /= static_cast<double>(config.trials);
  return grid;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::InvalidArgument,
          "spearman needs two samples of equal length >= 2");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

std::string trial_csv_line(const TrialRecord& r) {
  return format_number(r.q) + "," + std::to_string(r.m) + "," + std::to_string(r.trial) +
         "," + std::to_string(r.seed) + "," + (r.recovered ? "1" : "0") + "," +
         std::to_string(r.iterations) + "," + format_number(r.seconds);
}

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records,
                      bool with_header) {
  if (with_header) out << "q,m,trial,seed,recovered,iters,seconds\n";
  for (const auto& r : records) out << trial_csv_line(r) << '\n';
}

std::vector<TrialRecord> read_trials_csv(std::istream& in) {
  std::vector<TrialRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.rfind("q,", 0) == 0) continue;
    const auto f = split_fields(line);
    const std::string where = "trials csv line " + std::to_string(lineno);
    // A partially written final line is dropped so the trial reruns.
    if (f.size() != 7) {
      if (in.peek() == std::char_traits<char>::eof()) break;
      fail(ErrorKind::Parse, where + ": expected 7 fields");
    }
    TrialRecord r;
    r.q = parse_double(f[0], where);
    r.m = parse_int(f[1], where);
    r.trial = static_cast<int>(parse_int(f[2], where));
    r.seed = std::stoull(f[3]);
    r.recovered = parse_int(f[4], where) != 0;
    r.iterations = static_cast<int>(parse_int(f[5], where));
    r.seconds = parse_double(f[6], where);
    out.push_back(r);
  }
  return out;
}

void write_counts_csv(std::ostream& out, const RecoveryGrid& grid) {
  out << "q,m,count\n";
  for (std::size_t a = 0; a < grid.q_values.size(); ++a) {
    for (std::size_t b = 0; b < grid.m_values.size(); ++b) {
      out << format_number(grid.q_values[a]) << ',' << grid.m_values[b] << ','
          << grid.counts(static_cast<Index>(a), static_cast<Index>(b)) << '\n';
    }
  }
}

void write_pgm(std::ostream& out, const RecoveryGrid& grid) {
  out << "P2\n" << grid.m_values.size() << ' ' << grid.q_values.size() << "\n255\n";
  for (std::size_t a = 0; a < grid.q_values.size(); ++a) {
    for (std::size_t b = 0; b < grid.m_values.size(); ++b) {
      const double v = 255.0 * grid.counts(static_cast<Index>(a), static_cast<Index>(b)) /
                       std::max(grid.trials, 1);
      if (b) out << ' ';
      out << std::lround(v);
    }
    out << '\n';
  }
}

}  // namespace densub
