#pragma once

#include "densub/admm.hpp"
#include "densub/model.hpp"
#include "densub/types.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace densub {

Matrix round_nearest(const Matrix& X);

/// ||round(X) - X0||_F / ||X0||_F < 1e-3.
bool recovered(const Matrix& X, const Matrix& X0);

struct TopK {
  IndexSet indices;  // ascending
  /// Fewer than m strictly positive diagonal entries were available.
  bool degenerate = false;
};

/// The m largest diagonal entries of X, ties to the smaller index.
TopK round_topk_diagonal(const Matrix& X, Index m);

enum class GridGammaRule { Experiment, Theorem };

struct GridConfig {
  int experiment = 1;  // 1 or 2
  std::vector<double> q_values;
  std::vector<Index> m_values;
  Index M = 200;
  int trials = 10;
  SolveConfig solver;  // gamma is set per trial
  GridGammaRule gamma_rule = GridGammaRule::Experiment;
  double c2 = 6.0;
  std::uint64_t master_seed = 1;
  int jobs = 1;
  double trial_time_limit = 300.0;

  void validate() const;
};

struct TrialRecord {
  double q = 0.0;
  Index m = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  bool recovered = false;
  int iterations = 0;
  double seconds = 0.0;
};

struct RecoveryGrid {
  std::vector<double> q_values;
  std::vector<Index> m_values;
  int trials = 0;
  Eigen::MatrixXi counts;      // |q| x |m|
  Matrix mean_iterations;      // |q| x |m|
  Matrix mean_seconds;         // |q| x |m|
  std::vector<TrialRecord> records;  // ordered by (q, m, trial)
};

/// Spec of one grid cell.
PlantedModelSpec grid_cell_spec(const GridConfig& config, double q, Index m);
/// Gamma used for one grid cell.
double grid_cell_gamma(const GridConfig& config, const PlantedModelSpec& spec, double q,
                       Index m);
std::uint64_t trial_seed(std::uint64_t master, int experiment, double q, Index m,
                         int trial);

/// Runs one trial; solver failures and timeouts count as non-recovery.
TrialRecord run_trial(const GridConfig& config, double q, Index m, int trial);

/// Runs every (q, m, trial) not already present in `completed`. `on_trial` is
/// called (serialized) after each newly finished trial.
RecoveryGrid run_grid(const GridConfig& config,
                      const std::vector<TrialRecord>& completed = {},
                      const std::function<void(const TrialRecord&)>& on_trial = {});

/// Spearman rank correlation with average ranks for ties; NaN when either
/// sample is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records,
                      bool with_header = true);
std::string trial_csv_line(const TrialRecord& r);
std::vector<TrialRecord> read_trials_csv(std::istream& in);
void write_counts_csv(std::ostream& out, const RecoveryGrid& grid);
/// P2 graymap, one pixel per cell, rows follow q_values and columns m_values,
/// value round(255 count / trials).
void write_pgm(std::ostream& out, const RecoveryGrid& grid);

}  // namespace densub
