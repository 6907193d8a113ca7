#pragma once

#include "densub/kv.hpp"
#include "densub/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace densub {

/// 6 max{sqrt(rho (1 - rho) k log t), log t}.
double bernstein_radius(double rho, double k, double t);

struct Condition {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  /// Signed slack; nonnegative iff the condition holds.
  double margin = 0.0;
  bool pass = false;
};

struct RecoveryConditionReport {
  std::vector<Condition> conditions;
  /// Constants and derived quantities echoed for the record.
  std::vector<std::pair<std::string, double>> quantities;
  bool pass = false;

  const Condition& get(const std::string& name) const;
  double quantity(const std::string& name) const;

  KeyValue to_kv() const;
  std::string csv_header() const;
  std::string csv_row() const;
};

/// Size and gap conditions of the random planted model for every block
/// (r, s) != (1, 1).
RecoveryConditionReport check_random_conditions(const PlantedModelSpec& spec,
                                                double c1 = 1.0);

/// Balanced model: equal square blocks, proxy max p/(1-p), gap against max p.
RecoveryConditionReport check_balanced_conditions(const PlantedModelSpec& spec,
                                                  double c = 1.0);

RecoveryConditionReport check_adversarial_conditions(const AdversarialBudget& budget,
                                                     Index m1, Index n1,
                                                     double c = 1.0);

struct ConcentrationResult {
  double norm = 0.0;
  double threshold = 0.0;
  /// Threshold with c = 1, used for calibration.
  double base_threshold = 0.0;
  bool pass = false;
  /// Columns that are all ones, where the replacement value is undefined
  /// and nothing needs replacing.
  Index degenerate_columns = 0;
};

/// Samples Theta (1 with probability p_s, else -p_s/(1-p_s)) over n rows and
/// the given column blocks, replaces the non-one entries of column j by
/// -n_j/(n - n_j), and compares ||Theta - Theta~|| with
/// c max{sqrt(s2 N log N), (log N)^{3/2}}, s2 = max p_s/(1-p_s).
ConcentrationResult concentration_trial(Index n, const std::vector<Index>& col_sizes,
                                        const std::vector<double>& probs, double c,
                                        std::uint64_t seed);

}  // namespace densub
