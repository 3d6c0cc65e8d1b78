// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "qnd/gaussian_model.hpp"
#include "qnd/trajectory.hpp"

namespace qnd {

// Born-rule frequency test: converged trajectories land in class ibar with
// probability Tr(theta0 Pi_ibar).
struct BornClassStat {
  int class_label = 0;
  double expected_fraction = 0.0;
  long observed_count = 0;
  double observed_fraction = 0.0;
  double binomial_z = 0.0;     // (observed - expected) / binomial sigma
  bool binomial_pass = true;   // two-sided at alpha, Bonferroni-corrected
};

struct BornTestReport {
  std::vector<BornClassStat> classes;
  long n_converged = 0;
  long n_unconverged = 0;          // excluded from the counts
  double chi_square = 0.0;
  int dof = 0;
  double p_value = 1.0;
  bool zero_weight_violation = false;  // a class with zero Born weight got hits
  double alpha = 0.01;
  double bonferroni_alpha = 0.01;  // alpha divided across the populated classes
  bool pass = false;  // chi-square above alpha, all class gates, no zero-weight hits
};

BornTestReport born_rule_test(const std::vector<TrajectoryRecord>& records,
                              const DensityMatrix& theta0,
                              const std::vector<DegeneracyClass>& classes, double alpha);

// Worst trace distance between converged final states and the projection of
// the initial state onto their class (mixed targets allowed and expected
// for degenerate classes).
struct LudersClassDistance {
  int class_label = 0;
  long count = 0;
  double max_distance = 0.0;
};

std::vector<LudersClassDistance> luders_batch_check(
    const std::vector<TrajectoryRecord>& records, const DensityMatrix& theta0,
    const std::vector<DegeneracyClass>& classes);

// y_M = (p_1 + ... + p_M) / M per trajectory.
struct YmSample {
  int m_outcomes = 0;
  std::vector<double> values;
};

// Averages the first M continuous outcomes of each record.
YmSample ym_from_records(const std::vector<TrajectoryRecord>& records, int m_outcomes);

// Control arm: every one of the M outcomes is drawn from the fixed initial
// state (a fresh copy per measurement), never applying the map. Factorized
// statistics, unimodal y_M.
YmSample ensemble_mode_sampler(const DensityMatrix& theta0, const GaussianModel& model,
                               int m_outcomes, int n_samples, std::uint64_t seed);

// Compares a y_M sample against a predicted component mixture. Values are
// hard-assigned to the nearest component center; when centers sit closer
// than 6 component standard deviations only the weight test runs and the
// report is flagged.
struct YmClusterStat {
  double predicted_weight = 0.0;
  double observed_fraction = 0.0;
  double predicted_center = 0.0;
  double observed_mean = 0.0;
  double predicted_variance = 0.0;
  double observed_variance = 0.0;
  long count = 0;
  bool weight_pass = true;
  bool mean_pass = true;
  bool variance_pass = true;
};

struct YmCompareReport {
  std::vector<YmClusterStat> clusters;
  bool overlap_flagged = false;
  double min_separation_sigmas = 0.0;
  double n_sigma = 3.0;
  bool pass = false;
};

YmCompareReport ym_compare(const YmSample& sample, const YmDistribution& predicted,
                           double n_sigma = 3.0);

// Equal-width histogram, for the CSV export.
struct Histogram {
  std::vector<double> edges;   // bins + 1 entries
  std::vector<long> counts;    // values outside [lo, hi) are dropped
};

Histogram make_histogram(const std::vector<double>& values, int bins, double lo, double hi);

}  // namespace qnd
