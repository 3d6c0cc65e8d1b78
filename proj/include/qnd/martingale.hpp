// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "qnd/discrete_model.hpp"
#include "qnd/trajectory.hpp"

namespace qnd {

// Exact one-step checks enumerate every outcome; Monte Carlo enters only
// through decay_curve. All residuals are plain doubles so callers pin their
// own tolerances.

// sum_I P(alpha_I) Tr(theta'_I Pi_ibar) - Tr(theta Pi_ibar) per class.
// Zero for every valid model: the class weights are martingales.
struct DiagMartingaleCheck {
  RealVector residuals;
  double max_abs_residual = 0.0;
};

DiagMartingaleCheck exact_onestep_diag(const DensityMatrix& theta, const DiscreteModel& model,
                                       const std::vector<DegeneracyClass>& classes);

// One-step conditional expectation of the off-diagonal magnitudes
// A^{ij} = |theta^{ij}|: equals mu_ij A^{ij}, a martingale within a class
// (mu = 1) and a strict supermartingale across classes (mu < 1).
struct OffdiagCheck {
  RealMatrix expected_factor;   // mu_ij
  RealMatrix residuals;         // |sum_I P A'_I - mu A|
  RealMatrix measured_factor;   // NaN where A^{ij} is too small to divide
  double max_abs_residual = 0.0;
};

OffdiagCheck exact_onestep_offdiag(const DensityMatrix& theta, const DiscreteModel& model,
                                   const std::vector<DegeneracyClass>& classes);

// Ensemble mean of A_n^{ij} per step with standard errors, plus a geometric
// rate fitted by least squares on the log means. Requires trajectories run
// with record_offdiag and stride 1.
struct DecayCurve {
  std::vector<double> mean;          // index n-1 holds E[A_n]
  std::vector<double> stderr_mean;
  double fitted_rate = 0.0;
  double fitted_rate_stderr = 0.0;
  bool low_sample_warning = false;   // fewer than 100 trajectories
};

DecayCurve decay_curve(const std::vector<TrajectoryRecord>& records, int i, int j);

// Asymptotic fixed-point screen over final states: a converged state must
// put all weight (>= 1-eps) on exactly one class; a state carrying two
// classes above eps contradicts the fixed-point relations and is flagged.
// Classes observed as distinct limits must also differ in |lambda|^2 for
// at least one outcome.
struct FixedPointReport {
  int n_converged = 0;
  int n_pending = 0;       // not converged yet; policy case, not a failure
  int n_multi_class = 0;   // hard violations
  std::vector<long> per_class_counts;
  double min_observed_separation = 0.0;  // over pairs of populated classes
  bool distinguishable = true;
  bool pass = true;
};

FixedPointReport asymptotic_fixed_point_check(const std::vector<TrajectoryRecord>& records,
                                              const DiscreteModel& model,
                                              const std::vector<DegeneracyClass>& classes,
                                              double epsilon);

// sum_I P(alpha_I) Tr(theta'_I^m) - Tr(theta^m); non-negative for m = 2, 3:
// the moments of the spectrum are submartingales.
double purity_submartingale_residual(const DensityMatrix& theta, const DiscreteModel& model,
                                     int m);

// Non-selective evolution sum_I M_I theta M_I^dag. The full density matrix
// is not a martingale: off-diagonals contract by the complex mu factors.
ComplexMatrix nonselective_map(const DensityMatrix& theta, const DiscreteModel& model);

}  // namespace qnd
