// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "qnd/hilbert.hpp"
#include "qnd/observable.hpp"

namespace qnd {

// Every outcome probability below this counts as impossible; guards the
// division in the measurement map.
inline constexpr double kMinOutcomeProbability = 1e-300;

// Discrete-outcome QND measurement model. Each operator M_I is diagonal in
// the observable eigenbasis, so the full d x d operator is never
// materialized: row I of `lambda` holds its eigenvalues lambda_I^i.
struct DiscreteModel {
  std::vector<std::string> outcomes;  // labels alpha_I
  ComplexMatrix lambda;               // rows: outcomes, cols: basis indices

  int dim() const { return static_cast<int>(lambda.cols()); }
  int n_outcomes() const { return static_cast<int>(lambda.rows()); }
};

struct ConstraintViolation {
  std::string constraint;     // "completeness" | "class_constancy" | "distinguishability" | "shape"
  std::vector<int> indices;   // offending basis / outcome / class indices
  double magnitude = 0.0;     // size of the violation
  std::string detail;
};

struct ValidationReport {
  std::vector<ConstraintViolation> violations;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

// Checks the three model invariants against the degeneracy classes:
//   completeness        sum_I |lambda_I^i|^2 = 1 per basis index (1e-12;
//                       1e-9 for binned continuous models, pass the looser
//                       tolerance explicitly)
//   class constancy     lambda_I^i identical within a degeneracy class
//   distinguishability  every pair of classes differs in |lambda|^2 for at
//                       least one outcome, by more than 1e-9
ValidationReport validate_model(const DiscreteModel& model,
                                const std::vector<DegeneracyClass>& classes,
                                double completeness_tolerance = 1e-12);

// mu_ij = sum_I |lambda_I^i| |lambda_I^j|: the one-step decay factor of the
// off-diagonal magnitudes. 1 on the diagonal and within a degeneracy class,
// < 1 across classes.
struct MuMatrix {
  RealMatrix per_index;  // d x d
  RealMatrix per_class;  // K x K
};

MuMatrix mu_matrix(const DiscreteModel& model, const std::vector<DegeneracyClass>& classes);

// Complex one-step factors sum_I lambda_I^i conj(lambda_I^j). |mu_tilde| is
// mu; the phases carry no martingale statement, exposed for inspection only.
ComplexMatrix mu_tilde(const DiscreteModel& model);

// P(alpha_I) = sum_i |lambda_I^i|^2 theta^{ii}; non-negative, sums to 1.
RealVector outcome_distribution(const DensityMatrix& theta, const DiscreteModel& model);

struct MeasurementResult {
  DensityMatrix state;  // M theta M^dag / p
  double probability;   // p = Tr(M theta M^dag)
};

// One measurement map application for the given outcome. Throws
// NumericalError when the outcome probability is below
// kMinOutcomeProbability.
MeasurementResult apply_measurement(const DensityMatrix& theta, const DiscreteModel& model,
                                    int outcome);

// Discretizes the continuous Gaussian model of width delta onto n_bins
// equal bins over [range_min, range_max]: |lambda_I^i|^2 is the mass the
// Normal(q_i, delta/sqrt(2)) outcome density puts on bin I. Columns are
// renormalized to exact completeness when the range captures the mass
// (raw column sum within 1e-6 of 1); a truncated range is left as-is so
// validate_model reports the completeness failure.
DiscreteModel binned_gaussian_model(double delta, const ObservableSpec& spec, int n_bins,
                                    double range_min, double range_max);

}  // namespace qnd
