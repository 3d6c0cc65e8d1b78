// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "qnd/hilbert.hpp"
#include "qnd/observable.hpp"
#include "qnd/rng.hpp"

namespace qnd {

// Continuous-outcome QND model: operator eigenvalues are Gaussians of width
// delta centered on the observable eigenvalues,
//   lambda_p^i = N exp(-(p - q_i)^2 / (2 delta^2)),  N = (pi delta^2)^(-1/4).
// Large delta gives weak measurements, small delta near-projective ones.
struct GaussianModel {
  ObservableSpec spec;
  double delta = 1.0;

  int dim() const { return spec.dim(); }
  double normalization() const;  // N
};

// lambda_p^i; satisfies the continuum completeness integral per column.
double lambda_continuous(const GaussianModel& model, double p, int i);

// Outcome density P(p) = sum_i theta^{ii} Normal(q_i, delta/sqrt(2))(p).
double outcome_density(const DensityMatrix& theta, const GaussianModel& model, double p);
double log_outcome_density(const DensityMatrix& theta, const GaussianModel& model, double p);

// Exact mixture draw: a basis index by diagonal weight, then a Gaussian
// around its eigenvalue. No discretization bias.
double sample_outcome(const DensityMatrix& theta, const GaussianModel& model, RngStream& rng);

struct GaussianUpdate {
  DensityMatrix state;  // theta'^{ij} = lambda^i lambda^j theta^{ij} / P(p)
  double density;       // P(p); may underflow to 0 at extreme p, the state
                        // update itself works in shifted exponents
};

// One continuous-outcome measurement map application.
GaussianUpdate apply_gaussian(const DensityMatrix& theta, const GaussianModel& model, double p);

// Distribution of y_M, the average of the first M outcomes.
enum class YmKind { ensemble, repeated };

struct YmComponent {
  double weight;
  double center;
  double variance;
};

// ensemble: one Gaussian at <q> with variance delta^2/(2M) (fresh copy per
// measurement). repeated: one component per degeneracy class, weight
// Tr(theta0 Pi_ibar), centered on the class eigenvalue, same variance
// (repeated measurements on a single copy).
struct YmDistribution {
  YmKind kind = YmKind::ensemble;
  int m_outcomes = 1;
  std::vector<YmComponent> components;
};

YmDistribution ym_pdf(YmKind kind, int m_outcomes, const DensityMatrix& theta0,
                      const GaussianModel& model, const std::vector<DegeneracyClass>& classes);

double ym_density(const YmDistribution& dist, double y);

}  // namespace qnd
