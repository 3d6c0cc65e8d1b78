// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#include "qnd/fuzz.hpp"

#include <algorithm>
#include <cmath>

namespace qnd::fuzz {

namespace {

ComplexVector random_complex_vector(int dim, RngStream& rng) {
  ComplexVector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = Complex(rng.next_normal(), rng.next_normal());
  return v;
}

}  // namespace

DensityMatrix random_density(int dim, RngStream& rng) {
  ComplexMatrix g(dim, dim);
  for (int i = 0; i < dim; ++i) g.col(i) = random_complex_vector(dim, rng);
  ComplexMatrix m = g * g.adjoint();
  m = 0.5 * (m + m.adjoint().eval());
  m /= m.trace().real();
  return DensityMatrix::from_matrix(std::move(m));
}

DensityMatrix random_pure_density(int dim, RngStream& rng) {
  ComplexVector c = random_complex_vector(dim, rng);
  c /= c.norm();
  return density_from_pure(PureState(std::move(c)));
}

ObservableSpec random_observable(int dim, int n_classes, RngStream& rng) {
  n_classes = std::max(1, std::min(n_classes, dim));
  // Random surjective assignment of indices to classes.
  std::vector<int> assignment(dim);
  for (int i = 0; i < n_classes; ++i) assignment[i] = i;
  for (int i = n_classes; i < dim; ++i) {
    assignment[i] = static_cast<int>(rng.next_double() * n_classes);
  }
  ObservableSpec spec;
  spec.eigenvalues.resize(dim);
  for (int i = 0; i < dim; ++i) {
    // Classes sit on a unit grid with a small common offset.
    spec.eigenvalues[i] = static_cast<double>(assignment[i]);
  }
  const double offset = rng.next_double();
  spec.eigenvalues.array() += offset;
  return spec;
}

DiscreteModel random_model(const ObservableSpec& spec, const std::vector<DegeneracyClass>& classes,
                           int n_outcomes, RngStream& rng) {
  const int d = spec.dim();
  DiscreteModel model;
  model.outcomes.clear();
  for (int I = 0; I < n_outcomes; ++I) model.outcomes.push_back("o" + std::to_string(I));
  model.lambda.resize(n_outcomes, d);

  for (int attempt = 0; attempt < 64; ++attempt) {
    for (const auto& cls : classes) {
      ComplexVector col = random_complex_vector(n_outcomes, rng);
      col /= col.norm();
      for (int i : cls.members) model.lambda.col(i) = col;
    }
    if (validate_model(model, classes).ok()) return model;
  }
  throw ValidationError("random_model: failed to draw a distinguishable model");
}

FuzzCase random_case(int max_dim, int max_outcomes, RngStream& rng) {
  const int dim = 2 + static_cast<int>(rng.next_double() * (max_dim - 1));
  const bool degenerate = dim > 2 && rng.next_double() < 0.5;
  const int n_classes = degenerate ? 2 + static_cast<int>(rng.next_double() * (dim - 2)) : dim;
  const int n_outcomes = 2 + static_cast<int>(rng.next_double() * (max_outcomes - 1));

  FuzzCase c;
  c.observable = random_observable(std::min(dim, max_dim), n_classes, rng);
  c.classes = build_degeneracy_classes(c.observable);
  c.model = random_model(c.observable, c.classes, std::min(n_outcomes, max_outcomes), rng);
  c.state = rng.next_double() < 0.5 ? random_density(c.observable.dim(), rng)
                                    : random_pure_density(c.observable.dim(), rng);
  return c;
}

}  // namespace qnd::fuzz
