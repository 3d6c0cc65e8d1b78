// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "qnd/discrete_model.hpp"
#include "qnd/observable.hpp"
#include "qnd/rng.hpp"

namespace qnd::fuzz {

// Randomized but reproducible states and models for the exact-identity
// suites. Every generator is a pure function of the stream.

// Mixed state G G^dag / Tr with complex Gaussian G.
DensityMatrix random_density(int dim, RngStream& rng);

// Rank-1 state from a random normalized amplitude vector.
DensityMatrix random_pure_density(int dim, RngStream& rng);

// Observable with dim indices split into the given number of degeneracy
// classes (class sizes random); distinct class eigenvalues are separated by
// at least 0.5.
ObservableSpec random_observable(int dim, int n_classes, RngStream& rng);

// Valid model for the classes: per-class random complex columns, normalized
// per basis index; re-drawn until distinguishability holds.
DiscreteModel random_model(const ObservableSpec& spec, const std::vector<DegeneracyClass>& classes,
                           int n_outcomes, RngStream& rng);

struct FuzzCase {
  ObservableSpec observable;
  std::vector<DegeneracyClass> classes;
  DiscreteModel model;
  DensityMatrix state = DensityMatrix::maximally_mixed(1);
};

// Complete random case: dim <= max_dim, outcomes <= max_outcomes, mixed or
// pure state, degenerate classes with probability ~1/2.
FuzzCase random_case(int max_dim, int max_outcomes, RngStream& rng);

}  // namespace qnd::fuzz
