// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "qnd/hilbert.hpp"

namespace qnd {

// Measured observable: its eigenvalues q_i listed in the fixed eigenbasis
// order shared by every matrix in the project.
struct ObservableSpec {
  RealVector eigenvalues;
  double degeneracy_tolerance = 1e-9;

  int dim() const { return static_cast<int>(eigenvalues.size()); }
};

// Maximal set of basis indices sharing one observable eigenvalue (up to the
// degeneracy tolerance). Non-degenerate eigenvalues form classes of
// dimension 1.
struct DegeneracyClass {
  int label = 0;                // position in the ascending-eigenvalue order
  std::vector<int> members;     // basis indices
  double eigenvalue = 0.0;      // q of the class
  int dimension = 0;            // number of members
  Projector projector;          // diagonal 0/1 in the eigenbasis
};

// Partitions {0..d-1} into degeneracy classes, sorted by class eigenvalue
// ascending. Throws ValidationError on a non-transitive near-degeneracy
// chain (|q_a-q_b| <= tol and |q_b-q_c| <= tol but |q_a-q_c| > tol).
std::vector<DegeneracyClass> build_degeneracy_classes(const ObservableSpec& spec);

// Tr(theta Pi_ibar) for every class; sums to Tr theta.
RealVector class_weights(const DensityMatrix& theta, const std::vector<DegeneracyClass>& classes);

// Class label owning a basis index.
int class_of_index(const std::vector<DegeneracyClass>& classes, int basis_index);

}  // namespace qnd
