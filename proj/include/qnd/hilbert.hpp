// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qnd/errors.hpp"

namespace qnd {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

namespace tol {
inline constexpr double kHermitian = 1e-12;       // entrywise
inline constexpr double kTrace = 1e-12;
inline constexpr double kEigenvalueFloor = -1e-10;
inline constexpr double kPurity = 1e-12;
inline constexpr double kIdempotent = 1e-12;
inline constexpr double kNormalization = 1e-12;
inline constexpr double kZeroWeight = 1e-12;
}  // namespace tol

bool is_hermitian(const ComplexMatrix& m, double tolerance = tol::kHermitian);

// Smallest eigenvalue of a Hermitian matrix. Closed form for 1x1/2x2,
// Eigen's self-adjoint solver otherwise.
double min_hermitian_eigenvalue(const ComplexMatrix& m);

// Normalized state vector |psi> = sum_i c_i |q_i> in the observable
// eigenbasis.
class PureState {
public:
  explicit PureState(ComplexVector amplitudes);

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  const ComplexVector& amplitudes() const { return amplitudes_; }

private:
  ComplexVector amplitudes_;
};

// Hermitian idempotent with integer trace. Measurement and degeneracy-class
// projectors are diagonal 0/1 matrices in the eigenbasis; the general
// constructor accepts any valid projector.
class Projector {
public:
  explicit Projector(ComplexMatrix entries);

  // Diagonal projector with ones at the given basis indices.
  static Projector onto_indices(int dim, const std::vector<int>& indices);

  int dim() const { return static_cast<int>(entries_.rows()); }
  int rank() const { return rank_; }
  const ComplexMatrix& matrix() const { return entries_; }

private:
  ComplexMatrix entries_;
  int rank_;
};

// d x d complex, Hermitian, unit-trace, positive semi-definite matrix.
// Immutable after construction.
class DensityMatrix {
public:
  // Validates all invariants. With repair=true, eigenvalues in
  // [kEigenvalueFloor, 0) are clamped to zero and the trace rescaled;
  // anything below the floor still fails.
  static DensityMatrix from_matrix(ComplexMatrix m, bool repair = false);

  static DensityMatrix pure(const PureState& psi);
  static DensityMatrix diagonal(const RealVector& weights);
  static DensityMatrix maximally_mixed(int dim);

  // Fast path for matrices produced by maps that preserve the invariants
  // structurally (the measurement map is a congruence by a diagonal
  // operator). No validation.
  static DensityMatrix unchecked(ComplexMatrix m);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const ComplexMatrix& matrix() const { return entries_; }
  Complex entry(int i, int j) const { return entries_(i, j); }
  double diagonal_entry(int i) const { return entries_(i, i).real(); }
  RealVector diagonal() const { return entries_.diagonal().real(); }

private:
  explicit DensityMatrix(ComplexMatrix m) : entries_(std::move(m)) {}
  ComplexMatrix entries_;
};

// theta = |psi><psi|; rank-1, trace 1, purity 1.
DensityMatrix density_from_pure(const PureState& psi);

// Tr theta^2, in (0, 1]; 1 iff pure.
double purity(const DensityMatrix& theta);

// (1/2) sum of singular values of (a - b); a metric on states, in [0, 1].
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

struct ProjectedBlock {
  // Pi theta Pi / Tr(Pi theta); absent when the weight is below
  // tol::kZeroWeight (zero-weight block).
  std::optional<DensityMatrix> state;
  // Tr(Pi theta), always defined, in [0, 1].
  double weight = 0.0;
};

// State reduction onto the range of Pi with its overlap weight.
ProjectedBlock project_block(const DensityMatrix& theta, const Projector& pi);

}  // namespace qnd
