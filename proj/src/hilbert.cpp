// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#include "qnd/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qnd {

bool is_hermitian(const ComplexMatrix& m, double tolerance) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tolerance) return false;
    }
  }
  return true;
}

double min_hermitian_eigenvalue(const ComplexMatrix& m) {
  const auto n = m.rows();
  if (n == 1) return m(0, 0).real();
  if (n == 2) {
    const double a = m(0, 0).real();
    const double b = m(1, 1).real();
    const double off = std::abs(m(0, 1));
    const double half_gap = 0.5 * (a - b);
    return 0.5 * (a + b) - std::sqrt(half_gap * half_gap + off * off);
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

PureState::PureState(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) throw ValidationError("PureState: empty amplitude vector");
  const double norm2 = amplitudes_.squaredNorm();
  if (std::abs(norm2 - 1.0) > tol::kNormalization) {
    std::ostringstream os;
    os << "PureState: amplitudes not normalized, sum |c_i|^2 = " << norm2;
    throw ValidationError(os.str());
  }
}

Projector::Projector(ComplexMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw ValidationError("Projector: matrix must be square and non-empty");
  }
  if (!is_hermitian(entries_, tol::kHermitian)) {
    throw ValidationError("Projector: matrix not Hermitian");
  }
  const double idem = (entries_ * entries_ - entries_).cwiseAbs().maxCoeff();
  if (idem > tol::kIdempotent) {
    std::ostringstream os;
    os << "Projector: not idempotent, max |Pi^2 - Pi| = " << idem;
    throw ValidationError(os.str());
  }
  const double tr = entries_.trace().real();
  rank_ = static_cast<int>(std::lround(tr));
  if (rank_ < 1 || std::abs(tr - rank_) > tol::kIdempotent) {
    throw ValidationError("Projector: trace must be a positive integer");
  }
}

Projector Projector::onto_indices(int dim, const std::vector<int>& indices) {
  if (indices.empty()) throw ValidationError("Projector: index set must be non-empty");
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (int i : indices) {
    if (i < 0 || i >= dim) throw ValidationError("Projector: index out of range");
    m(i, i) = 1.0;
  }
  return Projector(std::move(m));
}

DensityMatrix DensityMatrix::from_matrix(ComplexMatrix m, bool repair) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ValidationError("DensityMatrix: matrix must be square and non-empty");
  }
  if (!is_hermitian(m, tol::kHermitian)) {
    throw ValidationError("DensityMatrix: matrix not Hermitian to 1e-12");
  }
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > tol::kTrace) {
    std::ostringstream os;
    os << "DensityMatrix: trace " << tr << " differs from 1 beyond 1e-12";
    throw ValidationError(os.str());
  }

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
  const RealVector evals = solver.eigenvalues();
  const double min_eval = evals.minCoeff();
  if (min_eval < tol::kEigenvalueFloor) {
    std::ostringstream os;
    os << "DensityMatrix: not positive semi-definite, min eigenvalue " << min_eval;
    throw ValidationError(os.str());
  }
  if (repair && min_eval < 0.0) {
    RealVector clamped = evals.cwiseMax(0.0);
    clamped /= clamped.sum();
    m = solver.eigenvectors() * clamped.asDiagonal() * solver.eigenvectors().adjoint();
    m = 0.5 * (m + m.adjoint().eval());
  }

  const double pur = m.squaredNorm();  // Tr theta^2 for Hermitian theta
  if (pur <= 0.0 || pur > 1.0 + tol::kPurity) {
    std::ostringstream os;
    os << "DensityMatrix: purity " << pur << " outside (0, 1]";
    throw ValidationError(os.str());
  }
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::pure(const PureState& psi) {
  ComplexMatrix m = psi.amplitudes() * psi.amplitudes().adjoint();
  m = 0.5 * (m + m.adjoint().eval());
  m /= m.trace().real();
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::diagonal(const RealVector& weights) {
  if (weights.size() == 0) throw ValidationError("DensityMatrix: empty weight vector");
  if (weights.minCoeff() < 0.0) {
    throw ValidationError("DensityMatrix: diagonal weights must be non-negative");
  }
  if (std::abs(weights.sum() - 1.0) > tol::kTrace) {
    throw ValidationError("DensityMatrix: diagonal weights must sum to 1");
  }
  ComplexMatrix m = ComplexMatrix::Zero(weights.size(), weights.size());
  m.diagonal() = weights.cast<Complex>();
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  if (dim < 1) throw ValidationError("DensityMatrix: dim must be positive");
  return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::unchecked(ComplexMatrix m) { return DensityMatrix(std::move(m)); }

DensityMatrix density_from_pure(const PureState& psi) { return DensityMatrix::pure(psi); }

double purity(const DensityMatrix& theta) { return theta.matrix().squaredNorm(); }

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) {
    throw ValidationError("trace_distance: dimension mismatch");
  }
  const ComplexMatrix diff = a.matrix() - b.matrix();
  // The difference of Hermitian matrices is Hermitian; singular values are
  // absolute eigenvalues.
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(diff, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

ProjectedBlock project_block(const DensityMatrix& theta, const Projector& pi) {
  if (theta.dim() != pi.dim()) {
    throw ValidationError("project_block: dimension mismatch");
  }
  ProjectedBlock out;
  out.weight = (pi.matrix() * theta.matrix()).trace().real();
  if (out.weight <= tol::kZeroWeight) return out;

  ComplexMatrix m = pi.matrix() * theta.matrix() * pi.matrix();
  m = 0.5 * (m + m.adjoint().eval());
  m /= m.trace().real();
  out.state = DensityMatrix::unchecked(std::move(m));
  return out;
}

}  // namespace qnd
