// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <initializer_list>

#include "qnd/hilbert.hpp"

namespace qnd::testutil {

inline ComplexVector cvec(std::initializer_list<Complex> values) {
  ComplexVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const auto& z : values) v[i++] = z;
  return v;
}

inline RealVector rvec(std::initializer_list<double> values) {
  RealVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline DensityMatrix pure(std::initializer_list<Complex> amplitudes) {
  return density_from_pure(PureState(cvec(amplitudes)));
}

}  // namespace qnd::testutil
