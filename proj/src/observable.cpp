// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#include "qnd/observable.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qnd {

std::vector<DegeneracyClass> build_degeneracy_classes(const ObservableSpec& spec) {
  const int d = spec.dim();
  if (d < 1) throw ValidationError("ObservableSpec: empty eigenvalue list");
  for (int i = 0; i < d; ++i) {
    if (!std::isfinite(spec.eigenvalues[i])) {
      throw ValidationError("ObservableSpec: eigenvalues must be finite");
    }
  }
  if (spec.degeneracy_tolerance < 0.0) {
    throw ValidationError("ObservableSpec: degeneracy tolerance must be >= 0");
  }

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return spec.eigenvalues[a] < spec.eigenvalues[b]; });

  // Group along the sorted chain; a gap above tolerance starts a new class.
  std::vector<std::vector<int>> groups;
  for (int k = 0; k < d; ++k) {
    const int idx = order[k];
    if (k == 0 || spec.eigenvalues[idx] - spec.eigenvalues[order[k - 1]] >
                      spec.degeneracy_tolerance) {
      groups.emplace_back();
    }
    groups.back().push_back(idx);
  }

  std::vector<DegeneracyClass> classes;
  classes.reserve(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto& members = groups[g];
    const double q_min = spec.eigenvalues[members.front()];
    const double q_max = spec.eigenvalues[members.back()];
    if (q_max - q_min > spec.degeneracy_tolerance) {
      std::ostringstream os;
      os << "ObservableSpec: ambiguous degeneracy chain, eigenvalues span ["
         << q_min << ", " << q_max << "] with pairwise gaps within tolerance "
         << spec.degeneracy_tolerance << " but overall spread above it";
      throw ValidationError(os.str());
    }
    std::sort(members.begin(), members.end());
    DegeneracyClass cls{static_cast<int>(g),
                        members,
                        0.5 * (q_min + q_max),
                        static_cast<int>(members.size()),
                        Projector::onto_indices(d, members)};
    classes.push_back(std::move(cls));
  }
  return classes;
}

RealVector class_weights(const DensityMatrix& theta, const std::vector<DegeneracyClass>& classes) {
  RealVector w(static_cast<Eigen::Index>(classes.size()));
  for (std::size_t k = 0; k < classes.size(); ++k) {
    double acc = 0.0;
    for (int i : classes[k].members) acc += theta.diagonal_entry(i);
    w[static_cast<Eigen::Index>(k)] = acc;
  }
  return w;
}

int class_of_index(const std::vector<DegeneracyClass>& classes, int basis_index) {
  for (const auto& cls : classes) {
    for (int i : cls.members) {
      if (i == basis_index) return cls.label;
    }
  }
  throw ValidationError("class_of_index: basis index not covered by classes");
}

}  // namespace qnd
