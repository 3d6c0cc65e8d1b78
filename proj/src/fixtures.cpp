// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#include "qnd/fixtures.hpp"

#include <cmath>

namespace qnd::fixtures {

ObservableSpec qubit_observable() {
  ObservableSpec spec;
  spec.eigenvalues = (RealVector(2) << 1.0, -1.0).finished();
  return spec;
}

DiscreteModel two_outcome_qubit_model(double s) {
  DiscreteModel m;
  m.outcomes = {"A", "B"};
  m.lambda.resize(2, 2);
  m.lambda << std::sqrt(s), std::sqrt(1.0 - s),
              std::sqrt(1.0 - s), std::sqrt(s);
  return m;
}

ObservableSpec three_level_degenerate_observable() {
  ObservableSpec spec;
  spec.eigenvalues = (RealVector(3) << 1.0, 1.0, -1.0).finished();
  return spec;
}

DiscreteModel three_level_degenerate_model() {
  DiscreteModel m;
  m.outcomes = {"A", "B"};
  m.lambda.resize(2, 3);
  m.lambda << std::sqrt(0.8), std::sqrt(0.8), std::sqrt(0.2),
              std::sqrt(0.2), std::sqrt(0.2), std::sqrt(0.8);
  return m;
}

GaussianModel gaussian_qubit(double delta) { return GaussianModel{qubit_observable(), delta}; }

DensityMatrix qubit_state_03_07() {
  ComplexVector c(2);
  c << std::sqrt(0.3), std::sqrt(0.7);
  return density_from_pure(PureState(std::move(c)));
}

DensityMatrix qubit_plus_state() {
  ComplexVector c(2);
  c << std::sqrt(0.5), std::sqrt(0.5);
  return density_from_pure(PureState(std::move(c)));
}

RunConfig demo_qubit(std::uint64_t seed, const std::string& out_dir) {
  RunConfig cfg;
  cfg.mode = "stats";
  cfg.observable = qubit_observable();
  cfg.model = two_outcome_qubit_model();
  cfg.initial_state = qubit_state_03_07();
  cfg.n_steps = 300;
  cfg.n_trajectories = 5000;
  cfg.seed = seed;
  cfg.out_dir = out_dir;
  cfg.record.stride = 300;
  return cfg;
}

RunConfig demo_degenerate(std::uint64_t seed, const std::string& out_dir) {
  RunConfig cfg;
  cfg.mode = "stats";
  cfg.observable = three_level_degenerate_observable();
  cfg.model = three_level_degenerate_model();
  cfg.initial_state = DensityMatrix::maximally_mixed(3);
  cfg.n_steps = 400;
  cfg.n_trajectories = 3000;
  cfg.seed = seed;
  cfg.out_dir = out_dir;
  cfg.record.stride = 400;
  return cfg;
}

RunConfig demo_gaussian(double delta, std::uint64_t seed, const std::string& out_dir) {
  RunConfig cfg;
  cfg.mode = "stats";
  cfg.observable = qubit_observable();
  cfg.model = gaussian_qubit(delta);
  cfg.initial_state = DensityMatrix::diagonal((RealVector(2) << 0.3, 0.7).finished());
  cfg.n_steps = 500;
  cfg.n_trajectories = 2000;
  cfg.seed = seed;
  cfg.out_dir = out_dir;
  cfg.record.stride = 500;
  return cfg;
}

}  // namespace qnd::fixtures
