// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "qnd/io.hpp"

namespace qnd::fixtures {

// Qubit observable q = (+1, -1), non-degenerate.
ObservableSpec qubit_observable();

// Two-outcome qubit model: outcome A sees |lambda|^2 = (s, 1-s), outcome B
// the mirror image. s = 0.8 gives the mu = 0.8 workhorse model.
DiscreteModel two_outcome_qubit_model(double s = 0.8);

// Three-level observable q = (1, 1, -1): one two-dimensional degeneracy
// class and one singleton.
ObservableSpec three_level_degenerate_observable();
DiscreteModel three_level_degenerate_model();

GaussianModel gaussian_qubit(double delta);

// Pure qubit state with diagonal (0.3, 0.7) and off-diagonal sqrt(0.21).
DensityMatrix qubit_state_03_07();

// Equal superposition |+><+|.
DensityMatrix qubit_plus_state();

// Demo runs: (a) non-degenerate qubit collapse + Born statistics,
// (b) degenerate three-level observable with a mixed asymptotic block,
// (c) Gaussian qubit at the given width (weak and strong behave alike
// asymptotically).
RunConfig demo_qubit(std::uint64_t seed, const std::string& out_dir);
RunConfig demo_degenerate(std::uint64_t seed, const std::string& out_dir);
RunConfig demo_gaussian(double delta, std::uint64_t seed, const std::string& out_dir);

}  // namespace qnd::fixtures
