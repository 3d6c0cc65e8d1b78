// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "qnd/discrete_model.hpp"
#include "qnd/gaussian_model.hpp"
#include "qnd/hilbert.hpp"
#include "qnd/observable.hpp"

namespace qnd {

// Free evolution between measurements: the system Hamiltonian commutes with
// the observable, so it is given as one phase per eigenbasis index.
// Off-diagonals pick up e^{i(h_i - h_j) tau}; diagonals are untouched.
struct FreeEvolution {
  std::vector<double> phases;        // radians per basis index
  double tau = 1.0;
  std::vector<double> tau_schedule;  // optional per-step; cycled, overrides tau
};

using ModelVariant = std::variant<DiscreteModel, GaussianModel>;

struct TrajectoryConfig {
  ObservableSpec observable;
  ModelVariant model;
  DensityMatrix initial_state;
  int n_steps = 1;
  std::uint64_t seed = 0;
  std::uint64_t trajectory_index = 0;
  int record_stride = 1;
  double convergence_epsilon = 1e-6;
  double luders_delta = 1e-5;
  std::optional<FreeEvolution> free_evolution;
  bool record_offdiag = false;
  double psd_abort_tolerance = 1e-8;
  // Optional per-step measurement schedule (cycled); requires a discrete
  // base model. Empty means the same model at every step.
  std::vector<DiscreteModel> model_schedule;
};

struct StepRecord {
  int step = 0;               // 1-based measurement index
  int outcome_index = -1;     // discrete models; -1 for continuous
  double outcome_value = 0.0; // continuous outcome p; NaN for discrete
  double log_conditional = 0.0;
  RealVector class_weights;   // Tr(theta_n Pi_ibar)
  double purity = 0.0;
  std::optional<RealMatrix> offdiag_magnitudes;  // |theta_n^{ij}|
};

struct TrajectoryRecord {
  // config echo
  std::uint64_t seed = 0;
  std::uint64_t trajectory_index = 0;
  int n_steps = 0;
  int record_stride = 1;
  double convergence_epsilon = 1e-6;

  // full outcome sequence (independent of the record stride)
  std::vector<int> outcome_indices;    // discrete
  std::vector<double> outcome_values;  // continuous

  RealVector initial_class_weights;
  std::vector<StepRecord> steps;       // diagnostics at the record stride
  DensityMatrix final_state = DensityMatrix::maximally_mixed(1);
  double log_joint_probability = 0.0;  // sum of step log conditionals

  std::optional<int> converged_class;
  std::optional<int> converged_at;     // step 0 = already converged initially
  double luders_distance = 0.0;        // NaN when not converged
  double max_block_drift = 0.0;        // NaN when tracking disabled
};

// Runs one single-copy repeated-measurement trajectory. Deterministic
// function of (seed, trajectory_index).
TrajectoryRecord run_trajectory(const TrajectoryConfig& cfg);

// Runs n_trajectories with indices base.trajectory_index + 0..n-1 on
// independent counter-based streams. `threads` 0 picks a default; the
// QND_WALK_THREADS environment variable caps it. The result is a
// deterministic function of the configs alone, independent of thread count
// and execution order.
std::vector<TrajectoryRecord> run_ensemble(const TrajectoryConfig& base, int n_trajectories,
                                           int threads = 0);

// Rebuilds theta_n in closed form from the accumulated per-class products
// of operator eigenvalues over the recorded outcome sequence, normalized at
// the end (log-domain). Requires a discrete model with the constant
// schedule and no free evolution; must match the stepwise final state.
DensityMatrix product_form_state(const TrajectoryRecord& record, const DensityMatrix& theta0,
                                 const DiscreteModel& model,
                                 const std::vector<DegeneracyClass>& classes);

// Exact enumeration of the joint outcome-sequence distribution for n steps.
// Sequence s_1..s_n is encoded as sum_j s_j * K^(j-1). Refuses when
// K^n > 10^6.
struct JointEnumeration {
  int n_steps = 0;
  int n_outcomes = 0;
  std::vector<double> probabilities;

  double total() const;
  std::vector<int> decode(std::size_t index) const;
  double probability_of(const std::vector<int>& sequence) const;
};

JointEnumeration joint_probability_exact(const DiscreteModel& model,
                                         const std::vector<DegeneracyClass>& classes,
                                         const DensityMatrix& theta0, int n_steps);

DensityMatrix apply_free_evolution(const DensityMatrix& theta, const std::vector<double>& phases,
                                   double tau);

struct ConvergenceInfo {
  int class_label = 0;
  int step = 0;             // earliest step with the class weight >= 1-eps, sustained
  double luders_distance = 0.0;  // final state vs the projected initial state
};

// Re-derives convergence from the recorded class weights (initial state
// counts as step 0). The granularity is the record stride; run_trajectory
// itself tracks every step online and fills the record's converged fields.
std::optional<ConvergenceInfo> detect_convergence(const TrajectoryRecord& record,
                                                  const DensityMatrix& theta0,
                                                  const std::vector<DegeneracyClass>& classes,
                                                  double epsilon);

}  // namespace qnd
