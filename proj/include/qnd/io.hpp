// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qnd/martingale.hpp"
#include "qnd/stats.hpp"
#include "qnd/trajectory.hpp"

namespace qnd {

using Json = nlohmann::json;

// Doubles printed with 17 significant digits round-trip exactly.
std::string format_g17(double value);

// ---------------------------------------------------------------------------
// Model interchange format
//
// Discrete:
//   { "type": "discrete", "dim": d, "eigenvalues": [..],
//     "degeneracy_tolerance": t, "outcomes": ["A", ..],
//     "lambda": [ [ {"re":..,"im":..}, .. ], .. ] }   // row = outcome
// Gaussian:
//   { "type": "gaussian", "delta": d, "eigenvalues": [..],
//     "degeneracy_tolerance": t }
// Complex entries also accept a bare number (imaginary part 0).
// ---------------------------------------------------------------------------
Json model_to_json(const ObservableSpec& spec, const ModelVariant& model);
std::pair<ObservableSpec, ModelVariant> model_from_json(const Json& j);

// Initial-state block: {"pure": [amplitudes]}, {"diagonal": [weights]} or
// {"matrix": [[entries]]}.
Json state_to_json(const DensityMatrix& theta);
DensityMatrix state_from_json(const Json& j);

// ---------------------------------------------------------------------------
// Run configuration document (also the replay manifest)
// ---------------------------------------------------------------------------
struct RecordOptions {
  int stride = 1;
  bool offdiag = false;
};

struct RunConfig {
  std::string mode = "simulate";  // simulate | verify | stats | demo
  ObservableSpec observable;
  ModelVariant model;
  std::optional<DensityMatrix> initial_state;
  int n_steps = 1;
  int n_trajectories = 1;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  RecordOptions record;
  std::optional<FreeEvolution> free_evolution;
  double convergence_epsilon = 1e-6;
  double luders_delta = 1e-5;
  double alpha = 0.01;
  double unconverged_cap = 0.01;
  int ym_window = 0;  // 0 means n_steps

  TrajectoryConfig trajectory_config() const;  // requires initial_state
};

RunConfig run_config_from_json(const Json& j);
Json run_config_to_json(const RunConfig& cfg);
RunConfig load_run_config(const std::string& path);

// ---------------------------------------------------------------------------
// Output files
// ---------------------------------------------------------------------------

// Consolidated trajectory CSV:
//   traj,step,outcome,log_p,theta_bar_0..K-1,purity,converged_class
// one row per recorded step, trajectories in index order, 17 significant
// digits throughout. The outcome column holds the label for discrete models
// and the numeric outcome for continuous ones.
void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRecord>& records,
                          const ModelVariant& model);

void write_manifest(const std::string& path, const RunConfig& cfg);

// bin_left,bin_right,count
void write_histogram_csv(const std::string& path, const Histogram& histogram);

void write_json_file(const std::string& path, const Json& j);

// ---------------------------------------------------------------------------
// Verification / statistics reports
// ---------------------------------------------------------------------------
struct VerificationCheck {
  std::string id;        // stable machine name
  std::string property;  // the identity being checked, spelled out
  double magnitude = 0.0;
  double tolerance = 0.0;
  long cases = 0;
  bool pass = false;
  bool skipped = false;  // recorded, never silent; a skipped check cannot pass
};

struct VerificationSuite {
  std::vector<VerificationCheck> checks;
  bool all_pass() const;
};

Json verification_to_json(const VerificationSuite& suite);
Json born_report_to_json(const BornTestReport& report);
Json luders_report_to_json(const std::vector<LudersClassDistance>& report, double gate);
Json ym_report_to_json(const YmCompareReport& report);

}  // namespace qnd
