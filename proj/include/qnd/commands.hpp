// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "qnd/io.hpp"

namespace qnd {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitCheckFailure = 1;       // a verification or statistical gate failed
inline constexpr int kExitValidationFailure = 2;  // bad config or inputs
inline constexpr int kExitNumericalFailure = 3;   // numerical abort during a run

// Writes trajectories.csv and manifest.json under cfg.out_dir.
int cmd_simulate(const RunConfig& cfg);

// Runs the exact-enumeration verification suite against the configured
// model (the Gaussian model is checked through its binned surrogate plus
// quadrature) and writes verification.json. Exit 0 iff every check passes.
int cmd_verify(const RunConfig& cfg);

// Runs the ensemble and writes born.json, luders.json and, for Gaussian
// models, ym_repeated.json / ym_ensemble.json with histograms. Exit 0 iff
// all statistical gates pass.
int cmd_stats(const RunConfig& cfg);

// Runs the three bundled fixtures end to end under cfg.out_dir.
int cmd_demo(const RunConfig& cfg);

// Dispatch on cfg.mode.
int run_command(const RunConfig& cfg);

// The exact suite behind cmd_verify, reusable in-process.
VerificationSuite run_verification_suite(const ObservableSpec& spec, const ModelVariant& model,
                                         std::uint64_t seed, int n_state_cases = 32);

}  // namespace qnd
