// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qnd/commands.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> steps;
  std::optional<int> trajectories;
  std::optional<std::string> out;
};

void apply(const Overrides& ov, qnd::RunConfig& cfg) {
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.steps) cfg.n_steps = *ov.steps;
  if (ov.trajectories) cfg.n_trajectories = *ov.trajectories;
  if (ov.out) cfg.out_dir = *ov.out;
}

void add_overrides(CLI::App* sub, Overrides& ov) {
  sub->add_option("--seed", ov.seed, "override the config seed");
  sub->add_option("--steps", ov.steps, "override the number of measurement steps");
  sub->add_option("--trajectories", ov.trajectories, "override the trajectory count");
  sub->add_option("--out", ov.out, "override the output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qnd-walk: repeated QND measurement trajectories, verification and statistics"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;

  auto* simulate = app.add_subcommand("simulate", "run trajectories, write CSV + manifest");
  simulate->add_option("--config", config_path, "run configuration JSON")->required();
  add_overrides(simulate, ov);

  auto* verify = app.add_subcommand("verify", "exact-identity suite for the configured model");
  verify->add_option("--config", config_path, "run configuration JSON")->required();
  add_overrides(verify, ov);

  auto* stats = app.add_subcommand("stats", "ensemble statistics reports and gates");
  stats->add_option("--config", config_path, "run configuration JSON")->required();
  add_overrides(stats, ov);

  auto* demo = app.add_subcommand("demo", "run the bundled fixtures");
  demo->add_option("--seed", ov.seed, "demo seed (default 1)");
  demo->add_option("--out", ov.out, "demo output directory (default out/demo)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qnd::kExitValidationFailure;
  }

  try {
    if (demo->parsed()) {
      qnd::RunConfig cfg;
      cfg.mode = "demo";
      cfg.seed = ov.seed.value_or(1);
      cfg.out_dir = ov.out.value_or("out/demo");
      return qnd::cmd_demo(cfg);
    }

    qnd::RunConfig cfg = qnd::load_run_config(config_path);
    apply(ov, cfg);
    if (simulate->parsed()) cfg.mode = "simulate";
    if (verify->parsed()) cfg.mode = "verify";
    if (stats->parsed()) cfg.mode = "stats";
    return qnd::run_command(cfg);
  } catch (const qnd::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qnd::kExitValidationFailure;
  } catch (const qnd::NumericalError& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return qnd::kExitNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qnd::kExitNumericalFailure;
  }
}
