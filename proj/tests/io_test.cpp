// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qnd/commands.hpp"
#include "qnd/fixtures.hpp"
#include "qnd/io.hpp"
#include "test_util.hpp"

using namespace qnd;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("qnd_io_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("format_g17 round-trips doubles exactly") {
  RngStream rng(601, 0);
  for (int k = 0; k < 200; ++k) {
    const double x = (rng.next_double() - 0.5) * std::pow(10.0, rng.next_double() * 20 - 10);
    const double back = std::strtod(format_g17(x).c_str(), nullptr);
    CHECK(back == x);
  }
}

TEST_CASE("discrete model JSON round-trips") {
  const auto spec = fixtures::qubit_observable();
  const ModelVariant model = fixtures::two_outcome_qubit_model();
  const Json j = model_to_json(spec, model);
  CHECK(j.at("type") == "discrete");
  CHECK(j.at("dim") == 2);

  const auto [spec2, model2] = model_from_json(j);
  CHECK(spec2.dim() == 2);
  CHECK(spec2.eigenvalues[0] == doctest::Approx(1.0));
  const auto& dm = std::get<DiscreteModel>(model2);
  CHECK(dm.outcomes == std::vector<std::string>{"A", "B"});
  CHECK((dm.lambda - fixtures::two_outcome_qubit_model().lambda).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gaussian model JSON round-trips") {
  const auto gm = fixtures::gaussian_qubit(4.0);
  const Json j = model_to_json(gm.spec, ModelVariant(gm));
  CHECK(j.at("type") == "gaussian");
  const auto [spec2, model2] = model_from_json(j);
  CHECK(std::get<GaussianModel>(model2).delta == doctest::Approx(4.0));
  CHECK(spec2.eigenvalues[1] == doctest::Approx(-1.0));
}

TEST_CASE("lambda entries accept bare numbers and re/im objects") {
  const Json j = {
      {"type", "discrete"},
      {"dim", 2},
      {"eigenvalues", {1.0, -1.0}},
      {"outcomes", {"A", "B"}},
      {"lambda",
       {{0.6, Json{{"re", 0.0}, {"im", 0.8}}}, {Json{{"re", 0.8}}, 0.6}}},
  };
  const auto [spec, model] = model_from_json(j);
  const auto& dm = std::get<DiscreteModel>(model);
  CHECK(dm.lambda(0, 1) == Complex(0.0, 0.8));
  CHECK(dm.lambda(1, 0) == Complex(0.8, 0.0));
}

TEST_CASE("state blocks parse all three representations") {
  const auto pure_state = state_from_json(Json{{"pure", {0.6, 0.8}}});
  CHECK(pure_state.entry(0, 0).real() == doctest::Approx(0.36).epsilon(1e-13));

  const auto diag_state = state_from_json(Json{{"diagonal", {0.25, 0.75}}});
  CHECK(diag_state.entry(1, 1).real() == doctest::Approx(0.75));

  Json matrix_json = state_to_json(fixtures::qubit_state_03_07());
  const auto matrix_state = state_from_json(matrix_json);
  CHECK(trace_distance(matrix_state, fixtures::qubit_state_03_07()) <= 1e-12);

  CHECK_THROWS_AS(state_from_json(Json{{"pure", {1.0, 1.0}}}), ValidationError);
  CHECK_THROWS_AS(state_from_json(Json::object()), ValidationError);
}

TEST_CASE("run config requires a seed and echoes through JSON") {
  Json j = run_config_to_json(fixtures::demo_qubit(77, "out/x"));
  const RunConfig cfg = run_config_from_json(j);
  CHECK(cfg.seed == 77);
  CHECK(cfg.n_trajectories == 5000);
  CHECK(cfg.record.stride == 300);
  CHECK(cfg.initial_state.has_value());

  j.erase("seed");
  CHECK_THROWS_AS(run_config_from_json(j), ValidationError);
}

TEST_CASE("config dimension mismatches are rejected") {
  Json j = run_config_to_json(fixtures::demo_qubit(77, "out/x"));
  j["initial_state"] = Json{{"diagonal", {0.2, 0.3, 0.5}}};
  CHECK_THROWS_AS(run_config_from_json(j), ValidationError);
}

TEST_CASE("trajectory CSV is stable and carries the documented columns") {
  const auto dir = temp_dir("csv");
  RunConfig cfg = fixtures::demo_qubit(5, dir.string());
  cfg.n_trajectories = 4;
  cfg.n_steps = 6;
  cfg.record.stride = 1;

  const auto records = run_ensemble(cfg.trajectory_config(), cfg.n_trajectories);
  const auto path_a = (dir / "a.csv").string();
  const auto path_b = (dir / "b.csv").string();
  write_trajectory_csv(path_a, records, cfg.model);
  write_trajectory_csv(path_b, records, cfg.model);

  const std::string a = read_file(path_a);
  CHECK(a == read_file(path_b));

  std::istringstream lines(a);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "traj,step,outcome,log_p,theta_bar_0,theta_bar_1,purity,converged_class");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 4 * 6);
  CHECK(a.find("A") != std::string::npos);  // outcome labels, not indices

  std::filesystem::remove_all(dir);
}

TEST_CASE("manifest round-trips through load_run_config") {
  const auto dir = temp_dir("manifest");
  RunConfig cfg = fixtures::demo_gaussian(4.0, 11, dir.string());
  cfg.n_trajectories = 3;
  cfg.free_evolution = FreeEvolution{{0.1, -0.2}, 0.7, {0.5, 1.0}};
  const auto path = (dir / "manifest.json").string();
  write_manifest(path, cfg);

  const RunConfig back = load_run_config(path);
  CHECK(back.seed == cfg.seed);
  CHECK(back.n_steps == cfg.n_steps);
  CHECK(std::get<GaussianModel>(back.model).delta == doctest::Approx(4.0));
  REQUIRE(back.free_evolution.has_value());
  CHECK(back.free_evolution->phases == cfg.free_evolution->phases);
  CHECK(back.free_evolution->tau_schedule == cfg.free_evolution->tau_schedule);

  std::filesystem::remove_all(dir);
}

TEST_CASE("histogram CSV format") {
  const auto dir = temp_dir("hist");
  Histogram h;
  h.edges = {0.0, 0.5, 1.0};
  h.counts = {3, 4};
  const auto path = (dir / "h.csv").string();
  write_histogram_csv(path, h);
  const std::string text = read_file(path);
  CHECK(text == "bin_left,bin_right,count\n0,0.5,3\n0.5,1,4\n");
  std::filesystem::remove_all(dir);
}

TEST_CASE("verification suite serialization carries every field") {
  VerificationSuite suite;
  suite.checks.push_back({"demo_check", "a property", 1e-13, 1e-12, 5, true});
  const Json j = verification_to_json(suite);
  CHECK(j.at("all_pass") == true);
  CHECK(j.at("checks")[0].at("id") == "demo_check");
  CHECK(j.at("checks")[0].at("cases") == 5);
}
