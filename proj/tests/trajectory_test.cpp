// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "qnd/fixtures.hpp"
#include "qnd/fuzz.hpp"
#include "qnd/martingale.hpp"
#include "qnd/trajectory.hpp"
#include "test_util.hpp"

using namespace qnd;
using testutil::pure;
using testutil::rvec;

namespace {

TrajectoryConfig qubit_config(DensityMatrix theta0, int steps, std::uint64_t seed) {
  return TrajectoryConfig{
      .observable = fixtures::qubit_observable(),
      .model = fixtures::two_outcome_qubit_model(),
      .initial_state = std::move(theta0),
      .n_steps = steps,
      .seed = seed,
  };
}

}  // namespace

TEST_CASE("an eigenstate stays put and counts as converged from step zero") {
  auto cfg = qubit_config(pure({1.0, 0.0}), 50, 42);
  const auto rec = run_trajectory(cfg);
  const auto classes = build_degeneracy_classes(cfg.observable);
  const int own_class = class_of_index(classes, 0);

  REQUIRE(rec.converged_class.has_value());
  CHECK(*rec.converged_class == own_class);
  CHECK(*rec.converged_at == 0);
  CHECK(trace_distance(rec.final_state, cfg.initial_state) <= 1e-12);
  for (const auto& sr : rec.steps) {
    CHECK(sr.class_weights[own_class] == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(rec.luders_distance <= 1e-12);
}

TEST_CASE("superposition trajectories collapse onto an eigenprojector") {
  auto cfg = qubit_config(fixtures::qubit_state_03_07(), 300, 7);
  cfg.record_stride = 300;
  const auto classes = build_degeneracy_classes(cfg.observable);
  for (std::uint64_t t = 0; t < 20; ++t) {
    cfg.trajectory_index = t;
    const auto rec = run_trajectory(cfg);
    REQUIRE(rec.converged_class.has_value());
    const auto& cls = classes[static_cast<std::size_t>(*rec.converged_class)];
    ComplexMatrix proj = cls.projector.matrix();
    CHECK(trace_distance(rec.final_state, DensityMatrix::from_matrix(proj)) <= 1e-6);
    CHECK(rec.luders_distance <= 1e-5);
  }
}

TEST_CASE("trajectories are a deterministic function of seed and index") {
  auto cfg = qubit_config(fixtures::qubit_state_03_07(), 200, 99);
  cfg.trajectory_index = 3;
  const auto a = run_trajectory(cfg);
  const auto b = run_trajectory(cfg);
  CHECK(a.outcome_indices == b.outcome_indices);
  CHECK(a.log_joint_probability == b.log_joint_probability);
  CHECK((a.final_state.matrix() - b.final_state.matrix()).cwiseAbs().maxCoeff() == 0.0);

  cfg.trajectory_index = 4;
  const auto c = run_trajectory(cfg);
  CHECK(a.outcome_indices != c.outcome_indices);
}

TEST_CASE("log joint probability chains the per-step conditionals") {
  auto cfg = qubit_config(fixtures::qubit_state_03_07(), 40, 5);
  const auto rec = run_trajectory(cfg);
  REQUIRE(static_cast<int>(rec.steps.size()) == 40);
  double acc = 0.0;
  for (const auto& sr : rec.steps) acc += sr.log_conditional;
  CHECK(rec.log_joint_probability == doctest::Approx(acc).epsilon(1e-12));
}

TEST_CASE("run_ensemble with one trajectory equals run_trajectory") {
  auto cfg = qubit_config(fixtures::qubit_state_03_07(), 60, 21);
  const auto single = run_trajectory(cfg);
  const auto batch = run_ensemble(cfg, 1, 1);
  REQUIRE(batch.size() == 1);
  CHECK(batch[0].outcome_indices == single.outcome_indices);
  CHECK(batch[0].log_joint_probability == single.log_joint_probability);
}

TEST_CASE("serial and parallel ensembles are bitwise identical") {
  auto cfg = qubit_config(fixtures::qubit_state_03_07(), 80, 31);
  const auto serial = run_ensemble(cfg, 24, 1);
  const auto parallel = run_ensemble(cfg, 24, 4);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].trajectory_index == parallel[i].trajectory_index);
    CHECK(serial[i].outcome_indices == parallel[i].outcome_indices);
    CHECK(serial[i].log_joint_probability == parallel[i].log_joint_probability);
    CHECK((serial[i].final_state.matrix() - parallel[i].final_state.matrix())
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
}

TEST_CASE("product form state matches a single map application") {
  const auto model = fixtures::two_outcome_qubit_model();
  const auto classes = build_degeneracy_classes(fixtures::qubit_observable());
  auto cfg = qubit_config(fixtures::qubit_state_03_07(), 1, 11);
  const auto rec = run_trajectory(cfg);
  const auto direct = apply_measurement(cfg.initial_state, model, rec.outcome_indices[0]);
  const auto product = product_form_state(rec, cfg.initial_state, model, classes);
  CHECK(trace_distance(direct.state, product) <= 1e-12);
}

TEST_CASE("product form state matches the stepwise recursion on random models") {
  RngStream rng(211, 0);
  for (int k = 0; k < 10; ++k) {
    const auto c = fuzz::random_case(4, 4, rng);
    TrajectoryConfig cfg{
        .observable = c.observable,
        .model = c.model,
        .initial_state = c.state,
        .n_steps = 20,
        .seed = 212,
        .trajectory_index = static_cast<std::uint64_t>(k),
    };
    const auto rec = run_trajectory(cfg);
    const auto product = product_form_state(rec, c.state, c.model, c.classes);
    CHECK(trace_distance(rec.final_state, product) <= 1e-9);
  }
}

TEST_CASE("joint enumeration covers all sequences and sums to one") {
  const auto model = fixtures::two_outcome_qubit_model();
  const auto classes = build_degeneracy_classes(fixtures::qubit_observable());
  const auto theta = fixtures::qubit_state_03_07();

  const auto joint = joint_probability_exact(model, classes, theta, 3);
  CHECK(joint.probabilities.size() == 8);
  CHECK(joint.total() == doctest::Approx(1.0).epsilon(1e-12));

  const auto one = joint_probability_exact(model, classes,
                                           DensityMatrix::diagonal(rvec({0.3, 0.7})), 1);
  CHECK(one.probability_of({0}) == doctest::Approx(0.38).epsilon(1e-13));
  CHECK(one.probability_of({1}) == doctest::Approx(0.62).epsilon(1e-13));
}

TEST_CASE("joint distribution of an eigenstate factorizes") {
  const auto model = fixtures::two_outcome_qubit_model();
  const auto classes = build_degeneracy_classes(fixtures::qubit_observable());
  const auto theta = pure({1.0, 0.0});
  const auto joint = joint_probability_exact(model, classes, theta, 3);
  const auto single = outcome_distribution(theta, model);
  for (std::size_t idx = 0; idx < joint.probabilities.size(); ++idx) {
    const auto seq = joint.decode(idx);
    double expected = 1.0;
    for (int s : seq) expected *= single[s];
    CHECK(joint.probabilities[idx] == doctest::Approx(expected).epsilon(1e-12));
  }
  // the worked sequence A,A,B for the 0.8/0.2 model
  CHECK(joint.probability_of({0, 0, 1}) == doctest::Approx(0.128).epsilon(1e-13));
}

TEST_CASE("joint enumeration refuses oversized requests") {
  const auto model = fixtures::two_outcome_qubit_model();
  const auto classes = build_degeneracy_classes(fixtures::qubit_observable());
  CHECK_THROWS_AS(joint_probability_exact(model, classes, fixtures::qubit_plus_state(), 21),
                  ValidationError);
}

TEST_CASE("exp(log_joint) agrees with the enumerated probability of the realized sequence") {
  RngStream rng(223, 0);
  for (int k = 0; k < 8; ++k) {
    const auto c = fuzz::random_case(4, 3, rng);
    TrajectoryConfig cfg{
        .observable = c.observable,
        .model = c.model,
        .initial_state = c.state,
        .n_steps = 6,
        .seed = 224,
        .trajectory_index = static_cast<std::uint64_t>(k),
    };
    const auto rec = run_trajectory(cfg);
    const auto joint = joint_probability_exact(c.model, c.classes, c.state, 6);
    CHECK(std::abs(std::exp(rec.log_joint_probability) -
                   joint.probability_of(rec.outcome_indices)) <= 1e-10);
  }
}

TEST_CASE("free evolution leaves diagonals alone and rotates off-diagonals") {
  const auto theta = fixtures::qubit_plus_state();
  CHECK(trace_distance(apply_free_evolution(theta, {0.4, 1.3}, 0.0), theta) <= 1e-14);

  const auto diag = DensityMatrix::diagonal(rvec({0.3, 0.7}));
  CHECK(trace_distance(apply_free_evolution(diag, {2.0, -1.0}, 1.7), diag) <= 1e-14);

  const auto rotated = apply_free_evolution(theta, {M_PI, 0.0}, 1.0);
  CHECK(rotated.entry(0, 0).real() == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(rotated.entry(1, 1).real() == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(rotated.entry(0, 1).real() == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(std::abs(std::abs(rotated.entry(0, 1)) - 0.5) <= 1e-13);
}

TEST_CASE("free evolution does not change the outcome sequence") {
  auto plain = qubit_config(fixtures::qubit_state_03_07(), 150, 77);
  auto evolved = plain;
  evolved.free_evolution = FreeEvolution{{0.7, -0.3}, 1.0, {}};
  for (std::uint64_t t = 0; t < 10; ++t) {
    plain.trajectory_index = t;
    evolved.trajectory_index = t;
    const auto a = run_trajectory(plain);
    const auto b = run_trajectory(evolved);
    CHECK(a.outcome_indices == b.outcome_indices);
    CHECK(a.final_state.diagonal().isApprox(b.final_state.diagonal(), 1e-12));
  }
}

TEST_CASE("a tau schedule cycles deterministically") {
  auto cfg = qubit_config(fixtures::qubit_state_03_07(), 30, 55);
  cfg.free_evolution = FreeEvolution{{0.2, 0.9}, 1.0, {0.5, 1.5, 2.5}};
  const auto a = run_trajectory(cfg);
  const auto b = run_trajectory(cfg);
  CHECK(a.outcome_indices == b.outcome_indices);
  CHECK((a.final_state.matrix() - b.final_state.matrix()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("detect_convergence matches the online tracker") {
  auto cfg = qubit_config(fixtures::qubit_state_03_07(), 300, 13);
  const auto classes = build_degeneracy_classes(cfg.observable);
  int converged = 0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    cfg.trajectory_index = t;
    const auto rec = run_trajectory(cfg);
    const auto redo = detect_convergence(rec, cfg.initial_state, classes, 1e-6);
    if (rec.converged_class) {
      ++converged;
      REQUIRE(redo.has_value());
      CHECK(redo->class_label == *rec.converged_class);
      CHECK(redo->step == *rec.converged_at);
      CHECK(redo->luders_distance == doctest::Approx(rec.luders_distance).epsilon(1e-12));
    } else {
      CHECK_FALSE(redo.has_value());
    }
  }
  CHECK(converged >= 49);  // mu^300 is astronomically small
}

TEST_CASE("degenerate classes converge to the projected initial state") {
  TrajectoryConfig cfg{
      .observable = fixtures::three_level_degenerate_observable(),
      .model = fixtures::three_level_degenerate_model(),
      .initial_state = DensityMatrix::maximally_mixed(3),
      .n_steps = 400,
      .seed = 775,
  };
  cfg.record_stride = 400;
  const auto classes = build_degeneracy_classes(cfg.observable);
  int degenerate_hits = 0;
  for (std::uint64_t t = 0; t < 30; ++t) {
    cfg.trajectory_index = t;
    const auto rec = run_trajectory(cfg);
    REQUIRE(rec.converged_class.has_value());
    CHECK(rec.luders_distance <= 1e-5);
    CHECK(rec.max_block_drift <= 1e-10);
    const auto& cls = classes[static_cast<std::size_t>(*rec.converged_class)];
    if (cls.dimension == 2) {
      ++degenerate_hits;
      // the asymptotic state is the mixed block I_2/2, not a pure state
      CHECK(purity(rec.final_state) == doctest::Approx(0.5).epsilon(1e-6));
    }
  }
  CHECK(degenerate_hits > 0);
}

TEST_CASE("within-class blocks stay constant along trajectories") {
  // a pure state with structure inside the degenerate class
  ComplexVector amps(3);
  amps << Complex(0.6, 0.0), Complex(0.0, 0.6), Complex(std::sqrt(0.28), 0.0);
  TrajectoryConfig cfg{
      .observable = fixtures::three_level_degenerate_observable(),
      .model = fixtures::three_level_degenerate_model(),
      .initial_state = density_from_pure(PureState(amps)),
      .n_steps = 300,
      .seed = 777,
  };
  for (std::uint64_t t = 0; t < 20; ++t) {
    cfg.trajectory_index = t;
    const auto rec = run_trajectory(cfg);
    CHECK(rec.max_block_drift <= 1e-10);
  }
}

TEST_CASE("a per-step model schedule runs deterministically and keeps states valid") {
  auto cfg = qubit_config(fixtures::qubit_state_03_07(), 60, 41);
  cfg.model_schedule = {fixtures::two_outcome_qubit_model(0.8),
                        fixtures::two_outcome_qubit_model(0.65)};
  const auto a = run_trajectory(cfg);
  const auto b = run_trajectory(cfg);
  CHECK(a.outcome_indices == b.outcome_indices);
  for (const auto& sr : a.steps) {
    CHECK(sr.class_weights.sum() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sr.class_weights.minCoeff() >= -1e-12);
  }
}

TEST_CASE("config validation rejects malformed runs") {
  auto cfg = qubit_config(fixtures::qubit_state_03_07(), 10, 1);
  cfg.n_steps = 0;
  CHECK_THROWS_AS(run_trajectory(cfg), ValidationError);

  cfg = qubit_config(fixtures::qubit_state_03_07(), 10, 1);
  cfg.record_stride = 0;
  CHECK_THROWS_AS(run_trajectory(cfg), ValidationError);

  cfg = qubit_config(DensityMatrix::maximally_mixed(3), 10, 1);
  CHECK_THROWS_AS(run_trajectory(cfg), ValidationError);

  cfg = qubit_config(fixtures::qubit_state_03_07(), 10, 1);
  cfg.free_evolution = FreeEvolution{{0.1}, 1.0, {}};
  CHECK_THROWS_AS(run_trajectory(cfg), ValidationError);

  cfg = qubit_config(fixtures::qubit_state_03_07(), 10, 1);
  cfg.model = fixtures::gaussian_qubit(2.0);
  cfg.model_schedule = {fixtures::two_outcome_qubit_model()};
  CHECK_THROWS_AS(run_trajectory(cfg), ValidationError);
}

TEST_CASE("record stride thins the diagnostics but keeps the outcome sequence") {
  auto cfg = qubit_config(fixtures::qubit_state_03_07(), 100, 3);
  cfg.record_stride = 25;
  const auto rec = run_trajectory(cfg);
  CHECK(rec.outcome_indices.size() == 100);
  REQUIRE(rec.steps.size() == 4);
  CHECK(rec.steps.back().step == 100);
}

TEST_CASE("gaussian trajectories converge like discrete ones") {
  TrajectoryConfig cfg{
      .observable = fixtures::qubit_observable(),
      .model = fixtures::gaussian_qubit(1.0),
      .initial_state = fixtures::qubit_state_03_07(),
      .n_steps = 200,
      .seed = 515,
  };
  cfg.record_stride = 200;
  const auto classes = build_degeneracy_classes(cfg.observable);
  for (std::uint64_t t = 0; t < 10; ++t) {
    cfg.trajectory_index = t;
    const auto rec = run_trajectory(cfg);
    CHECK(rec.outcome_values.size() == 200);
    REQUIRE(rec.converged_class.has_value());
    const auto& cls = classes[static_cast<std::size_t>(*rec.converged_class)];
    CHECK(trace_distance(rec.final_state,
                         DensityMatrix::from_matrix(cls.projector.matrix())) <= 1e-5);
  }
}
