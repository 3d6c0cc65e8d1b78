// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "qnd/fixtures.hpp"
#include "qnd/fuzz.hpp"
#include "qnd/gaussian_model.hpp"
#include "test_util.hpp"

using namespace qnd;
using testutil::pure;
using testutil::rvec;

namespace {

double integrate(const std::function<double(double)>& f, double lo, double hi) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 12, 1e-13);
}

}  // namespace

TEST_CASE("lambda_continuous peak and width") {
  const auto model = fixtures::gaussian_qubit(2.0);
  const double n = model.normalization();
  CHECK(n == doctest::Approx(std::pow(M_PI * 4.0, -0.25)).epsilon(1e-14));
  CHECK(lambda_continuous(model, 1.0, 0) == doctest::Approx(n).epsilon(1e-13));
  CHECK(lambda_continuous(model, 1.0 + 2.0, 0) ==
        doctest::Approx(n * std::exp(-0.5)).epsilon(1e-13));
}

TEST_CASE("lambda columns integrate to one") {
  for (double delta : {0.5, 1.0, 4.0}) {
    const auto model = fixtures::gaussian_qubit(delta);
    for (int i = 0; i < 2; ++i) {
      const double mass = integrate(
          [&](double p) {
            const double lam = lambda_continuous(model, p, i);
            return lam * lam;
          },
          -1.0 - 12.0 * delta, 1.0 + 12.0 * delta);
      CHECK(std::abs(mass - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("outcome density is the diagonal-weighted Gaussian mixture") {
  const auto model = fixtures::gaussian_qubit(1.5);
  const auto theta = DensityMatrix::diagonal(rvec({0.3, 0.7}));
  const double sigma2 = 1.5 * 1.5 / 2.0;
  const double p = 0.4;
  double expected = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double q = model.spec.eigenvalues[i];
    expected += theta.diagonal_entry(i) * std::exp(-0.5 * (p - q) * (p - q) / sigma2) /
                std::sqrt(2.0 * M_PI * sigma2);
  }
  CHECK(outcome_density(theta, model, p) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(std::exp(log_outcome_density(theta, model, p)) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("sampling an eigenstate matches its Gaussian") {
  const auto model = fixtures::gaussian_qubit(2.0);
  const auto theta = pure({1.0, 0.0});
  RngStream rng(101, 0);
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double p = sample_outcome(theta, model, rng);
    sum += p;
    sum2 += p * p;
  }
  const double mean = sum / n;
  const double sigma = model.delta / std::sqrt(2.0);
  CHECK(std::abs(mean - 1.0) <= 4.0 * sigma / std::sqrt(static_cast<double>(n)));
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(var - sigma * sigma) <= 5.0 * sigma * sigma * std::sqrt(2.0 / n));
}

TEST_CASE("sampling a mixed state matches the mixture moments") {
  const auto model = fixtures::gaussian_qubit(2.0);
  const auto theta = DensityMatrix::diagonal(rvec({0.3, 0.7}));
  RngStream rng(103, 0);
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double p = sample_outcome(theta, model, rng);
    sum += p;
    sum2 += p * p;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  const double expected_var = model.delta * model.delta / 2.0 + 0.84;  // 1 - 0.16
  CHECK(std::abs(mean - (-0.4)) <= 4.0 * std::sqrt(expected_var / n));
  CHECK(std::abs(var - expected_var) <= 5.0 * expected_var * std::sqrt(2.0 / n));
}

TEST_CASE("eigenstates are fixed points of the continuous map") {
  const auto model = fixtures::gaussian_qubit(0.7);
  const auto theta = pure({0.0, 1.0});
  for (double p : {-3.0, -1.0, 0.2, 1.0, 4.0}) {
    const auto up = apply_gaussian(theta, model, p);
    CHECK(trace_distance(up.state, theta) <= 1e-13);
  }
}

TEST_CASE("continuous map reweights by the Gaussian likelihood ratio") {
  const auto model = fixtures::gaussian_qubit(2.0);
  const auto theta = fixtures::qubit_plus_state();
  const double p = 1.0;  // on top of q_0
  const auto up = apply_gaussian(theta, model, p);
  // weights (1, e^{-(q0-q1)^2/delta^2}) with q0-q1 = 2: ratio e^{-1}
  const double ratio = std::exp(-1.0);
  const double w0 = 0.5, w1 = 0.5 * ratio;
  CHECK(up.state.entry(0, 0).real() == doctest::Approx(w0 / (w0 + w1)).epsilon(1e-12));
  CHECK(up.state.entry(1, 1).real() == doctest::Approx(w1 / (w0 + w1)).epsilon(1e-12));
}

TEST_CASE("weak limit leaves the state almost unchanged") {
  const auto model = fixtures::gaussian_qubit(1e5);
  const auto theta = fixtures::qubit_state_03_07();
  const auto up = apply_gaussian(theta, model, 0.3);
  CHECK(trace_distance(up.state, theta) <= 1e-9);
}

TEST_CASE("extreme outcomes survive through the shifted exponents") {
  const auto model = fixtures::gaussian_qubit(0.5);
  const auto theta = fixtures::qubit_state_03_07();
  const auto up = apply_gaussian(theta, model, 1.0 + 40.0 * model.delta);
  CHECK(std::abs(up.state.matrix().trace().real() - 1.0) <= 1e-12);
  CHECK(up.density >= 0.0);  // may underflow to zero, state still valid
  CHECK(std::isfinite(log_outcome_density(theta, model, 1.0 + 40.0 * model.delta)));
}

TEST_CASE("apply_gaussian agrees with the fine-binned discrete surrogate") {
  const auto spec = fixtures::qubit_observable();
  const double delta = 2.0;
  const auto gm = fixtures::gaussian_qubit(delta);
  const double lo = -1.0 - 5.0 * delta, hi = 1.0 + 5.0 * delta;
  const int bins = 4096;
  const auto dm = binned_gaussian_model(delta, spec, bins, lo, hi);

  RngStream rng(107, 0);
  for (int k = 0; k < 10; ++k) {
    const auto theta = fuzz::random_density(2, rng);
    const double p = -2.0 + 4.0 * rng.next_double();
    const int bin = std::min(bins - 1, static_cast<int>((p - lo) / (hi - lo) * bins));
    const double center = lo + (bin + 0.5) * (hi - lo) / bins;
    const auto continuous = apply_gaussian(theta, gm, center);
    const auto binned = apply_measurement(theta, dm, bin);
    CHECK(trace_distance(continuous.state, binned.state) <= 1e-6);
  }
}

TEST_CASE("ym_pdf for the ensemble and repeated kinds") {
  const auto model = fixtures::gaussian_qubit(4.0);
  const auto classes = build_degeneracy_classes(model.spec);
  const auto theta = DensityMatrix::diagonal(rvec({0.3, 0.7}));

  const auto ens = ym_pdf(YmKind::ensemble, 500, theta, model, classes);
  REQUIRE(ens.components.size() == 1);
  CHECK(ens.components[0].center == doctest::Approx(-0.4).epsilon(1e-13));
  CHECK(ens.components[0].weight == doctest::Approx(1.0));
  CHECK(ens.components[0].variance == doctest::Approx(16.0 / 1000.0).epsilon(1e-13));

  const auto rep = ym_pdf(YmKind::repeated, 500, theta, model, classes);
  REQUIRE(rep.components.size() == 2);
  // classes ascending by eigenvalue: (-1) then (+1)
  CHECK(rep.components[0].center == doctest::Approx(-1.0));
  CHECK(rep.components[0].weight == doctest::Approx(0.7).epsilon(1e-13));
  CHECK(rep.components[1].center == doctest::Approx(1.0));
  CHECK(rep.components[1].weight == doctest::Approx(0.3).epsilon(1e-13));

  // component std shrinks like 1/sqrt(M)
  const auto rep4 = ym_pdf(YmKind::repeated, 2000, theta, model, classes);
  CHECK(rep4.components[0].variance ==
        doctest::Approx(rep.components[0].variance / 4.0).epsilon(1e-13));
}

TEST_CASE("ym_density integrates to one") {
  const auto model = fixtures::gaussian_qubit(1.0);
  const auto classes = build_degeneracy_classes(model.spec);
  const auto theta = DensityMatrix::diagonal(rvec({0.5, 0.5}));
  const auto dist = ym_pdf(YmKind::repeated, 50, theta, model, classes);
  const double mass =
      integrate([&](double y) { return ym_density(dist, y); }, -4.0, 4.0);
  CHECK(std::abs(mass - 1.0) <= 1e-9);
}

TEST_CASE("quadrature confirms the exact first and second moments") {
  RngStream rng(109, 0);
  for (int k = 0; k < 10; ++k) {
    const double delta = 0.5 + 3.5 * rng.next_double();
    const auto model = fixtures::gaussian_qubit(delta);
    const auto theta = fuzz::random_density(2, rng);
    const double lo = -1.0 - 12.0 * delta, hi = 1.0 + 12.0 * delta;
    const auto density = [&](double p) { return outcome_density(theta, model, p); };

    const double mass = integrate(density, lo, hi);
    const double mean = integrate([&](double p) { return p * density(p); }, lo, hi);
    const double second = integrate([&](double p) { return p * p * density(p); }, lo, hi);

    double q_mean = 0.0, q2_mean = 0.0;
    for (int i = 0; i < 2; ++i) {
      q_mean += theta.diagonal_entry(i) * model.spec.eigenvalues[i];
      q2_mean += theta.diagonal_entry(i) * model.spec.eigenvalues[i] *
                 model.spec.eigenvalues[i];
    }
    CHECK(std::abs(mass - 1.0) <= 1e-9);
    CHECK(std::abs(mean - q_mean) <= 1e-9);
    CHECK(std::abs(second - (delta * delta / 2.0 + q2_mean)) <= 1e-9);
  }
}

TEST_CASE("continuum mu has the Gaussian closed form") {
  for (double delta : {0.5, 2.0}) {
    const auto model = fixtures::gaussian_qubit(delta);
    const double numeric = integrate(
        [&](double p) {
          return lambda_continuous(model, p, 0) * lambda_continuous(model, p, 1);
        },
        -1.0 - 14.0 * delta, 1.0 + 14.0 * delta);
    const double closed = std::exp(-4.0 / (4.0 * delta * delta));
    CHECK(std::abs(numeric - closed) <= 1e-9);
  }
}
