// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#include "qnd/discrete_model.hpp"

#include <cmath>
#include <sstream>

namespace qnd {

namespace {
constexpr double kDistinguishabilityFloor = 1e-9;
constexpr double kClassConstancyTolerance = 1e-12;
}  // namespace

std::string ValidationReport::summary() const {
  if (ok()) return "all model constraints satisfied";
  std::ostringstream os;
  os << violations.size() << " violation(s):";
  for (const auto& v : violations) {
    os << " [" << v.constraint;
    for (int i : v.indices) os << " " << i;
    os << " magnitude " << v.magnitude << "]";
  }
  return os.str();
}

ValidationReport validate_model(const DiscreteModel& model,
                                const std::vector<DegeneracyClass>& classes,
                                double completeness_tolerance) {
  ValidationReport report;
  const int d = model.dim();
  const int n_out = model.n_outcomes();

  if (n_out == 0 || d == 0 || static_cast<int>(model.outcomes.size()) != n_out) {
    report.violations.push_back(
        {"shape", {}, 0.0, "lambda table empty or outcome labels inconsistent"});
    return report;
  }
  int covered = 0;
  for (const auto& cls : classes) covered += cls.dimension;
  if (covered != d) {
    report.violations.push_back({"shape", {}, 0.0, "classes do not partition the basis"});
    return report;
  }

  for (int i = 0; i < d; ++i) {
    const double col = model.lambda.col(i).squaredNorm();
    if (std::abs(col - 1.0) > completeness_tolerance) {
      report.violations.push_back({"completeness",
                                   {i},
                                   std::abs(col - 1.0),
                                   "sum_I |lambda_I^i|^2 = " + std::to_string(col)});
    }
  }

  for (const auto& cls : classes) {
    const int rep = cls.members.front();
    for (int i : cls.members) {
      if (i == rep) continue;
      const double dev = (model.lambda.col(i) - model.lambda.col(rep)).cwiseAbs().maxCoeff();
      if (dev > kClassConstancyTolerance) {
        report.violations.push_back({"class_constancy",
                                     {cls.label, rep, i},
                                     dev,
                                     "lambda differs inside a degeneracy class"});
      }
    }
  }

  for (std::size_t a = 0; a < classes.size(); ++a) {
    for (std::size_t b = a + 1; b < classes.size(); ++b) {
      const int ia = classes[a].members.front();
      const int ib = classes[b].members.front();
      const double sep =
          (model.lambda.col(ia).cwiseAbs2() - model.lambda.col(ib).cwiseAbs2())
              .cwiseAbs()
              .maxCoeff();
      if (sep <= kDistinguishabilityFloor) {
        report.violations.push_back({"distinguishability",
                                     {classes[a].label, classes[b].label},
                                     sep,
                                     "classes share identical outcome statistics"});
      }
    }
  }
  return report;
}

MuMatrix mu_matrix(const DiscreteModel& model, const std::vector<DegeneracyClass>& classes) {
  const RealMatrix mags = model.lambda.cwiseAbs();
  MuMatrix mu;
  mu.per_index = mags.transpose() * mags;

  const int n_cls = static_cast<int>(classes.size());
  mu.per_class.resize(n_cls, n_cls);
  for (int a = 0; a < n_cls; ++a) {
    for (int b = 0; b < n_cls; ++b) {
      mu.per_class(a, b) =
          mu.per_index(classes[a].members.front(), classes[b].members.front());
    }
  }
  return mu;
}

ComplexMatrix mu_tilde(const DiscreteModel& model) {
  // entry (i, j) = sum_I lambda_I^i conj(lambda_I^j): the one-step factor
  // of theta^{ij} under the non-selective map.
  return model.lambda.transpose() * model.lambda.conjugate();
}

RealVector outcome_distribution(const DensityMatrix& theta, const DiscreteModel& model) {
  if (theta.dim() != model.dim()) {
    throw ValidationError("outcome_distribution: dimension mismatch");
  }
  const RealVector diag = theta.diagonal();
  RealVector p = model.lambda.cwiseAbs2() * diag;
  // Clip the tiny negatives rounding can produce from near-zero diagonals.
  return p.cwiseMax(0.0);
}

MeasurementResult apply_measurement(const DensityMatrix& theta, const DiscreteModel& model,
                                    int outcome) {
  if (outcome < 0 || outcome >= model.n_outcomes()) {
    throw ValidationError("apply_measurement: outcome index out of range");
  }
  if (theta.dim() != model.dim()) {
    throw ValidationError("apply_measurement: dimension mismatch");
  }
  const int d = model.dim();
  const auto lam = model.lambda.row(outcome);

  double p = 0.0;
  for (int i = 0; i < d; ++i) p += std::norm(lam[i]) * theta.diagonal_entry(i);
  if (!(p > kMinOutcomeProbability)) {
    std::ostringstream os;
    os << "apply_measurement: outcome '" << model.outcomes[outcome]
       << "' has probability " << p << " below cutoff";
    throw NumericalError(os.str());
  }

  // theta'^{ij} = lambda_I^i conj(lambda_I^j) theta^{ij} / p
  ComplexMatrix out(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      out(i, j) = lam[i] * std::conj(lam[j]) * theta.entry(i, j) / p;
    }
  }
  return {DensityMatrix::unchecked(std::move(out)), p};
}

DiscreteModel binned_gaussian_model(double delta, const ObservableSpec& spec, int n_bins,
                                    double range_min, double range_max) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw ValidationError("binned_gaussian_model: delta must be positive and finite");
  }
  if (n_bins < 2) throw ValidationError("binned_gaussian_model: need at least 2 bins");
  if (!(range_max > range_min)) {
    throw ValidationError("binned_gaussian_model: empty outcome range");
  }

  const int d = spec.dim();
  const double sigma = delta / std::sqrt(2.0);  // std of the per-eigenvalue outcome density
  const double width = (range_max - range_min) / n_bins;

  DiscreteModel model;
  model.lambda.resize(n_bins, d);
  model.outcomes.reserve(n_bins);
  for (int b = 0; b < n_bins; ++b) {
    std::ostringstream os;
    os << "bin" << b;
    model.outcomes.push_back(os.str());
  }

  const auto normal_cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  for (int i = 0; i < d; ++i) {
    const double q = spec.eigenvalues[i];
    RealVector mass(n_bins);
    for (int b = 0; b < n_bins; ++b) {
      const double lo = range_min + b * width;
      const double hi = (b + 1 == n_bins) ? range_max : range_min + (b + 1) * width;
      mass[b] = normal_cdf((hi - q) / sigma) - normal_cdf((lo - q) / sigma);
    }
    const double total = mass.sum();
    if (std::abs(total - 1.0) <= 1e-6) mass /= total;
    model.lambda.col(i) = mass.cwiseMax(0.0).cwiseSqrt().cast<Complex>();
  }
  return model;
}

}  // namespace qnd
