// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#include "qnd/martingale.hpp"

#include <cmath>
#include <limits>

namespace qnd {

namespace {
constexpr double kAmplitudeFloor = 1e-14;  // below this, factors are not divided out
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

DiagMartingaleCheck exact_onestep_diag(const DensityMatrix& theta, const DiscreteModel& model,
                                       const std::vector<DegeneracyClass>& classes) {
  const RealVector before = class_weights(theta, classes);
  const RealVector probs = outcome_distribution(theta, model);
  RealVector after = RealVector::Zero(before.size());
  for (int I = 0; I < model.n_outcomes(); ++I) {
    const double p = probs[I];
    if (p <= kMinOutcomeProbability) continue;
    const auto result = apply_measurement(theta, model, I);
    after += p * class_weights(result.state, classes);
  }
  DiagMartingaleCheck check;
  check.residuals = after - before;
  check.max_abs_residual = check.residuals.cwiseAbs().maxCoeff();
  return check;
}

OffdiagCheck exact_onestep_offdiag(const DensityMatrix& theta, const DiscreteModel& model,
                                   const std::vector<DegeneracyClass>& classes) {
  const int d = model.dim();
  const MuMatrix mu = mu_matrix(model, classes);
  const RealMatrix before = theta.matrix().cwiseAbs();

  RealMatrix after = RealMatrix::Zero(d, d);
  const RealVector probs = outcome_distribution(theta, model);
  for (int I = 0; I < model.n_outcomes(); ++I) {
    if (probs[I] <= kMinOutcomeProbability) continue;
    const auto result = apply_measurement(theta, model, I);
    after += probs[I] * result.state.matrix().cwiseAbs();
  }

  OffdiagCheck check;
  check.expected_factor = mu.per_index;
  check.residuals = (after - mu.per_index.cwiseProduct(before)).cwiseAbs();
  check.measured_factor = RealMatrix::Constant(d, d, kNaN);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (before(i, j) > kAmplitudeFloor) {
        check.measured_factor(i, j) = after(i, j) / before(i, j);
      }
    }
  }
  check.max_abs_residual = check.residuals.maxCoeff();
  return check;
}

DecayCurve decay_curve(const std::vector<TrajectoryRecord>& records, int i, int j) {
  if (records.empty()) throw ValidationError("decay_curve: no trajectories");
  const int n_steps = records.front().n_steps;
  for (const auto& rec : records) {
    if (rec.n_steps != n_steps || static_cast<int>(rec.steps.size()) != n_steps) {
      throw ValidationError("decay_curve: records must share the config and use stride 1");
    }
    if (!rec.steps.front().offdiag_magnitudes) {
      throw ValidationError("decay_curve: off-diagonal recording was not enabled");
    }
  }

  const double n = static_cast<double>(records.size());
  DecayCurve curve;
  curve.low_sample_warning = records.size() < 100;
  curve.mean.resize(n_steps);
  curve.stderr_mean.resize(n_steps);
  for (int step = 0; step < n_steps; ++step) {
    double sum = 0.0, sum2 = 0.0;
    for (const auto& rec : records) {
      const double a = (*rec.steps[step].offdiag_magnitudes)(i, j);
      sum += a;
      sum2 += a * a;
    }
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean);
    curve.mean[step] = mean;
    curve.stderr_mean[step] = std::sqrt(var / n);
  }

  // OLS on log E[A_n] vs n; slope is log of the geometric rate.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int step = 0; step < n_steps; ++step) {
    if (curve.mean[step] <= 0.0) break;
    const double x = step + 1;
    const double y = std::log(curve.mean[step]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m >= 2) {
    const double denom = m * sxx - sx * sx;
    const double slope = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / m;
    double rss = 0.0;
    for (int step = 0; step < m; ++step) {
      const double resid = std::log(curve.mean[step]) - (intercept + slope * (step + 1));
      rss += resid * resid;
    }
    const double slope_var = m > 2 ? (rss / (m - 2)) * m / denom : 0.0;
    curve.fitted_rate = std::exp(slope);
    curve.fitted_rate_stderr = curve.fitted_rate * std::sqrt(std::max(0.0, slope_var));
  } else {
    curve.fitted_rate = kNaN;
    curve.fitted_rate_stderr = kNaN;
  }
  return curve;
}

FixedPointReport asymptotic_fixed_point_check(const std::vector<TrajectoryRecord>& records,
                                              const DiscreteModel& model,
                                              const std::vector<DegeneracyClass>& classes,
                                              double epsilon) {
  FixedPointReport report;
  report.per_class_counts.assign(classes.size(), 0);
  for (const auto& rec : records) {
    const RealVector weights =
        rec.steps.empty() ? rec.initial_class_weights : rec.steps.back().class_weights;
    int above = 0;
    int dominant = -1;
    for (Eigen::Index k = 0; k < weights.size(); ++k) {
      if (weights[k] > epsilon) ++above;
      if (weights[k] >= 1.0 - epsilon) dominant = static_cast<int>(k);
    }
    if (dominant >= 0 && above == 1) {
      ++report.n_converged;
      ++report.per_class_counts[dominant];
    } else if (above > 1 && dominant >= 0) {
      // weight >= 1-eps for one class yet another above eps: inconsistent
      ++report.n_multi_class;
    } else {
      ++report.n_pending;
    }
  }

  // Two distinct observed limits require distinguishable outcome statistics.
  report.min_observed_separation = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < classes.size(); ++a) {
    if (report.per_class_counts[a] == 0) continue;
    for (std::size_t b = a + 1; b < classes.size(); ++b) {
      if (report.per_class_counts[b] == 0) continue;
      const double sep = (model.lambda.col(classes[a].members.front()).cwiseAbs2() -
                          model.lambda.col(classes[b].members.front()).cwiseAbs2())
                             .cwiseAbs()
                             .maxCoeff();
      report.min_observed_separation = std::min(report.min_observed_separation, sep);
    }
  }
  report.distinguishable = report.min_observed_separation > 1e-9;
  report.pass = report.n_multi_class == 0 && report.distinguishable;
  return report;
}

double purity_submartingale_residual(const DensityMatrix& theta, const DiscreteModel& model,
                                     int m) {
  if (m < 2) throw ValidationError("purity_submartingale_residual: need m >= 2");
  const auto moment = [m](const ComplexMatrix& t) {
    ComplexMatrix acc = t;
    for (int k = 1; k < m; ++k) acc = (acc * t).eval();
    return acc.trace().real();
  };

  const RealVector probs = outcome_distribution(theta, model);
  double expectation = 0.0;
  for (int I = 0; I < model.n_outcomes(); ++I) {
    if (probs[I] <= kMinOutcomeProbability) continue;
    const auto result = apply_measurement(theta, model, I);
    expectation += probs[I] * moment(result.state.matrix());
  }
  return expectation - moment(theta.matrix());
}

ComplexMatrix nonselective_map(const DensityMatrix& theta, const DiscreteModel& model) {
  const int d = model.dim();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  // sum_I M theta M^dag contracts entry (i,j) by mu_tilde_ij.
  const ComplexMatrix factors = mu_tilde(model);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      out(i, j) = factors(i, j) * theta.entry(i, j);
    }
  }
  return out;
}

}  // namespace qnd
