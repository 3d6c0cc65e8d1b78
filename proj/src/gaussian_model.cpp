// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#include "qnd/gaussian_model.hpp"

#include <cmath>
#include <limits>

namespace qnd {

namespace {

void check_model(const GaussianModel& model) {
  if (!(model.delta > 0.0) || !std::isfinite(model.delta)) {
    throw ValidationError("GaussianModel: delta must be positive and finite");
  }
  if (model.dim() < 1) throw ValidationError("GaussianModel: empty observable");
}

// log lambda_p^i squared, up to the constant 2 log N.
double neg_exponent(const GaussianModel& model, double p, int i) {
  const double z = (p - model.spec.eigenvalues[i]) / model.delta;
  return z * z;
}

}  // namespace

double GaussianModel::normalization() const {
  return std::pow(M_PI * delta * delta, -0.25);
}

double lambda_continuous(const GaussianModel& model, double p, int i) {
  check_model(model);
  if (i < 0 || i >= model.dim()) throw ValidationError("lambda_continuous: index out of range");
  return model.normalization() * std::exp(-0.5 * neg_exponent(model, p, i));
}

double outcome_density(const DensityMatrix& theta, const GaussianModel& model, double p) {
  return std::exp(log_outcome_density(theta, model, p));
}

double log_outcome_density(const DensityMatrix& theta, const GaussianModel& model, double p) {
  check_model(model);
  if (theta.dim() != model.dim()) throw ValidationError("outcome_density: dimension mismatch");
  const int d = model.dim();

  // log-sum-exp over the mixture terms theta^{ii} N^2 e^{-(p-q_i)^2/delta^2}
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i) best = std::min(best, neg_exponent(model, p, i));
  double acc = 0.0;
  for (int i = 0; i < d; ++i) {
    acc += theta.diagonal_entry(i) * std::exp(best - neg_exponent(model, p, i));
  }
  if (!(acc > 0.0)) return -std::numeric_limits<double>::infinity();
  const double log_n2 = -0.5 * std::log(M_PI * model.delta * model.delta);
  return log_n2 - best + std::log(acc);
}

double sample_outcome(const DensityMatrix& theta, const GaussianModel& model, RngStream& rng) {
  check_model(model);
  if (theta.dim() != model.dim()) throw ValidationError("sample_outcome: dimension mismatch");
  const RealVector weights = theta.diagonal().cwiseMax(0.0);
  const int i = rng.sample_discrete(weights);
  const double sigma = model.delta / std::sqrt(2.0);
  return model.spec.eigenvalues[i] + sigma * rng.next_normal();
}

GaussianUpdate apply_gaussian(const DensityMatrix& theta, const GaussianModel& model, double p) {
  check_model(model);
  if (theta.dim() != model.dim()) throw ValidationError("apply_gaussian: dimension mismatch");
  if (!std::isfinite(p)) throw ValidationError("apply_gaussian: outcome must be finite");
  const int d = model.dim();

  // Shift exponents so the dominant lambda is exactly 1; the update is
  // invariant under rescaling all lambda by a common factor.
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i) best = std::min(best, neg_exponent(model, p, i));

  RealVector rel(d);  // lambda_p^i / lambda_p^best
  double norm = 0.0;
  for (int i = 0; i < d; ++i) {
    rel[i] = std::exp(-0.5 * (neg_exponent(model, p, i) - best));
    norm += rel[i] * rel[i] * theta.diagonal_entry(i);
  }
  if (!(norm > 0.0)) {
    throw NumericalError("apply_gaussian: outcome density vanished for every branch");
  }

  ComplexMatrix out(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      out(i, j) = rel[i] * rel[j] * theta.entry(i, j) / norm;
    }
  }
  GaussianUpdate up{DensityMatrix::unchecked(std::move(out)),
                    std::exp(log_outcome_density(theta, model, p))};
  return up;
}

YmDistribution ym_pdf(YmKind kind, int m_outcomes, const DensityMatrix& theta0,
                      const GaussianModel& model, const std::vector<DegeneracyClass>& classes) {
  check_model(model);
  if (m_outcomes < 1) throw ValidationError("ym_pdf: need M >= 1");
  const double variance = model.delta * model.delta / (2.0 * m_outcomes);

  YmDistribution dist;
  dist.kind = kind;
  dist.m_outcomes = m_outcomes;
  if (kind == YmKind::ensemble) {
    double mean = 0.0;
    for (int i = 0; i < model.dim(); ++i) {
      mean += theta0.diagonal_entry(i) * model.spec.eigenvalues[i];
    }
    dist.components.push_back({1.0, mean, variance});
  } else {
    const RealVector w = class_weights(theta0, classes);
    for (std::size_t k = 0; k < classes.size(); ++k) {
      dist.components.push_back(
          {w[static_cast<Eigen::Index>(k)], classes[k].eigenvalue, variance});
    }
  }
  return dist;
}

double ym_density(const YmDistribution& dist, double y) {
  double acc = 0.0;
  for (const auto& c : dist.components) {
    if (c.weight <= 0.0) continue;
    const double z = (y - c.center);
    acc += c.weight * std::exp(-0.5 * z * z / c.variance) / std::sqrt(2.0 * M_PI * c.variance);
  }
  return acc;
}

}  // namespace qnd
