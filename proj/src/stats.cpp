// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#include "qnd/stats.hpp"

#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "qnd/rng.hpp"

namespace qnd {

namespace {
constexpr double kZeroWeightFloor = 1e-12;
}

BornTestReport born_rule_test(const std::vector<TrajectoryRecord>& records,
                              const DensityMatrix& theta0,
                              const std::vector<DegeneracyClass>& classes, double alpha) {
  BornTestReport report;
  report.alpha = alpha;

  const RealVector expected = class_weights(theta0, classes);
  std::vector<long> counts(classes.size(), 0);
  for (const auto& rec : records) {
    if (rec.converged_class) {
      ++counts[static_cast<std::size_t>(*rec.converged_class)];
      ++report.n_converged;
    } else {
      ++report.n_unconverged;
    }
  }
  if (report.n_converged < 100) {
    throw ValidationError("born_rule_test: need at least 100 converged trajectories");
  }

  int populated = 0;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    if (expected[static_cast<Eigen::Index>(k)] > kZeroWeightFloor) ++populated;
  }
  // many parallel class gates: split alpha across them
  report.bonferroni_alpha = alpha / std::max(1, populated);
  const boost::math::normal_distribution<double> normal;
  const double z_crit =
      boost::math::quantile(normal, 1.0 - 0.5 * report.bonferroni_alpha);

  double chi2 = 0.0;
  bool class_gates = true;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    BornClassStat stat;
    stat.class_label = classes[k].label;
    stat.expected_fraction = expected[static_cast<Eigen::Index>(k)];
    stat.observed_count = counts[k];
    stat.observed_fraction = static_cast<double>(counts[k]) / report.n_converged;

    if (stat.expected_fraction <= kZeroWeightFloor) {
      if (counts[k] > 0) report.zero_weight_violation = true;
      report.classes.push_back(stat);
      continue;
    }
    const double e = stat.expected_fraction * report.n_converged;
    const double diff = counts[k] - e;
    chi2 += diff * diff / e;
    const double sigma = std::sqrt(stat.expected_fraction * (1.0 - stat.expected_fraction) /
                                   report.n_converged);
    stat.binomial_z = sigma > 0.0 ? (stat.observed_fraction - stat.expected_fraction) / sigma
                                  : 0.0;
    stat.binomial_pass = std::abs(stat.binomial_z) <= z_crit;
    class_gates = class_gates && stat.binomial_pass;
    report.classes.push_back(stat);
  }

  report.chi_square = chi2;
  report.dof = populated > 1 ? populated - 1 : 0;
  report.p_value =
      report.dof == 0 ? 1.0 : boost::math::gamma_q(0.5 * report.dof, 0.5 * chi2);
  report.pass = !report.zero_weight_violation && report.p_value > alpha && class_gates;
  return report;
}

std::vector<LudersClassDistance> luders_batch_check(
    const std::vector<TrajectoryRecord>& records, const DensityMatrix& theta0,
    const std::vector<DegeneracyClass>& classes) {
  std::vector<LudersClassDistance> out;
  out.reserve(classes.size());
  for (const auto& cls : classes) {
    out.push_back({cls.label, 0, 0.0});
  }
  for (const auto& rec : records) {
    if (!rec.converged_class) continue;
    auto& entry = out[static_cast<std::size_t>(*rec.converged_class)];
    ++entry.count;
    const auto block = project_block(theta0, classes[*rec.converged_class].projector);
    if (!block.state) {
      entry.max_distance = std::numeric_limits<double>::infinity();
      continue;
    }
    entry.max_distance =
        std::max(entry.max_distance, trace_distance(rec.final_state, *block.state));
  }
  return out;
}

YmSample ym_from_records(const std::vector<TrajectoryRecord>& records, int m_outcomes) {
  if (m_outcomes < 1) throw ValidationError("ym_from_records: need M >= 1");
  YmSample sample;
  sample.m_outcomes = m_outcomes;
  sample.values.reserve(records.size());
  for (const auto& rec : records) {
    if (static_cast<int>(rec.outcome_values.size()) < m_outcomes) {
      throw ValidationError("ym_from_records: record has fewer continuous outcomes than M");
    }
    double sum = 0.0;
    for (int j = 0; j < m_outcomes; ++j) sum += rec.outcome_values[j];
    sample.values.push_back(sum / m_outcomes);
  }
  return sample;
}

YmSample ensemble_mode_sampler(const DensityMatrix& theta0, const GaussianModel& model,
                               int m_outcomes, int n_samples, std::uint64_t seed) {
  if (m_outcomes < 1 || n_samples < 1) {
    throw ValidationError("ensemble_mode_sampler: need M >= 1 and N >= 1");
  }
  YmSample sample;
  sample.m_outcomes = m_outcomes;
  sample.values.reserve(n_samples);
  for (int t = 0; t < n_samples; ++t) {
    RngStream rng(seed, static_cast<std::uint64_t>(t));
    double sum = 0.0;
    for (int j = 0; j < m_outcomes; ++j) sum += sample_outcome(theta0, model, rng);
    sample.values.push_back(sum / m_outcomes);
  }
  return sample;
}

YmCompareReport ym_compare(const YmSample& sample, const YmDistribution& predicted,
                           double n_sigma) {
  if (predicted.components.empty()) throw ValidationError("ym_compare: empty prediction");
  if (sample.values.empty()) throw ValidationError("ym_compare: empty sample");

  YmCompareReport report;
  report.n_sigma = n_sigma;
  const std::size_t n_comp = predicted.components.size();
  const double n_total = static_cast<double>(sample.values.size());

  // Separation between the closest pair of centers, in component sigmas.
  report.min_separation_sigmas = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < n_comp; ++a) {
    for (std::size_t b = a + 1; b < n_comp; ++b) {
      const auto& ca = predicted.components[a];
      const auto& cb = predicted.components[b];
      if (ca.weight <= 0.0 || cb.weight <= 0.0) continue;
      const double sigma = std::sqrt(std::max(ca.variance, cb.variance));
      report.min_separation_sigmas =
          std::min(report.min_separation_sigmas, std::abs(ca.center - cb.center) / sigma);
    }
  }
  report.overlap_flagged = report.min_separation_sigmas < 6.0;

  std::vector<long> counts(n_comp, 0);
  std::vector<double> sums(n_comp, 0.0), sums2(n_comp, 0.0);
  for (double y : sample.values) {
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n_comp; ++k) {
      if (predicted.components[k].weight <= 0.0) continue;
      const double dist = std::abs(y - predicted.components[k].center);
      if (dist < best_dist) {
        best_dist = dist;
        best = k;
      }
    }
    ++counts[best];
    sums[best] += y;
    sums2[best] += y * y;
  }

  report.pass = true;
  for (std::size_t k = 0; k < n_comp; ++k) {
    const auto& comp = predicted.components[k];
    YmClusterStat stat;
    stat.predicted_weight = comp.weight;
    stat.predicted_center = comp.center;
    stat.predicted_variance = comp.variance;
    stat.count = counts[k];
    stat.observed_fraction = counts[k] / n_total;
    if (counts[k] > 0) {
      stat.observed_mean = sums[k] / counts[k];
      stat.observed_variance =
          std::max(0.0, sums2[k] / counts[k] - stat.observed_mean * stat.observed_mean);
    }

    const double w_err = std::sqrt(std::max(comp.weight * (1.0 - comp.weight), 1e-12) / n_total);
    stat.weight_pass = std::abs(stat.observed_fraction - comp.weight) <= n_sigma * w_err;

    if (!report.overlap_flagged && comp.weight > 0.0) {
      const double expected_count = std::max(1.0, comp.weight * n_total);
      const double mean_err = std::sqrt(comp.variance) / std::sqrt(expected_count);
      stat.mean_pass = std::abs(stat.observed_mean - comp.center) <= n_sigma * mean_err;
      // The component variance delta^2/(2M) is exact only in repeated mode;
      // the ensemble prediction drops the observable-spread term, so its
      // variance is reported without a gate.
      if (predicted.kind == YmKind::repeated) {
        const double var_err =
            comp.variance * std::sqrt(2.0 / std::max(1.0, expected_count - 1.0));
        stat.variance_pass =
            std::abs(stat.observed_variance - comp.variance) <= n_sigma * var_err;
      }
    }
    report.pass = report.pass && stat.weight_pass && stat.mean_pass && stat.variance_pass;
    report.clusters.push_back(stat);
  }
  return report;
}

Histogram make_histogram(const std::vector<double>& values, int bins, double lo, double hi) {
  if (bins < 1 || !(hi > lo)) throw ValidationError("make_histogram: bad bin layout");
  Histogram h;
  h.edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) h.edges[b] = lo + (hi - lo) * b / bins;
  h.counts.assign(bins, 0);
  const double scale = bins / (hi - lo);
  for (double v : values) {
    if (v < lo || v >= hi) continue;
    int b = static_cast<int>((v - lo) * scale);
    if (b >= bins) b = bins - 1;
    ++h.counts[b];
  }
  return h;
}

}  // namespace qnd
