// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#include "qnd/trajectory.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "qnd/rng.hpp"

namespace qnd {

namespace {

constexpr double kBlockTrackFloor = 1e-10;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_config(const TrajectoryConfig& cfg, const std::vector<DegeneracyClass>& classes) {
  const int d = cfg.observable.dim();
  if (cfg.n_steps < 1) throw ValidationError("TrajectoryConfig: n_steps must be >= 1");
  if (cfg.record_stride < 1) throw ValidationError("TrajectoryConfig: record_stride must be >= 1");
  if (!(cfg.convergence_epsilon > 0.0)) {
    throw ValidationError("TrajectoryConfig: convergence_epsilon must be > 0");
  }
  if (cfg.initial_state.dim() != d) {
    throw ValidationError("TrajectoryConfig: initial state dimension mismatch");
  }
  if (const auto* dm = std::get_if<DiscreteModel>(&cfg.model)) {
    if (dm->dim() != d) throw ValidationError("TrajectoryConfig: model dimension mismatch");
    const auto report = validate_model(*dm, classes, 1e-9);
    if (!report.ok()) {
      throw ValidationError("TrajectoryConfig: invalid model: " + report.summary());
    }
  } else {
    const auto& gm = std::get<GaussianModel>(cfg.model);
    if (gm.dim() != d || (gm.spec.eigenvalues - cfg.observable.eigenvalues).cwiseAbs().maxCoeff() != 0.0) {
      throw ValidationError("TrajectoryConfig: Gaussian model observable mismatch");
    }
    if (!cfg.model_schedule.empty()) {
      throw ValidationError("TrajectoryConfig: model schedule requires a discrete base model");
    }
  }
  for (const auto& m : cfg.model_schedule) {
    if (m.dim() != d) throw ValidationError("TrajectoryConfig: schedule model dimension mismatch");
    const auto report = validate_model(m, classes, 1e-9);
    if (!report.ok()) {
      throw ValidationError("TrajectoryConfig: invalid schedule model: " + report.summary());
    }
  }
  if (cfg.free_evolution) {
    if (static_cast<int>(cfg.free_evolution->phases.size()) != d) {
      throw ValidationError("TrajectoryConfig: free-evolution phases must have one entry per basis index");
    }
  }
}

// Block invariance is a measurement-only statement; free evolution with
// phases that differ inside a degeneracy class rotates the block unitarily.
bool block_tracking_applies(const TrajectoryConfig& cfg,
                            const std::vector<DegeneracyClass>& classes) {
  if (!cfg.free_evolution) return true;
  for (const auto& cls : classes) {
    const double ref = cfg.free_evolution->phases[cls.members.front()];
    for (int i : cls.members) {
      if (cfg.free_evolution->phases[i] != ref) return false;
    }
  }
  return true;
}

ComplexMatrix normalized_block(const ComplexMatrix& theta, const DegeneracyClass& cls,
                               double weight) {
  const int n = cls.dimension;
  ComplexMatrix block(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      block(a, b) = theta(cls.members[a], cls.members[b]) / weight;
    }
  }
  return block;
}

struct ConvergenceTracker {
  int candidate = -1;
  int since = -1;

  void observe(const RealVector& weights, double epsilon, int step) {
    int best = 0;
    for (int k = 1; k < weights.size(); ++k) {
      if (weights[k] > weights[best]) best = k;
    }
    if (weights[best] >= 1.0 - epsilon) {
      if (candidate != best) {
        candidate = best;
        since = step;
      }
    } else {
      candidate = -1;
      since = -1;
    }
  }
};

int default_thread_count(int requested) {
  int threads = requested;
  if (threads <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    threads = hw == 0 ? 1 : static_cast<int>(hw);
  }
  if (const char* env = std::getenv("QND_WALK_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1 && threads > cap) threads = cap;
  }
  return threads < 1 ? 1 : threads;
}

}  // namespace

TrajectoryRecord run_trajectory(const TrajectoryConfig& cfg) {
  const auto classes = build_degeneracy_classes(cfg.observable);
  validate_config(cfg, classes);

  const int d = cfg.observable.dim();
  const bool discrete = std::holds_alternative<DiscreteModel>(cfg.model);
  const auto* base_model = discrete ? &std::get<DiscreteModel>(cfg.model) : nullptr;
  const auto* gaussian = discrete ? nullptr : &std::get<GaussianModel>(cfg.model);

  RngStream rng(cfg.seed, cfg.trajectory_index);
  ComplexMatrix state = cfg.initial_state.matrix();

  TrajectoryRecord rec;
  rec.seed = cfg.seed;
  rec.trajectory_index = cfg.trajectory_index;
  rec.n_steps = cfg.n_steps;
  rec.record_stride = cfg.record_stride;
  rec.convergence_epsilon = cfg.convergence_epsilon;
  rec.final_state = cfg.initial_state;
  rec.initial_class_weights = class_weights(cfg.initial_state, classes);
  rec.luders_distance = kNaN;

  // Reference blocks for the within-class invariance diagnostic.
  const bool track_blocks = block_tracking_applies(cfg, classes);
  std::vector<std::optional<ComplexMatrix>> block_refs(classes.size());
  if (track_blocks) {
    for (std::size_t k = 0; k < classes.size(); ++k) {
      const double w = rec.initial_class_weights[static_cast<Eigen::Index>(k)];
      if (w >= kBlockTrackFloor && classes[k].dimension > 1) {
        block_refs[k] = normalized_block(state, classes[k], w);
      }
    }
  }
  double max_drift = track_blocks ? 0.0 : kNaN;

  ConvergenceTracker tracker;
  tracker.observe(rec.initial_class_weights, cfg.convergence_epsilon, 0);

  const int psd_stride = d <= 2 ? 1 : 16;
  double log_joint = 0.0;

  for (int n = 1; n <= cfg.n_steps; ++n) {
    int outcome_index = -1;
    double outcome_value = kNaN;
    double log_cond;

    if (discrete) {
      const DiscreteModel& model =
          cfg.model_schedule.empty()
              ? *base_model
              : cfg.model_schedule[static_cast<std::size_t>(n - 1) % cfg.model_schedule.size()];
      const DensityMatrix current = DensityMatrix::unchecked(state);
      const RealVector probs = outcome_distribution(current, model);
      outcome_index = rng.sample_discrete(probs);
      auto result = apply_measurement(current, model, outcome_index);
      log_cond = std::log(result.probability);
      state = result.state.matrix();
      rec.outcome_indices.push_back(outcome_index);
    } else {
      const DensityMatrix current = DensityMatrix::unchecked(state);
      outcome_value = sample_outcome(current, *gaussian, rng);
      log_cond = log_outcome_density(current, *gaussian, outcome_value);
      auto result = apply_gaussian(current, *gaussian, outcome_value);
      state = result.state.matrix();
      rec.outcome_values.push_back(outcome_value);
    }
    log_joint += log_cond;

    if (cfg.free_evolution) {
      const auto& fe = *cfg.free_evolution;
      const double tau = fe.tau_schedule.empty()
                             ? fe.tau
                             : fe.tau_schedule[static_cast<std::size_t>(n - 1) %
                                               fe.tau_schedule.size()];
      state = apply_free_evolution(DensityMatrix::unchecked(state), fe.phases, tau).matrix();
    }

    // Drift hygiene: re-Hermitize and rescale the trace each step.
    state = (0.5 * (state + state.adjoint().eval())).eval();
    state /= state.trace().real();
    if (n % psd_stride == 0 || n == cfg.n_steps) {
      const double min_eval = min_hermitian_eigenvalue(state);
      if (min_eval < -cfg.psd_abort_tolerance) {
        std::ostringstream os;
        os << "trajectory " << cfg.trajectory_index << " step " << n
           << ": state lost positivity, min eigenvalue " << min_eval;
        throw NumericalError(os.str());
      }
    }

    const DensityMatrix current = DensityMatrix::unchecked(state);
    const RealVector weights = class_weights(current, classes);
    tracker.observe(weights, cfg.convergence_epsilon, n);

    if (track_blocks) {
      for (std::size_t k = 0; k < classes.size(); ++k) {
        if (!block_refs[k]) continue;
        const double w = weights[static_cast<Eigen::Index>(k)];
        if (w < kBlockTrackFloor) continue;
        const double drift =
            (normalized_block(state, classes[k], w) - *block_refs[k]).cwiseAbs().maxCoeff();
        if (drift > max_drift) max_drift = drift;
      }
    }

    if (n % cfg.record_stride == 0 || n == cfg.n_steps) {
      StepRecord sr;
      sr.step = n;
      sr.outcome_index = outcome_index;
      sr.outcome_value = outcome_value;
      sr.log_conditional = log_cond;
      sr.class_weights = weights;
      sr.purity = state.squaredNorm();
      if (cfg.record_offdiag) sr.offdiag_magnitudes = state.cwiseAbs();
      rec.steps.push_back(std::move(sr));
    }
  }

  rec.final_state = DensityMatrix::unchecked(std::move(state));
  rec.log_joint_probability = log_joint;
  rec.max_block_drift = max_drift;

  if (tracker.candidate >= 0) {
    rec.converged_class = tracker.candidate;
    rec.converged_at = tracker.since;
    const auto block = project_block(cfg.initial_state, classes[tracker.candidate].projector);
    rec.luders_distance =
        block.state ? trace_distance(rec.final_state, *block.state) : kNaN;
  }
  return rec;
}

std::vector<TrajectoryRecord> run_ensemble(const TrajectoryConfig& base, int n_trajectories,
                                           int threads) {
  if (n_trajectories < 1) throw ValidationError("run_ensemble: need at least one trajectory");
  // Validate once up front so config errors surface before any thread spawns.
  validate_config(base, build_degeneracy_classes(base.observable));

  const int n_workers = std::min(default_thread_count(threads), n_trajectories);
  std::vector<std::optional<TrajectoryRecord>> slots(n_trajectories);
  std::vector<std::pair<int, std::string>> failures;
  std::mutex failure_mutex;
  std::atomic<int> next{0};

  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_trajectories) return;
      try {
        TrajectoryConfig cfg = base;
        cfg.trajectory_index = base.trajectory_index + static_cast<std::uint64_t>(i);
        slots[i] = run_trajectory(cfg);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failures.emplace_back(i, e.what());
      }
    }
  };

  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (!failures.empty()) {
    std::sort(failures.begin(), failures.end());
    std::ostringstream os;
    os << "run_ensemble: " << failures.size() << " trajectory(ies) failed:";
    for (const auto& [idx, msg] : failures) os << " [" << idx << ": " << msg << "]";
    throw NumericalError(os.str());
  }

  std::vector<TrajectoryRecord> out;
  out.reserve(n_trajectories);
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

DensityMatrix product_form_state(const TrajectoryRecord& record, const DensityMatrix& theta0,
                                 const DiscreteModel& model,
                                 const std::vector<DegeneracyClass>& classes) {
  if (record.outcome_indices.empty()) {
    throw ValidationError("product_form_state: record has no discrete outcomes");
  }
  const int d = model.dim();
  if (theta0.dim() != d) throw ValidationError("product_form_state: dimension mismatch");

  // Per-class amplitude product g_k = prod_j lambda_{I_j}^k, in log magnitude
  // plus accumulated phase so long sequences cannot underflow.
  const int n_cls = static_cast<int>(classes.size());
  RealVector log_mag = RealVector::Zero(n_cls);
  RealVector phase = RealVector::Zero(n_cls);
  std::vector<bool> dead(n_cls, false);
  for (int outcome : record.outcome_indices) {
    for (int k = 0; k < n_cls; ++k) {
      if (dead[k]) continue;
      const Complex lam = model.lambda(outcome, classes[k].members.front());
      const double mag = std::abs(lam);
      if (mag == 0.0) {
        dead[k] = true;
        continue;
      }
      log_mag[k] += std::log(mag);
      phase[k] += std::arg(lam);
    }
  }

  double shift = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_cls; ++k) {
    if (!dead[k]) shift = std::max(shift, log_mag[k]);
  }
  if (!std::isfinite(shift)) {
    throw NumericalError("product_form_state: every class amplitude vanished");
  }
  ComplexVector g(n_cls);
  for (int k = 0; k < n_cls; ++k) {
    g[k] = dead[k] ? Complex(0.0, 0.0)
                   : std::polar(std::exp(log_mag[k] - shift), phase[k]);
  }

  std::vector<int> class_of(d);
  for (const auto& cls : classes) {
    for (int i : cls.members) class_of[i] = cls.label;
  }
  ComplexMatrix out(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      out(i, j) = g[class_of[i]] * std::conj(g[class_of[j]]) * theta0.entry(i, j);
    }
  }
  const double tr = out.trace().real();
  if (!(tr > 0.0)) throw NumericalError("product_form_state: vanishing joint weight");
  out /= tr;
  out = 0.5 * (out + out.adjoint().eval());
  return DensityMatrix::unchecked(std::move(out));
}

double JointEnumeration::total() const {
  double acc = 0.0;
  for (double p : probabilities) acc += p;
  return acc;
}

std::vector<int> JointEnumeration::decode(std::size_t index) const {
  std::vector<int> seq(n_steps);
  for (int j = 0; j < n_steps; ++j) {
    seq[j] = static_cast<int>(index % n_outcomes);
    index /= n_outcomes;
  }
  return seq;
}

double JointEnumeration::probability_of(const std::vector<int>& sequence) const {
  if (static_cast<int>(sequence.size()) != n_steps) {
    throw ValidationError("JointEnumeration: sequence length mismatch");
  }
  std::size_t index = 0;
  std::size_t stride = 1;
  for (int j = 0; j < n_steps; ++j) {
    if (sequence[j] < 0 || sequence[j] >= n_outcomes) {
      throw ValidationError("JointEnumeration: outcome out of range");
    }
    index += stride * static_cast<std::size_t>(sequence[j]);
    stride *= static_cast<std::size_t>(n_outcomes);
  }
  return probabilities[index];
}

JointEnumeration joint_probability_exact(const DiscreteModel& model,
                                         const std::vector<DegeneracyClass>& classes,
                                         const DensityMatrix& theta0, int n_steps) {
  if (n_steps < 1) throw ValidationError("joint_probability_exact: need n >= 1");
  const int n_out = model.n_outcomes();
  double size = 1.0;
  for (int j = 0; j < n_steps; ++j) size *= n_out;
  if (size > 1e6) {
    throw ValidationError("joint_probability_exact: enumeration larger than 10^6 sequences");
  }

  const RealVector weights = class_weights(theta0, classes);
  const int n_cls = static_cast<int>(classes.size());

  // |lambda_I^kbar|^2 per outcome and class.
  RealMatrix lam2(n_out, n_cls);
  for (int k = 0; k < n_cls; ++k) {
    lam2.col(k) = model.lambda.col(classes[k].members.front()).cwiseAbs2();
  }

  JointEnumeration joint;
  joint.n_steps = n_steps;
  joint.n_outcomes = n_out;
  joint.probabilities.assign(static_cast<std::size_t>(size), 0.0);

  // DFS with incremental per-class products; sequences land at
  // index = sum_j s_j K^(j-1).
  RealVector prod = RealVector::Ones(n_cls);
  auto recurse = [&](auto&& self, int depth, std::size_t index, std::size_t stride) -> void {
    if (depth == n_steps) {
      joint.probabilities[index] = prod.dot(weights);
      return;
    }
    const RealVector saved = prod;
    for (int s = 0; s < n_out; ++s) {
      prod = saved.cwiseProduct(lam2.row(s).transpose());
      self(self, depth + 1, index + stride * static_cast<std::size_t>(s),
           stride * static_cast<std::size_t>(n_out));
    }
    prod = saved;
  };
  recurse(recurse, 0, 0, 1);
  return joint;
}

DensityMatrix apply_free_evolution(const DensityMatrix& theta, const std::vector<double>& phases,
                                   double tau) {
  const int d = theta.dim();
  if (static_cast<int>(phases.size()) != d) {
    throw ValidationError("apply_free_evolution: one phase per basis index required");
  }
  ComplexMatrix out = theta.matrix();
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      out(i, j) *= std::polar(1.0, (phases[i] - phases[j]) * tau);
    }
  }
  return DensityMatrix::unchecked(std::move(out));
}

std::optional<ConvergenceInfo> detect_convergence(const TrajectoryRecord& record,
                                                  const DensityMatrix& theta0,
                                                  const std::vector<DegeneracyClass>& classes,
                                                  double epsilon) {
  if (!(epsilon > 0.0)) throw ValidationError("detect_convergence: epsilon must be > 0");

  ConvergenceTracker tracker;
  tracker.observe(record.initial_class_weights, epsilon, 0);
  for (const auto& sr : record.steps) {
    tracker.observe(sr.class_weights, epsilon, sr.step);
  }
  if (tracker.candidate < 0) return std::nullopt;

  ConvergenceInfo info;
  info.class_label = tracker.candidate;
  info.step = tracker.since;
  const auto block = project_block(theta0, classes[tracker.candidate].projector);
  info.luders_distance =
      block.state ? trace_distance(record.final_state, *block.state) : kNaN;
  return info;
}

}  // namespace qnd
