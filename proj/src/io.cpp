// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#include "qnd/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace qnd {

std::string format_g17(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

Json complex_to_json(const Complex& z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_object() && j.contains("re")) {
    return Complex(j.at("re").get<double>(), j.value("im", 0.0));
  }
  throw ValidationError("config: complex entries must be numbers or {re, im} objects");
}

RealVector real_vector_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError(std::string("config: ") + what + " must be a non-empty array");
  }
  RealVector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

ObservableSpec observable_from_json(const Json& j) {
  ObservableSpec spec;
  spec.eigenvalues = real_vector_from_json(j.at("eigenvalues"), "eigenvalues");
  spec.degeneracy_tolerance = j.value("degeneracy_tolerance", 1e-9);
  if (j.contains("dim") && j.at("dim").get<int>() != spec.dim()) {
    throw ValidationError("config: dim does not match the eigenvalue list");
  }
  return spec;
}

}  // namespace

Json model_to_json(const ObservableSpec& spec, const ModelVariant& model) {
  Json j;
  j["dim"] = spec.dim();
  j["eigenvalues"] = std::vector<double>(spec.eigenvalues.begin(), spec.eigenvalues.end());
  j["degeneracy_tolerance"] = spec.degeneracy_tolerance;
  if (const auto* dm = std::get_if<DiscreteModel>(&model)) {
    j["type"] = "discrete";
    j["outcomes"] = dm->outcomes;
    Json rows = Json::array();
    for (int I = 0; I < dm->n_outcomes(); ++I) {
      Json row = Json::array();
      for (int i = 0; i < dm->dim(); ++i) row.push_back(complex_to_json(dm->lambda(I, i)));
      rows.push_back(std::move(row));
    }
    j["lambda"] = std::move(rows);
  } else {
    j["type"] = "gaussian";
    j["delta"] = std::get<GaussianModel>(model).delta;
  }
  return j;
}

std::pair<ObservableSpec, ModelVariant> model_from_json(const Json& j) {
  const std::string type = j.value("type", "discrete");
  ObservableSpec spec = observable_from_json(j);
  if (type == "gaussian") {
    GaussianModel gm{spec, j.at("delta").get<double>()};
    return {spec, ModelVariant(std::move(gm))};
  }
  if (type != "discrete") throw ValidationError("config: unknown model type '" + type + "'");

  DiscreteModel dm;
  dm.outcomes = j.at("outcomes").get<std::vector<std::string>>();
  const Json& rows = j.at("lambda");
  if (!rows.is_array() || rows.size() != dm.outcomes.size()) {
    throw ValidationError("config: lambda must have one row per outcome");
  }
  dm.lambda.resize(static_cast<Eigen::Index>(rows.size()), spec.dim());
  for (std::size_t I = 0; I < rows.size(); ++I) {
    if (!rows[I].is_array() || static_cast<int>(rows[I].size()) != spec.dim()) {
      throw ValidationError("config: lambda rows must have one entry per basis index");
    }
    for (int i = 0; i < spec.dim(); ++i) {
      dm.lambda(static_cast<Eigen::Index>(I), i) = complex_from_json(rows[I][i]);
    }
  }
  return {spec, ModelVariant(std::move(dm))};
}

Json state_to_json(const DensityMatrix& theta) {
  Json rows = Json::array();
  for (int i = 0; i < theta.dim(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < theta.dim(); ++j) row.push_back(complex_to_json(theta.entry(i, j)));
    rows.push_back(std::move(row));
  }
  return Json{{"matrix", std::move(rows)}};
}

DensityMatrix state_from_json(const Json& j) {
  if (j.contains("pure")) {
    const Json& amp = j.at("pure");
    ComplexVector c(amp.size());
    for (std::size_t i = 0; i < amp.size(); ++i) {
      c[static_cast<Eigen::Index>(i)] = complex_from_json(amp[i]);
    }
    return density_from_pure(PureState(std::move(c)));
  }
  if (j.contains("diagonal")) {
    return DensityMatrix::diagonal(real_vector_from_json(j.at("diagonal"), "diagonal weights"));
  }
  if (j.contains("matrix")) {
    const Json& rows = j.at("matrix");
    const auto d = rows.size();
    ComplexMatrix m(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      if (rows[i].size() != d) throw ValidationError("config: state matrix must be square");
      for (std::size_t k = 0; k < d; ++k) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
            complex_from_json(rows[i][k]);
      }
    }
    return DensityMatrix::from_matrix(std::move(m));
  }
  throw ValidationError("config: initial_state needs one of pure/diagonal/matrix");
}

TrajectoryConfig RunConfig::trajectory_config() const {
  if (!initial_state) throw ValidationError("config: initial_state is required");
  TrajectoryConfig cfg{
      .observable = observable,
      .model = model,
      .initial_state = *initial_state,
      .n_steps = n_steps,
      .seed = seed,
      .trajectory_index = 0,
      .record_stride = record.stride,
      .convergence_epsilon = convergence_epsilon,
      .luders_delta = luders_delta,
      .free_evolution = free_evolution,
      .record_offdiag = record.offdiag,
  };
  return cfg;
}

RunConfig run_config_from_json(const Json& j) {
  RunConfig cfg;
  cfg.mode = j.value("mode", "simulate");

  auto [spec, model] = model_from_json(j.at("model"));
  cfg.observable = std::move(spec);
  cfg.model = std::move(model);

  if (j.contains("initial_state")) cfg.initial_state = state_from_json(j.at("initial_state"));

  cfg.n_steps = j.value("steps", 1);
  cfg.n_trajectories = j.value("trajectories", 1);
  if (!j.contains("seed")) {
    throw ValidationError("config: seed is required (runs never default to wall-clock)");
  }
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.out_dir = j.value("out", "out");

  if (j.contains("record")) {
    cfg.record.stride = j.at("record").value("stride", 1);
    cfg.record.offdiag = j.at("record").value("offdiag", false);
  }
  if (j.contains("free_evolution")) {
    const Json& fe = j.at("free_evolution");
    FreeEvolution evo;
    evo.phases = fe.at("phases").get<std::vector<double>>();
    evo.tau = fe.value("tau", 1.0);
    if (fe.contains("tau_schedule")) {
      evo.tau_schedule = fe.at("tau_schedule").get<std::vector<double>>();
    }
    cfg.free_evolution = std::move(evo);
  }
  cfg.convergence_epsilon = j.value("convergence_epsilon", 1e-6);
  cfg.luders_delta = j.value("luders_delta", 1e-5);
  cfg.alpha = j.value("alpha", 0.01);
  cfg.unconverged_cap = j.value("unconverged_cap", 0.01);
  cfg.ym_window = j.value("ym_window", 0);

  if (cfg.initial_state && cfg.initial_state->dim() != cfg.observable.dim()) {
    throw ValidationError("config: initial state dimension does not match the model");
  }
  return cfg;
}

Json run_config_to_json(const RunConfig& cfg) {
  Json j;
  j["mode"] = cfg.mode;
  j["model"] = model_to_json(cfg.observable, cfg.model);
  if (cfg.initial_state) j["initial_state"] = state_to_json(*cfg.initial_state);
  j["steps"] = cfg.n_steps;
  j["trajectories"] = cfg.n_trajectories;
  j["seed"] = cfg.seed;
  j["out"] = cfg.out_dir;
  j["record"] = Json{{"stride", cfg.record.stride}, {"offdiag", cfg.record.offdiag}};
  if (cfg.free_evolution) {
    Json fe;
    fe["phases"] = cfg.free_evolution->phases;
    fe["tau"] = cfg.free_evolution->tau;
    if (!cfg.free_evolution->tau_schedule.empty()) {
      fe["tau_schedule"] = cfg.free_evolution->tau_schedule;
    }
    j["free_evolution"] = std::move(fe);
  }
  j["convergence_epsilon"] = cfg.convergence_epsilon;
  j["luders_delta"] = cfg.luders_delta;
  j["alpha"] = cfg.alpha;
  j["unconverged_cap"] = cfg.unconverged_cap;
  j["ym_window"] = cfg.ym_window;
  return j;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ValidationError("config: JSON parse failure in '" + path + "': " + e.what());
  }
  return run_config_from_json(j);
}

void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRecord>& records,
                          const ModelVariant& model) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  const auto* dm = std::get_if<DiscreteModel>(&model);

  const int n_classes =
      records.empty() ? 0 : static_cast<int>(records.front().initial_class_weights.size());
  out << "traj,step,outcome,log_p";
  for (int k = 0; k < n_classes; ++k) out << ",theta_bar_" << k;
  out << ",purity,converged_class\n";

  for (const auto& rec : records) {
    for (const auto& sr : rec.steps) {
      out << rec.trajectory_index << ',' << sr.step << ',';
      if (dm && sr.outcome_index >= 0 &&
          sr.outcome_index < static_cast<int>(dm->outcomes.size())) {
        out << dm->outcomes[static_cast<std::size_t>(sr.outcome_index)];
      } else if (sr.outcome_index >= 0) {
        out << sr.outcome_index;
      } else {
        out << format_g17(sr.outcome_value);
      }
      out << ',' << format_g17(sr.log_conditional);
      for (int k = 0; k < n_classes; ++k) out << ',' << format_g17(sr.class_weights[k]);
      out << ',' << format_g17(sr.purity) << ',';
      if (rec.converged_class) out << *rec.converged_class;
      out << '\n';
    }
  }
}

void write_manifest(const std::string& path, const RunConfig& cfg) {
  write_json_file(path, run_config_to_json(cfg));
}

void write_histogram_csv(const std::string& path, const Histogram& histogram) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out << "bin_left,bin_right,count\n";
  for (std::size_t b = 0; b + 1 < histogram.edges.size(); ++b) {
    out << format_g17(histogram.edges[b]) << ',' << format_g17(histogram.edges[b + 1]) << ','
        << histogram.counts[b] << '\n';
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
}

bool VerificationSuite::all_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

Json verification_to_json(const VerificationSuite& suite) {
  Json checks = Json::array();
  for (const auto& c : suite.checks) {
    checks.push_back(Json{{"id", c.id},
                          {"property", c.property},
                          {"magnitude", c.magnitude},
                          {"tolerance", c.tolerance},
                          {"cases", c.cases},
                          {"pass", c.pass},
                          {"skipped", c.skipped}});
  }
  return Json{{"checks", std::move(checks)}, {"all_pass", suite.all_pass()}};
}

Json born_report_to_json(const BornTestReport& report) {
  Json classes = Json::array();
  for (const auto& c : report.classes) {
    classes.push_back(Json{{"class", c.class_label},
                           {"expected_fraction", c.expected_fraction},
                           {"observed_count", c.observed_count},
                           {"observed_fraction", c.observed_fraction},
                           {"binomial_z", c.binomial_z},
                           {"binomial_pass", c.binomial_pass}});
  }
  return Json{{"classes", std::move(classes)},
              {"n_converged", report.n_converged},
              {"n_unconverged", report.n_unconverged},
              {"chi_square", report.chi_square},
              {"dof", report.dof},
              {"p_value", report.p_value},
              {"zero_weight_violation", report.zero_weight_violation},
              {"alpha", report.alpha},
              {"bonferroni_alpha", report.bonferroni_alpha},
              {"pass", report.pass}};
}

Json luders_report_to_json(const std::vector<LudersClassDistance>& report, double gate) {
  Json classes = Json::array();
  bool pass = true;
  for (const auto& c : report) {
    const bool class_pass = c.count == 0 || c.max_distance <= gate;
    pass = pass && class_pass;
    classes.push_back(Json{{"class", c.class_label},
                           {"count", c.count},
                           {"max_trace_distance", c.max_distance},
                           {"pass", class_pass}});
  }
  return Json{{"classes", std::move(classes)}, {"gate", gate}, {"pass", pass}};
}

Json ym_report_to_json(const YmCompareReport& report) {
  Json clusters = Json::array();
  for (const auto& c : report.clusters) {
    clusters.push_back(Json{{"predicted_weight", c.predicted_weight},
                            {"observed_fraction", c.observed_fraction},
                            {"predicted_center", c.predicted_center},
                            {"observed_mean", c.observed_mean},
                            {"predicted_variance", c.predicted_variance},
                            {"observed_variance", c.observed_variance},
                            {"count", c.count},
                            {"weight_pass", c.weight_pass},
                            {"mean_pass", c.mean_pass},
                            {"variance_pass", c.variance_pass}});
  }
  return Json{{"clusters", std::move(clusters)},
              {"overlap_flagged", report.overlap_flagged},
              {"min_separation_sigmas", report.min_separation_sigmas},
              {"n_sigma", report.n_sigma},
              {"pass", report.pass}};
}

}  // namespace qnd
