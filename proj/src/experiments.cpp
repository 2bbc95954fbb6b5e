#include "stam/analysis.hpp"
#include "stam/cli.hpp"
#include "stam/format.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace stam::cli {

namespace {

using Json = nlohmann::ordered_json;

// A named pass/fail verdict. Convergence checks can be waived with
// --allow-unconverged; the others cannot.
struct Check {
  std::string name;
  bool passed;
  bool convergence;
};

struct Outcome {
  Json summary;
  std::vector<Check> checks;
  std::map<std::string, std::string> files;
};

Json audit_json(const AuditReport& a) {
  Json j;
  j["dim"] = a.dim;
  j["dim_doubled"] = a.dim_doubled;
  j["fidelity"] = a.fidelity;
  j["fidelity_doubled"] = a.fidelity_doubled;
  j["delta"] = a.delta;
  j["passed"] = a.passed;
  return j;
}

// Runs the doubled-dimension audit reusing the fidelity already computed at dim.
AuditReport audit_against(double fidelity_at_dim, int dim, const std::function<double(int)>& run) {
  return convergence_audit([&](int d) { return d == dim ? fidelity_at_dim : run(d); }, dim);
}

std::string trace_csv(const TraceRecorder& rec) {
  std::ostringstream os;
  rec.write_csv(os);
  return os.str();
}

// --dim has already been folded into the config.
int dim_of(const Config& c, std::optional<int> fallback = std::nullopt) {
  const int d = fallback ? c.integer("dim", *fallback) : c.integer("dim");
  if (d < 2) throw ConfigError(c.scope() + ".dim: need at least 2 levels");
  return d;
}

int pulses_of(const Config& c) {
  const int n = c.integer("n_pulses");
  if (n < 1) throw ConfigError(c.scope() + ".n_pulses: must be >= 1");
  return n;
}

// -- stam-boson ---------------------------------------------------------------

struct BosonRun {
  StateVector final;
  TraceRecorder recorder;
  double total_time;
};

Outcome stam_boson(const Config& c, const RunOptions&) {
  const int J = c.integer("J", 1);
  const Complex eps = c.complex("epsilon", 1.0);
  const double theta = c.number("theta");
  const int n = pulses_of(c);
  const double omega = c.angular_frequency("omega_c_hz");
  const int dim = dim_of(c);
  const int padding = c.integer("padding", -1);
  const bool composite = c.flag("composite", false);
  const int samples = c.integer("samples", 20);
  const bool audit = c.flag("audit", true);
  const bool instantaneous = c.flag("instantaneous", true);
  const double min_fidelity = c.number("min_fidelity", 1.0 - 1e-6);
  c.reject_unused();
  if (J < 1) throw ConfigError(c.scope() + ".J: must be >= 1");

  const StamPlan plan = make_plan(J, eps, theta, n, omega);
  const MultiSqueezeSpec spec = plan.spec();

  auto run = [&](int d, bool trace) {
    const FockSpace space(d, omega);
    const StateVector target = adiabatic_state(space, spec, theta);
    const double leak = edge_weight(target, std::max(2 * J, d / 10));
    if (J >= 3 && leak > 1e-10)
      throw ConfigError(c.scope() + ".dim: target state leaks " + format_double(leak) +
                        " onto the top levels; J >= 3 needs a small |theta epsilon| or more levels");
    TraceTargets tt;
    tt.target = target;
    if (trace) {
      if (instantaneous) tt.instantaneous = [&, space](double l) { return adiabatic_state(space, spec, l); };
      tt.checkpoint = [&, space](int k) { return adiabatic_state(space, spec, plan.checkpoints[k]); };
    }
    TraceRecorder rec(tt);
    const PulseSequence seq = build_boson_sequence(plan, space, composite, {}, padding);
    StateVector out = run_sequence(seq, fock_state(space, 0), trace ? rec.observer() : Observer{},
                                   trace ? samples : 0);
    return std::make_pair(BosonRun{out, rec, seq.total_time()}, fidelity(target, out));
  };

  auto [main, f] = run(dim, true);
  Outcome r;
  Json& s = r.summary;
  s["final_fidelity"] = f;
  s["min_checkpoint_fidelity"] = main.recorder.min_checkpoint_fidelity();
  s["checkpoint_fidelities"] = main.recorder.checkpoint_fidelities();
  s["final_norm"] = main.final.norm();
  s["total_time_us"] = main.total_time * 1e6;
  r.checks.push_back({"final_fidelity", f >= min_fidelity, false});
  r.checks.push_back({"checkpoint_fidelity", main.recorder.min_checkpoint_fidelity() >= min_fidelity, false});
  if (audit) {
    const AuditReport a = audit_against(f, dim, [&](int d) { return run(d, false).second; });
    s["convergence_audit"] = audit_json(a);
    r.checks.push_back({"convergence_audit", a.passed, true});
  }
  r.files["trace.csv"] = trace_csv(main.recorder);
  r.files["plan.json"] = plan_json(plan) + "\n";
  return r;
}

// -- adiabatic-sweep ----------------------------------------------------------

Outcome adiabatic_sweep(const Config& c, const RunOptions&) {
  const int J = c.integer("J", 1);
  const Complex eps = c.complex("epsilon", 1.0);
  Schedule sched;
  sched.A = c.number("A");
  sched.B = c.number("B");
  sched.C = c.number("C");
  sched.T = c.number("T_us") * 1e-6;
  const double omega = c.angular_frequency("omega_c_hz");
  const int dim = dim_of(c);
  const int padding = c.integer("padding", -1);
  const long steps = c.integer("steps", 1000);
  const double step_tol = c.number("step_tolerance", 1e-6);
  const int doublings = c.integer("max_doublings", 12);
  const int samples = c.integer("samples", 200);
  const bool audit = c.flag("audit", true);
  const std::optional<double> min_fidelity = c.optional_number("min_fidelity");
  c.reject_unused();
  sched.validate();
  if (steps < 1) throw ConfigError(c.scope() + ".steps: must be >= 1");

  const MultiSqueezeSpec spec{J, eps};
  const double theta = sched.end_value();

  auto builder_for = [&](const FockSpace& space) -> HamiltonianBuilder {
    return [space, spec, padding](double l) { return multi_squeeze_hamiltonian(space, spec, l, padding); };
  };

  const FockSpace space(dim, omega);
  const StateVector target = adiabatic_state(space, spec, theta);
  TraceTargets tt;
  tt.target = target;
  tt.instantaneous = [&](double l) { return adiabatic_state(space, spec, l); };
  TraceRecorder rec(tt);
  const ScheduleResult res = propagate_schedule_converged(builder_for(space), sched, fock_state(space, 0), steps,
                                                          step_tol, doublings, rec.observer(), samples);
  const double f = fidelity(target, res.state);

  Outcome r;
  Json& s = r.summary;
  s["theta_end"] = theta;
  s["final_fidelity"] = f;
  s["final_norm"] = res.state.norm();
  s["total_time_us"] = sched.T * 1e6;
  s["steps"] = res.steps;
  s["step_difference"] = res.difference;
  if (min_fidelity) r.checks.push_back({"final_fidelity", f >= *min_fidelity, false});
  if (audit) {
    const AuditReport a = audit_against(f, dim, [&](int d) {
      const FockSpace sp(d, omega);
      const StateVector out = propagate_schedule(builder_for(sp), sched, fock_state(sp, 0), res.steps);
      return fidelity(adiabatic_state(sp, spec, theta), out);
    });
    s["convergence_audit"] = audit_json(a);
    r.checks.push_back({"convergence_audit", a.passed, true});
  }
  r.files["trace.csv"] = trace_csv(rec);
  return r;
}

// -- hybrid-cat ---------------------------------------------------------------

Outcome hybrid_cat_experiment(const Config& c, const RunOptions&) {
  const double theta = c.number("theta");
  const int n = pulses_of(c);
  const double omega = c.angular_frequency("omega_c_hz");
  const int dim = dim_of(c);
  const int samples = c.integer("samples", 20);
  const bool audit = c.flag("audit", true);
  const double min_fidelity = c.number("min_fidelity", 1.0 - 1e-6);
  const double entropy_tol = c.number("entropy_tolerance", 1e-3);
  c.reject_unused();

  const StamPlan plan = make_plan(1, 1.0, theta, n, omega);
  auto run = [&](int d, TraceRecorder* rec) {
    const FockSpace space(d, omega);
    const PulseSequence seq = build_hybrid_sequence(theta, n, space);
    const StateVector start = tensor_qubit(Eigen::Vector2cd(1.0, 0.0), fock_state(space, 0));
    return run_sequence(seq, start, rec ? rec->observer() : Observer{}, rec ? samples : 0);
  };

  const FockSpace space(dim, omega);
  TraceTargets tt;
  tt.target = hybrid_cat(space, theta);
  tt.checkpoint = [&](int k) { return hybrid_cat(space, plan.checkpoints[k]); };
  TraceRecorder rec(tt);
  const StateVector out = run(dim, &rec);
  const double f = fidelity(*tt.target, out);
  const double entropy = entanglement_entropy(out);
  const double closed = cat_entropy(theta);

  Outcome r;
  Json& s = r.summary;
  s["final_fidelity"] = f;
  s["min_checkpoint_fidelity"] = rec.min_checkpoint_fidelity();
  s["final_entropy"] = entropy;
  s["final_entropy_boson_side"] = boson_entropy(out);
  s["entropy_closed_form"] = closed;
  s["initial_entropy"] = rec.rows().front().entropy.value_or(0.0);
  s["final_norm"] = out.norm();
  s["total_time_us"] = plan.t_p * n * 1e6;
  r.checks.push_back({"final_fidelity", f >= min_fidelity, false});
  r.checks.push_back({"final_entropy", std::abs(entropy - 1.0) <= entropy_tol, false});
  if (audit) {
    const AuditReport a = audit_against(f, dim, [&](int d) {
      return fidelity(hybrid_cat(FockSpace(d, omega), theta), run(d, nullptr));
    });
    s["convergence_audit"] = audit_json(a);
    r.checks.push_back({"convergence_audit", a.passed, true});
  }
  r.files["trace.csv"] = trace_csv(rec);
  r.files["plan.json"] = plan_json(plan) + "\n";
  return r;
}

// -- amplified-cat ------------------------------------------------------------

AmplifiedOptions amplified_options(const Config& c) {
  AmplifiedOptions a;
  a.lambda = c.number("lambda");
  a.n_pulses = pulses_of(c);
  a.omega_c = c.angular_frequency("omega_c_hz");
  a.Omega = c.angular_frequency("Omega_hz");
  a.delta = c.number("delta_qubit", 0.0);
  a.coupling_during_flip = c.flag("coupling_during_flip", true);
  a.alternate_ctrl_sign = c.flag("alternate_ctrl_sign", true);
  a.synchronized = c.flag("synchronized", true);
  a.instantaneous_flip = c.flag("instantaneous_flip", false);
  return a;
}

Outcome amplified_cat(const Config& c, const RunOptions&) {
  const AmplifiedOptions a = amplified_options(c);
  const int dim = dim_of(c);
  const int samples = c.integer("samples", 4);
  const bool audit = c.flag("audit", true);
  const std::optional<double> min_fidelity = c.optional_number("min_fidelity");
  c.reject_unused();

  const double theta = 2.0 * a.n_pulses * a.lambda;
  const FockSpace space(dim, a.omega_c);
  TraceTargets tt;
  tt.target = hybrid_cat(space, theta);
  tt.checkpoint = [&](int k) { return hybrid_cat(space, 2.0 * k * a.lambda); };
  TraceRecorder rec(tt);
  const PulseSequence seq = build_amplified_sequence(space, a);
  const StateVector start = tensor_qubit(Eigen::Vector2cd(1.0, 0.0), fock_state(space, 0));
  const StateVector out = run_sequence(seq, start, rec.observer(), samples);
  const double f = fidelity(*tt.target, out);

  Outcome r;
  Json& s = r.summary;
  s["theta"] = theta;
  s["final_fidelity"] = f;
  s["amplitude_fidelity"] = std::sqrt(f);
  s["min_checkpoint_fidelity"] = rec.min_checkpoint_fidelity();
  s["final_entropy"] = entanglement_entropy(out);
  s["final_norm"] = out.norm();
  s["total_time_us"] = seq.total_time() * 1e6;
  if (min_fidelity) r.checks.push_back({"final_fidelity", f >= *min_fidelity, false});
  if (audit) {
    const AuditReport rep = audit_against(f, dim, [&](int d) { return amplified_fidelity(FockSpace(d, a.omega_c), a); });
    s["convergence_audit"] = audit_json(rep);
    r.checks.push_back({"convergence_audit", rep.passed, true});
  }
  r.files["trace.csv"] = trace_csv(rec);
  return r;
}

// -- robustness scans ---------------------------------------------------------

Outcome robustness_boson(const Config& c, const RunOptions& o) {
  BosonScanSpec b;
  b.theta = c.number("theta");
  b.omega_c = c.angular_frequency("omega_c_hz");
  b.dim = dim_of(c, 64);
  b.n_pulses = c.integers("n_pulses", {5, 10, 20});
  if (o.pulses) b.n_pulses = {*o.pulses};
  b.errors = cross_grid(c.numbers("deltas", {-0.02, -0.01, 0.0, 0.01, 0.02}));
  b.hybrid = c.flag("hybrid", true);
  const double slack = c.number("trend_slack", 1e-9);
  const double exact = c.number("min_fidelity_exact", 1.0 - 1e-6);
  c.reject_unused();

  const ScanResult res = robustness_scan_boson(b);
  std::vector<int> ns = b.n_pulses;
  std::sort(ns.begin(), ns.end());

  bool trend = true, zero_ok = true, all_conv = true;
  double zero_min = 1.0;
  int unconverged = 0;
  for (const auto& e : b.errors) {
    for (std::size_t i = 1; i < ns.size(); ++i)
      if (res.at(e.delta_lambda, e.delta_omega, ns[i]).fidelity <
          res.at(e.delta_lambda, e.delta_omega, ns[i - 1]).fidelity - slack)
        trend = false;
  }
  for (const auto& cell : res.cells) {
    if (!cell.converged) {
      all_conv = false;
      ++unconverged;
    }
    if (cell.delta_lambda == 0.0 && cell.delta_omega == 0.0) {
      zero_min = std::min(zero_min, cell.fidelity);
      if (cell.fidelity < exact) zero_ok = false;
    }
  }

  Outcome r;
  Json& s = r.summary;
  s["cells"] = res.cells.size();
  s["unconverged_cells"] = unconverged;
  s["min_fidelity_at_zero_error"] = zero_min;
  s["trend_nondecreasing_in_n"] = trend;
  r.checks.push_back({"trend_nondecreasing_in_n", trend, false});
  r.checks.push_back({"zero_error_fidelity", zero_ok, false});
  r.checks.push_back({"cells_converged", all_conv, true});
  std::ostringstream os;
  res.write_csv(os);
  r.files["scan.csv"] = os.str();
  return r;
}

Outcome robustness_qubit(const Config& c, const RunOptions& o) {
  QubitScanSpec q;
  q.lambda = c.number("lambda");
  q.omega_c = c.angular_frequency("omega_c_hz");
  q.Omega = c.angular_frequency("Omega_hz");
  q.dim = dim_of(c, 96);
  q.n_pulses = c.integers("n_pulses", {10, 20, 50});
  if (o.pulses) q.n_pulses = {*o.pulses};
  q.deltas = c.numbers("deltas", {-0.25, -0.1, 0.0, 0.1, 0.25});
  q.coupling_during_flip = c.flag("coupling_during_flip", true);
  q.alternate_ctrl_sign = c.flag("alternate_ctrl_sign", true);
  const std::optional<double> min_fidelity = c.optional_number("min_fidelity");
  c.reject_unused();

  const QubitScanResult res = robustness_scan_qubit(q);
  double fmin = 1.0;
  int unconverged = 0;
  for (const auto& cell : res.cells) {
    fmin = std::min(fmin, cell.fidelity);
    if (!cell.converged) ++unconverged;
  }
  Outcome r;
  Json& s = r.summary;
  s["cells"] = res.cells.size();
  s["unconverged_cells"] = unconverged;
  s["min_fidelity"] = fmin;
  s["min_amplitude_fidelity"] = std::sqrt(fmin);
  if (min_fidelity) r.checks.push_back({"min_fidelity", fmin >= *min_fidelity, false});
  r.checks.push_back({"cells_converged", unconverged == 0, true});
  std::ostringstream os;
  res.write_csv(os);
  r.files["scan.csv"] = os.str();
  return r;
}

// -- trajectory ---------------------------------------------------------------

Outcome trajectory(const Config& c, const RunOptions&) {
  const Complex eps = c.complex("epsilon", 1.0);
  const double theta = c.number("theta");
  const int n = pulses_of(c);
  const double omega = c.angular_frequency("omega_c_hz");
  const int dim = dim_of(c);
  const int samples = c.integer("samples", 50);
  const double tol = c.number("trajectory_tolerance", 1e-6);
  c.reject_unused();

  const StamPlan plan = make_plan(1, eps, theta, n, omega);
  const FockSpace space(dim, omega);
  TraceTargets tt;
  tt.target = coherent_state(space, theta * eps);
  TraceRecorder rec(tt);
  double worst = 0.0;
  auto observer = [&](const Sample& smp) {
    rec.record(smp);
    // The sample that closes pulse k belongs to it, not to pulse k + 1.
    const int k = std::max(smp.segment, 0);
    const double dt = smp.t - k * plan.t_p;
    const Complex expect = smp.segment < 0 ? Complex(0.0)
                                           : coherent_trajectory_analytic(plan.checkpoints[k], plan.lambdas[k],
                                                                          eps, omega, dt);
    worst = std::max(worst, std::abs(expect_a(smp.state) - expect));
  };
  const PulseSequence seq = build_boson_sequence(plan, space);
  const StateVector out = run_sequence(seq, fock_state(space, 0), observer, samples);

  Outcome r;
  Json& s = r.summary;
  s["final_fidelity"] = fidelity(*tt.target, out);
  s["max_trajectory_error"] = worst;
  s["final_norm"] = out.norm();
  s["total_time_us"] = seq.total_time() * 1e6;
  r.checks.push_back({"trajectory", worst <= tol, false});
  r.files["trace.csv"] = trace_csv(rec);
  r.files["plan.json"] = plan_json(plan) + "\n";
  return r;
}

// -- decomposition-audit ------------------------------------------------------

Outcome decomposition_audit(const Config& c, const RunOptions&) {
  const int J = c.integer("J", 1);
  const Complex eps = c.complex("epsilon", 1.0);
  const double theta = c.number("theta");
  const int n = pulses_of(c);
  const double omega = c.angular_frequency("omega_c_hz");
  const int dim = dim_of(c);
  const int interior = c.integer("interior", dim / 8);
  const double ck_tol = c.number("checkpoint_tolerance", 1e-6);
  const double mid_min = c.number("mid_pulse_threshold", 1e-2);
  const int sign_max = c.integer("sign_check_max", 1000);
  c.reject_unused();
  if (dim > 512) throw ConfigError(c.scope() + ".dim: dense audit limited to 512 levels");
  if (interior < 1 || interior > dim) throw ConfigError(c.scope() + ".interior: must lie in [1, dim]");
  if (sign_max < 1) throw ConfigError(c.scope() + ".sign_check_max: must be >= 1");

  const StamPlan plan = make_plan(J, eps, theta, n, omega);
  const FockSpace space(dim, omega);
  const PulseSequence seq = build_boson_sequence(plan, space);
  Matrix u = Matrix::Identity(dim, dim);
  std::vector<double> at_checkpoint, mid_pulse;
  for (int k = 0; k < n; ++k) {
    const Matrix half = propagator_dense(*seq.segments[k].hamiltonian, 0.5 * plan.t_p);
    const Matrix mid = half * u;
    mid_pulse.push_back(
        adiabatic_decomposition(mid, plan.lambdas[k], (k + 0.5) * plan.t_p, space, plan.spec(), interior).distance);
    u = half * mid;
    at_checkpoint.push_back(
        adiabatic_decomposition(u, plan.checkpoints[k + 1], (k + 1) * plan.t_p, space, plan.spec(), interior)
            .distance);
  }
  bool signs = true;
  for (int m = 1; m <= sign_max && signs; ++m) signs = sign_cancellation_exact(m);

  const double ck_max = *std::max_element(at_checkpoint.begin(), at_checkpoint.end());
  const double mid_lo = *std::min_element(mid_pulse.begin(), mid_pulse.end());
  Outcome r;
  Json& s = r.summary;
  s["interior"] = interior;
  s["checkpoint_distances"] = at_checkpoint;
  s["mid_pulse_distances"] = mid_pulse;
  s["max_checkpoint_distance"] = ck_max;
  s["min_mid_pulse_distance"] = mid_lo;
  s["sign_integrals_vanish_up_to"] = sign_max;
  s["sign_integrals_vanish"] = signs;
  r.checks.push_back({"checkpoint_identity", ck_max <= ck_tol, false});
  r.checks.push_back({"mid_pulse_error", mid_lo > mid_min, false});
  r.checks.push_back({"sign_integrals", signs, false});
  r.files["plan.json"] = plan_json(plan) + "\n";
  return r;
}

using Runner = Outcome (*)(const Config&, const RunOptions&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> m = {
      {"stam-boson", stam_boson},
      {"adiabatic-sweep", adiabatic_sweep},
      {"hybrid-cat", hybrid_cat_experiment},
      {"amplified-cat", amplified_cat},
      {"robustness-boson", robustness_boson},
      {"robustness-qubit", robustness_qubit},
      {"trajectory", trajectory},
      {"decomposition-audit", decomposition_audit},
  };
  return m;
}

std::string manifest_text(const Config& c) {
  std::ostringstream os;
  c.write_manifest(os);
  return os.str();
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"stam-boson",       "adiabatic-sweep",  "hybrid-cat",
                                                 "amplified-cat",    "robustness-boson", "robustness-qubit",
                                                 "trajectory",       "decomposition-audit"};
  return names;
}

RunResult run_experiment(const std::string& experiment, Config config, const RunOptions& options) {
  RunResult out;
  const auto it = runners().find(experiment);
  if (it == runners().end()) {
    out.exit_code = kUsageError;
    out.message = "unknown experiment `" + experiment + "`";
    return out;
  }
  config.set_scope(experiment);
  if (options.dim) config.set("dim", std::to_string(*options.dim));
  if (options.pulses && experiment != "robustness-boson" && experiment != "robustness-qubit")
    config.set("n_pulses", std::to_string(*options.pulses));

  Json summary;
  summary["experiment"] = experiment;
  try {
    if (config.string("experiment", experiment) != experiment)
      throw ConfigError(experiment + ".experiment: config is for `" + config.string("experiment") + "`");
    Outcome r = it->second(config, options);
    bool failed = false;
    Json checks = Json::object();
    for (const auto& ch : r.checks) {
      checks[ch.name] = ch.passed;
      if (!ch.passed && !(ch.convergence && options.allow_unconverged)) failed = true;
    }
    summary["status"] = failed ? "acceptance_failure" : "ok";
    summary["allow_unconverged"] = options.allow_unconverged;
    summary["checks"] = checks;
    summary.update(r.summary);
    out.files = std::move(r.files);
    out.exit_code = failed ? kAcceptanceFailure : kOk;
    if (failed) {
      std::string names;
      for (const auto& ch : r.checks)
        if (!ch.passed) names += (names.empty() ? "" : ", ") + ch.name;
      out.message = "failed checks: " + names;
    }
  } catch (const ConfigError& e) {
    out.exit_code = kUsageError;
    out.message = e.what();
    return out;
  } catch (const std::invalid_argument& e) {
    out.exit_code = kUsageError;
    out.message = experiment + ": " + e.what();
    return out;
  } catch (const std::exception& e) {
    out.exit_code = kNumericalFailure;
    out.message = experiment + ": " + e.what();
    summary["status"] = "numerical_failure";
    summary["error"] = e.what();
    out.files.clear();
  }
  out.files["summary.json"] = summary.dump(2) + "\n";
  out.files["manifest.cfg"] = manifest_text(config);
  return out;
}

void write_artifacts(const RunResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, text] : result.files) {
    std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (std::filesystem::path(dir) / name).string());
    f << text;
  }
}

}  // namespace stam::cli
