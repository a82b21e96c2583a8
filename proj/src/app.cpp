#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>

#include "cmcbr/diagnostics.hpp"
#include "cmcbr/error.hpp"
#include "cmcbr/run_config.hpp"
#include "cmcbr/snapshot.hpp"

namespace cmcbr {

namespace {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

class CheckList {
 public:
  explicit CheckList(std::ostream& out) : out_(out) {}

  void add(std::string name, bool pass, const std::string& detail) {
    out_ << (pass ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
    ++total_;
    if (!pass) ++failed_;
  }
  void info(const std::string& name, const std::string& detail) { out_ << "INFO " << name << ": " << detail << '\n'; }

  int finish(std::string_view label) {
    out_ << label << ": " << (total_ - failed_) << "/" << total_ << " checks passed\n";
    return failed_ == 0 ? 0 : 1;
  }

 private:
  std::ostream& out_;
  int total_ = 0;
  int failed_ = 0;
};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

double rel_diff(double a, double b, double floor = 0.0) {
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

double mean_trace(const SliceState& s) { return coordinate_sum(trace(s.k, s.g)) / s.grid().coordinate_volume(); }

SolverOptions solver_options(const RunConfig& c) {
  SolverOptions o;
  o.tol = c.solver_tol;
  return o;
}

StepOptions step_options(const RunConfig& c) {
  StepOptions o;
  o.cfl = c.cfl;
  o.trace_correction = c.trace_correction;
  o.cmc_drift_tol = c.cmc_drift_tol;
  o.solver = solver_options(c);
  return o;
}

SliceState initial_state(const RunConfig& c) {
  CoordinateWarp warp;
  warp.amplitude = {c.warp, c.warp, c.warp};
  SliceState s = kasner_initial_data(c.kasner, c.t0, c.grid, warp);
  if (c.perturb_amplitude > 0.0) s = perturb(s, c.perturb_amplitude, c.seed, solver_options(c)).state;
  return s;
}

// Output goes to the configured file when there is one.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
    if (!*file_) raise(ErrorKind::SinkError, "cannot open output file '" + path + "'");
    stream_ = file_.get();
  }
  std::ostream& stream() { return *stream_; }
  void close() {
    if (!file_) return;
    file_->close();
    if (!*file_) raise(ErrorKind::SinkError, "failed to finish output file");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

double sup_abs_diff(const SymTensorField& a, const SymTensorField& b, const SymTensorField& g) {
  SymTensorField d = a;
  d += SymTensorField(b) *= -1.0;
  return sup_norm(d, g);
}

void check_rescale(CheckList& checks, const SliceState& s, double r, double lambda, const SolverOptions& solver,
                   bool resolve) {
  const std::string tag = "rescale[r=" + fmt(r) + "].";
  const SliceState q = rescale(s, RescaleFactor(r));

  checks.add(tag + "lapse_unchanged", q.lapse == s.lapse, "N' = N");

  const double h = mean_trace(s);
  const double hq = mean_trace(q);
  checks.add(tag + "mean_curvature", rel_diff(hq, r * h) <= 1e-12 && rel_diff(q.t, r * s.t) <= 1e-15,
             "H'/(rH) - 1 = " + fmt(hq / (r * h) - 1.0));

  const double k_ratio = sup_norm(s.k, s.g) / std::abs(s.t);
  const double k_ratio_q = sup_norm(q.k, q.g) / std::abs(q.t);
  checks.add(tag + "k_ratio_invariant", rel_diff(k_ratio, k_ratio_q) <= 1e-12,
             "k_ratio " + fmt(k_ratio) + " -> " + fmt(k_ratio_q));

  const SliceAnalysis a = analyze_slice(s);
  const SliceAnalysis aq = analyze_slice(q);
  const double e = br_energy(s, a);
  const double eq = br_energy(q, aq);
  const double volume = integrate(ScalarField(s.grid(), 1.0), s.g);
  const double floor = 1e-6 * r * std::pow(std::abs(s.t), 3) * volume;
  checks.add(tag + "energy_scales_as_r", rel_diff(eq, r * e, floor) <= 1e-10,
             "E_BR " + fmt(e) + " -> " + fmt(eq) + " (expected " + fmt(r * e) + ")");

  const double rc = curvature_radius(s, a);
  const double rcq = curvature_radius(q, aq);
  checks.add(tag + "curvature_radius_is_a_length", rel_diff(rcq, rc / r) <= 1e-10,
             "r_c " + fmt(rc) + " -> " + fmt(rcq) + " (expected " + fmt(rc / r) + ")");

  const SliceState back = rescale(q, RescaleFactor(1.0 / r));
  const double g_err = sup_abs_diff(back.g, s.g, s.g);
  const double k_err = sup_abs_diff(back.k, s.k, s.g) / std::max(sup_norm(s.k, s.g), 1e-300);
  checks.add(tag + "round_trip", g_err <= 1e-14 && k_err <= 1e-14 && rel_diff(back.t, s.t) <= 1e-15,
             "|g err| = " + fmt(g_err) + ", |K err|/|K| = " + fmt(k_err));

  if (!resolve) return;
  // the lapse equation of the rescaled data is solved by N / r^2
  SliceState qs = q;
  qs.lapse = solve_lapse(q.g, q.k, solver).lapse;
  double lapse_err = 0.0;
  for (std::size_t p = 0; p < s.lapse.size(); ++p)
    lapse_err = std::max(lapse_err, std::abs(qs.lapse[p] * r * r - s.lapse[p]) / s.lapse[p]);
  checks.add(tag + "resolved_lapse_is_N_over_r2", lapse_err <= 1e-7, "max rel err " + fmt(lapse_err));

  const GradientLapseCheck c = gradient_lapse_estimate_check(s, a, rc, lambda);
  const GradientLapseCheck cq = gradient_lapse_estimate_check(qs, analyze_slice(qs), rcq, lambda);
  const double c_floor = 1e-9 * std::max(c.c_fit, cq.c_fit) + 1e-12;
  checks.add(tag + "c_fit_invariant", std::abs(c.c_fit - cq.c_fit) <= 1e-6 * std::abs(c.c_fit) + c_floor,
             "C_fit " + fmt(c.c_fit) + " -> " + fmt(cq.c_fit));
}

int run_verify(const RunConfig& config, std::ostream& out) {
  CheckList checks(out);
  SliceState s = initial_state(config);
  const SolverOptions solver = solver_options(config);
  const double h = mean_trace(s);

  const LapseSolution sol = solve_lapse(s.g, s.k, solver);
  checks.add("lapse_solve", sol.report.converged && sol.report.final_residual <= config.solver_tol,
             std::to_string(sol.report.iterations) + " iterations, residual " + fmt(sol.report.final_residual));
  s.lapse = sol.lapse;
  const double bound_tol = lapse_bound_tolerance(s.grid(), config.solver_tol, h);
  const LapseMargins margins = lapse_margins(s.lapse, s.k, s.g);
  checks.add("lapse_bounds", margins.lower >= -bound_tol && margins.upper >= -bound_tol,
             "margins lower " + fmt(margins.lower) + ", upper " + fmt(margins.upper) + ", tolerance " +
                 fmt(bound_tol));

  const SliceAnalysis a = analyze_slice(s);
  const SymTensorField& e = a.weyl.electric;
  const SymTensorField& b = a.weyl.magnetic;
  const double curv = sup_norm(e, s.g) + sup_norm(b, s.g) + h * h;

  {
    const ScalarField tr = trace(e, s.g);
    double worst = 0.0;
    for (std::size_t p = 0; p < tr.size(); ++p) worst = std::max(worst, std::abs(tr[p] - a.hamiltonian[p]));
    checks.add("trace_E_equals_hamiltonian", worst <= 1e-10 * curv, "sup diff " + fmt(worst));
  }
  {
    const double tr_b = sup_norm(trace(b, s.g));
    checks.add("trace_B_zero", tr_b <= 1e-10 * curv, "sup |tr B| " + fmt(tr_b));
  }
  {
    const double w = sup_norm(wedge(e, e, s.g), s.g) + sup_norm(wedge(b, b, s.g), s.g);
    checks.add("wedge_self_zero", w <= 1e-10 * curv * curv, "sup |E^E| + |B^B| " + fmt(w));
  }
  {
    const double d = sup_abs_diff(cross(e, b, s.g), cross(b, e, s.g), s.g);
    checks.add("cross_symmetric", d <= 1e-10 * curv * curv, "sup |ExB - BxE| " + fmt(d));
  }
  {
    const ScalarField direct = [&] {
      ScalarField f = norm_sq(e, s.g);
      f += norm_sq(b, s.g);
      return f;
    }();
    double worst = 0.0;
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < direct.size(); ++p) {
      worst = std::max(worst, std::abs(direct[p] - a.br.q_tttt[p]));
      lowest = std::min(lowest, a.br.q_tttt[p]);
    }
    checks.add("energy_density", lowest >= 0.0 && worst <= 1e-12 * curv * curv,
               "min Q_TTTT " + fmt(lowest) + ", sup diff " + fmt(worst));
  }
  {
    const double ratio = sup_norm(s.k, s.g) / std::abs(h);
    checks.add("k_ratio_floor", ratio >= (1.0 - 1e-12) / std::sqrt(3.0), "|K|/|H| = " + fmt(ratio));
  }

  const bool unperturbed = config.perturb_amplitude == 0.0;
  {
    const double ham = sup_norm(a.hamiltonian);
    const double mom = sup_norm(a.momentum, s.g);
    const int n_min = std::min({s.grid().n[0], s.grid().n[1], s.grid().n[2]});
    const double allowed = std::max(1e-10, 1e3 * std::pow(static_cast<double>(n_min), -4.0)) * curv;
    const std::string detail = "sup |H| " + fmt(ham) + ", sup |M| " + fmt(mom) + ", allowed " + fmt(allowed);
    if (unperturbed)
      checks.add("constraints", ham <= allowed && mom <= allowed * std::abs(h), detail);
    else
      checks.info("constraints", detail + " (perturbed data carries constraint violations)");
  }

  if (unperturbed) {
    const StepOptions opts = step_options(config);
    const double dt = 0.05 * stable_time_step(s, config.cfl);
    const double ep = br_energy(time_step(s, dt, opts).state);
    const double em = br_energy(time_step(s, -dt, opts).state);
    const double rate = (ep - em) / (2.0 * dt);
    const double flux = br_flux(s, a);
    const double scale = std::abs(flux) + 3.0 * br_energy(s, a) / std::abs(s.t) + 1e-12 * curv;
    checks.add("flux_matches_energy_rate", std::abs(rate - flux) <= 1e-4 * scale,
               "flux " + fmt(flux) + ", centered difference " + fmt(rate));
  }

  for (double r : {0.5, 2.0}) check_rescale(checks, s, r, config.lambda, solver, false);
  return checks.finish("verify");
}

int run_rescale_test(const RunConfig& config, std::ostream& out) {
  CheckList checks(out);
  const SliceState s = initial_state(config);
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> log_r(std::log(0.1), std::log(10.0));
  std::vector<double> factors{0.5, 2.0};
  for (int i = 0; i < 3; ++i) factors.push_back(std::exp(log_r(rng)));
  for (double r : factors) check_rescale(checks, s, r, config.lambda, solver_options(config), true);
  return checks.finish("rescale-test");
}

int run_oracle(const RunConfig& config, std::ostream& out) {
  Sink sink(config.output, out);
  std::ostream& os = sink.stream();
  const auto p = config.kasner.exponents();
  const double volume = config.grid.coordinate_volume();
  os << "t,tau,g11,g22,g33,K11,K22,K33,N,E1,E2,E3,energy_density,e_br,e_br_exponent,lapse_exponent,"
        "g11_exponent,g22_exponent,g33_exponent\n";
  os << std::setprecision(17);
  for (double t : config.times) {
    const double tau = -1.0 / t;
    double density = 0.0;
    std::array<double, 3> eig{};
    for (int i = 0; i < 3; ++i) {
      eig[i] = p[i] * (1.0 - p[i]) / (tau * tau);
      density += eig[i] * eig[i];
    }
    os << t << ',' << tau;
    for (int i = 0; i < 3; ++i) os << ',' << std::pow(tau, 2.0 * p[i]);
    for (int i = 0; i < 3; ++i) os << ',' << -p[i] * std::pow(tau, 2.0 * p[i] - 1.0);
    os << ',' << tau * tau;
    for (int i = 0; i < 3; ++i) os << ',' << eig[i];
    os << ',' << density << ',' << volume * tau * density;
    // powers of |t|
    os << ',' << 3 << ',' << -2;
    for (int i = 0; i < 3; ++i) os << ',' << -2.0 * p[i];
    os << '\n';
  }
  if (!os) raise(ErrorKind::SinkError, "failed to write oracle table");
  sink.close();
  return 0;
}

int run_evolve(const RunConfig& config, std::ostream& out, std::ostream& err) {
  SliceState s = initial_state(config);
  const StepOptions opts = step_options(config);
  const double direction = config.t_end > config.t0 ? 1.0 : -1.0;

  DiagnosticsRecorder recorder;
  std::vector<std::size_t> emitted{0};
  recorder.record(s);
  double max_drift = 0.0;
  int steps = 0;
  while (direction * (config.t_end - s.t) > 0.0) {
    double dt = direction * (config.dt > 0.0 ? config.dt : stable_time_step(s, config.cfl));
    const double remaining = config.t_end - s.t;
    const bool last = std::abs(remaining) <= std::abs(dt) * (1.0 + 1e-9);
    if (last) dt = remaining;
    StepResult step = time_step(s, dt, opts);
    s = std::move(step.state);
    if (last) s.t = config.t_end;
    max_drift = std::max(max_drift, step.report.cmc_drift);
    ++steps;
    recorder.record(s);
    if (last || steps % config.output_cadence == 0) emitted.push_back(recorder.records().size() - 1);
  }

  const auto& all = recorder.records();
  std::vector<DiagnosticsRecord> rows;
  for (std::size_t i : emitted) rows.push_back(all[i]);
  Sink sink(config.output, out);
  emit_records(rows, sink.stream());
  sink.close();

  if (!config.snapshot.empty()) {
    std::ofstream snap(config.snapshot, std::ios::binary | std::ios::trunc);
    if (!snap) raise(ErrorKind::SinkError, "cannot open snapshot file '" + config.snapshot + "'");
    write_snapshot(snap, to_snapshot(s));
  }

  MonitorConfig monitor;
  monitor.lambda = config.lambda;
  monitor.t0 = config.t0;
  monitor.t_star = config.t_end;
  monitor.growth_factor = config.growth_factor;
  const MonitorVerdict verdict = continuation_monitor(all, monitor);

  double c_fit = 0.0;
  for (const DiagnosticsRecord& r : all)
    c_fit = std::max(c_fit, r.r_c * r.grad_n_sup / (r.r_c * r.r_c * config.lambda + 1.0 / (r.t * r.t)));

  std::ostream& log = config.output.empty() ? err : out;
  log << "evolve: " << steps << " steps, t = " << config.t0 << " -> " << s.t << '\n';
  log << "monitor: spacetime_energy_exceeded=" << verdict.criterion_spacetime_energy
      << " k_ratio_exceeded=" << verdict.criterion_k_ratio << " energy_growth=" << verdict.energy_growth
      << " theorem_tension=" << verdict.theorem_tension << '\n';
  log << "monitor: max_cmc_drift=" << max_drift << " max_c_fit=" << c_fit << '\n';
  if (verdict.theorem_tension) {
    log << "FAIL theorem_tension: energy grew while both continuation criteria stayed bounded\n";
    return 1;
  }
  return 0;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    switch (config.command) {
      case Command::Verify: return run_verify(config, out);
      case Command::Evolve: return run_evolve(config, out, err);
      case Command::Oracle: return run_oracle(config, out);
      case Command::RescaleTest: return run_rescale_test(config, out);
    }
    return 1;
  } catch (const Error& e) {
    err << "error: kind=" << to_string(e.kind()) << " message=\"" << e.what() << "\"\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: kind=Internal message=\"" << e.what() << "\"\n";
    return 2;
  }
}

}  // namespace cmcbr
