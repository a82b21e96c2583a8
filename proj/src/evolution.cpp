#include "cmcbr/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "cmcbr/error.hpp"
#include "cmcbr/geometry.hpp"
#include "cmcbr/tensor_algebra.hpp"

namespace cmcbr {

void validate_state(const SliceState& state) {
  if (!(state.t < 0.0)) {
    std::ostringstream msg;
    msg << "CMC time " << state.t << " must be negative";
    raise(ErrorKind::InvalidArgument, msg.str());
  }
  if (!all_finite(state.g) || !all_finite(state.k) || !all_finite(state.lapse))
    raise(ErrorKind::NonFiniteField, "slice data contains non-finite values");
  for (std::size_t p = 0; p < state.g.size(); ++p) {
    metric_point(state.g.at(p));
    if (!(state.lapse[p] > 0.0)) {
      std::ostringstream msg;
      msg << "lapse " << state.lapse[p] << " at point " << p << " is not positive";
      raise(ErrorKind::NonPositiveLapse, msg.str());
    }
  }
}

bool KasnerParams::admissible() const {
  const double s1 = p1 + p2 + p3;
  const double s2 = p1 * p1 + p2 * p2 + p3 * p3;
  return std::abs(s1 - 1.0) <= kTolerance && std::abs(s2 - 1.0) <= kTolerance;
}

void KasnerParams::validate() const {
  if (!admissible()) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "Kasner exponents (" << p1 << ", " << p2 << ", " << p3 << ") have sum " << (p1 + p2 + p3)
        << " and sum of squares " << (p1 * p1 + p2 * p2 + p3 * p3) << "; both must be 1";
    raise(ErrorKind::InvalidKasner, msg.str());
  }
}

KasnerParams KasnerParams::from_parameter(double u) {
  const double d = 1.0 + u + u * u;
  return KasnerParams{-u / d, (1.0 + u) / d, u * (1.0 + u) / d};
}

RescaleFactor::RescaleFactor(double r) : r_(r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    std::ostringstream msg;
    msg << "rescale factor " << r << " must be positive";
    raise(ErrorKind::InvalidArgument, msg.str());
  }
}

std::array<std::array<double, 3>, 3> CoordinateWarp::jacobian(const Vec3& x, const GridSpec& grid) const {
  std::array<std::array<double, 3>, 3> j{};
  for (int a = 0; a < 3; ++a) {
    j[a][a] = 1.0;
    const int b = (a + 1) % 3;
    j[a][b] += amplitude[a] * (grid.period[a] / grid.period[b]) *
               std::cos(2.0 * std::numbers::pi * x[b] / grid.period[b]);
  }
  return j;
}

SliceState kasner_initial_data(const KasnerParams& p, double t0, const GridSpec& grid, const CoordinateWarp& warp) {
  p.validate();
  grid.validate();
  if (!(t0 < 0.0)) {
    std::ostringstream msg;
    msg << "initial CMC time " << t0 << " must be negative";
    raise(ErrorKind::InvalidArgument, msg.str());
  }
  for (double a : warp.amplitude) {
    if (!(std::abs(a) < 1.0)) raise(ErrorKind::InvalidArgument, "warp amplitudes must lie in (-1, 1)");
  }
  const double tau = -1.0 / t0;
  const auto e = p.exponents();
  Sym3 g0, k0;
  for (int a = 0; a < 3; ++a) {
    g0(a, a) = std::pow(tau, 2.0 * e[a]);
    k0(a, a) = -e[a] * std::pow(tau, 2.0 * e[a] - 1.0);
  }

  SliceState s{t0, SymTensorField::constant(grid, g0), SymTensorField::constant(grid, k0),
               ScalarField(grid, tau * tau)};
  if (warp.is_identity()) return s;

  for (std::size_t pt = 0; pt < grid.size(); ++pt) {
    const auto j = warp.jacobian(grid.coordinate(pt), grid);
    Sym3 gp, kp;
    for (int a = 0; a < 3; ++a) {
      for (int b = a; b < 3; ++b) {
        double gv = 0.0, kv = 0.0;
        for (int i = 0; i < 3; ++i) {
          gv += j[i][a] * j[i][b] * g0(i, i);
          kv += j[i][a] * j[i][b] * k0(i, i);
        }
        gp(a, b) = gv;
        kp(a, b) = kv;
      }
    }
    s.g.set(pt, gp);
    s.k.set(pt, kp);
  }
  return s;
}

namespace {

class UnitRandom {
 public:
  explicit UnitRandom(std::uint64_t seed) : engine_(seed) {}
  // uniform in [0, 1), independent of the standard library's distributions
  double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  int integer(int lo, int hi) { return lo + static_cast<int>((*this)() * (hi - lo + 1)); }

 private:
  std::mt19937_64 engine_;
};

// Sum of a few periodic Fourier modes with |s| <= 1 and zero grid mean.
ScalarField random_smooth_field(const GridSpec& grid, UnitRandom& rng) {
  constexpr int kModes = 3;
  struct Mode {
    std::array<int, 3> wave;
    double amp;
    double phase;
  };
  std::array<Mode, kModes> modes;
  for (auto& m : modes) {
    do {
      for (int& w : m.wave) w = rng.integer(-2, 2);
    } while (m.wave == std::array<int, 3>{0, 0, 0});
    m.amp = (2.0 * rng() - 1.0) / kModes;
    m.phase = 2.0 * std::numbers::pi * rng();
  }
  return ScalarField::sample(grid, [&](double x, double y, double z) {
    const Vec3 pos{x, y, z};
    double v = 0.0;
    for (const auto& m : modes) {
      double arg = m.phase;
      for (int a = 0; a < 3; ++a) arg += 2.0 * std::numbers::pi * m.wave[a] * pos[a] / grid.period[a];
      v += m.amp * std::sin(arg);
    }
    return v;
  });
}

void check_positive(const SymTensorField& g) {
  for (std::size_t p = 0; p < g.size(); ++p) metric_point(g.at(p));
}

}  // namespace

PerturbResult perturb(const SliceState& state, double amplitude, std::uint64_t seed, const SolverOptions& solver) {
  if (!(amplitude >= 0.0)) raise(ErrorKind::InvalidArgument, "perturbation amplitude must be nonnegative");
  const GridSpec& grid = state.grid();
  PerturbResult result{state, 0.0, 0.0, {}};
  if (amplitude > 0.0) {
    UnitRandom rng(seed);
    const double k_scale = sup_norm(state.k, state.g);
    SliceState& s = result.state;
    for (int a = 0; a < 3; ++a) {
      for (int b = a; b < 3; ++b) {
        const ScalarField dg = random_smooth_field(grid, rng);
        const ScalarField dk = random_smooth_field(grid, rng);
        for (std::size_t p = 0; p < grid.size(); ++p) {
          const double scale = std::sqrt(state.g(a, a)[p] * state.g(b, b)[p]);
          s.g(a, b)[p] += amplitude * scale * dg[p];
          s.k(a, b)[p] += amplitude * k_scale * scale * dk[p];
        }
      }
    }
    check_positive(s.g);
    // restore the CMC condition tr K = t
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const MetricPoint m = metric_point(s.g.at(p));
      const Sym3 kp = s.k.at(p);
      s.k.set(p, kp + ((s.t - trace(kp, m)) / 3.0) * m.g);
    }
    LapseSolution lapse = solve_lapse(s.g, s.k, solver, &state.lapse);
    s.lapse = std::move(lapse.lapse);
    result.lapse_report = std::move(lapse.report);
  }
  const Connection gamma = christoffels(result.state.g);
  result.hamiltonian_norm = sup_norm(hamiltonian_constraint(result.state.g, result.state.k, gamma));
  result.momentum_norm = sup_norm(momentum_constraint(result.state.g, result.state.k, gamma), result.state.g);
  return result;
}

double stable_time_step(const SliceState& state, double cfl) {
  const auto nmax = std::max_element(state.lapse.values().begin(), state.lapse.values().end());
  return cfl * state.grid().min_spacing() / *nmax;
}

EvolutionRates evolution_rates(const SymTensorField& g, const SymTensorField& k, const ScalarField& lapse) {
  const Connection gamma = christoffels(g);
  const SymTensorField ric = ricci(g, gamma);
  const SymTensorField hess = hessian(lapse, gamma);
  EvolutionRates rates{SymTensorField(g.grid()), SymTensorField(g.grid())};
  for (std::size_t p = 0; p < g.size(); ++p) {
    const MetricPoint m = metric_point(g.at(p));
    const Sym3 kp = k.at(p);
    const double n = lapse[p];
    const double h = trace(kp, m);
    rates.dg.set(p, (-2.0 * n) * kp);
    rates.dk.set(p, n * (ric.at(p) + h * kp - 2.0 * contract_middle(kp, kp, m)) - hess.at(p));
  }
  return rates;
}

namespace {

struct StageSolver {
  const StepOptions& options;
  StepReport& report;

  ScalarField solve(const SymTensorField& g, const SymTensorField& k, const ScalarField& guess) {
    LapseSolution sol = solve_lapse(g, k, options.solver, &guess);
    ++report.lapse_solves;
    report.solver_iterations += sol.report.iterations;
    const LapseMargins margins = lapse_margins(sol.lapse, k, g);
    const double h = coordinate_sum(trace(k, g)) / g.grid().coordinate_volume();
    const double tol = lapse_bound_tolerance(g.grid(), options.solver.tol, h);
    report.worst_lower_margin = std::min(report.worst_lower_margin, margins.lower / tol);
    report.worst_upper_margin = std::min(report.worst_upper_margin, margins.upper / tol);
    report.lower_margin_tolerance = tol;
    if (options.enforce_lapse_bounds) check_lapse_bounds(sol.lapse, k, g, tol);
    return std::move(sol.lapse);
  }
};

}  // namespace

StepResult time_step(const SliceState& state, double dt, const StepOptions& options) {
  validate_state(state);
  const double bound = stable_time_step(state, options.cfl);
  if (!(std::abs(dt) <= bound * (1.0 + 1e-12)) || dt == 0.0) {
    std::ostringstream msg;
    msg << "time step " << dt << " outside stability bound " << bound;
    raise(ErrorKind::StabilityBoundExceeded, msg.str());
  }
  const double t_new = state.t + dt;
  if (!(t_new < 0.0)) {
    std::ostringstream msg;
    msg << "step would reach CMC time " << t_new << " >= 0";
    raise(ErrorKind::InvalidArgument, msg.str());
  }

  StepResult result;
  StepReport& report = result.report;
  report.worst_lower_margin = std::numeric_limits<double>::infinity();
  report.worst_upper_margin = std::numeric_limits<double>::infinity();
  StageSolver stage{options, report};

  const EvolutionRates k1 = evolution_rates(state.g, state.k, state.lapse);
  SymTensorField g2 = axpy(state.g, 0.5 * dt, k1.dg);
  SymTensorField kk2 = axpy(state.k, 0.5 * dt, k1.dk);
  const ScalarField n2 = stage.solve(g2, kk2, state.lapse);

  const EvolutionRates k2 = evolution_rates(g2, kk2, n2);
  SymTensorField g3 = axpy(state.g, 0.5 * dt, k2.dg);
  SymTensorField kk3 = axpy(state.k, 0.5 * dt, k2.dk);
  const ScalarField n3 = stage.solve(g3, kk3, n2);

  const EvolutionRates k3 = evolution_rates(g3, kk3, n3);
  SymTensorField g4 = axpy(state.g, dt, k3.dg);
  SymTensorField kk4 = axpy(state.k, dt, k3.dk);
  const ScalarField n4 = stage.solve(g4, kk4, n3);

  const EvolutionRates k4 = evolution_rates(g4, kk4, n4);

  SliceState& next = result.state;
  next.t = t_new;
  next.g = state.g;
  next.k = state.k;
  for (int c = 0; c < 6; ++c) {
    for (std::size_t p = 0; p < state.g.size(); ++p) {
      next.g.comp[c][p] += dt / 6.0 *
                           (k1.dg.comp[c][p] + 2.0 * k2.dg.comp[c][p] + 2.0 * k3.dg.comp[c][p] + k4.dg.comp[c][p]);
      next.k.comp[c][p] += dt / 6.0 *
                           (k1.dk.comp[c][p] + 2.0 * k2.dk.comp[c][p] + 2.0 * k3.dk.comp[c][p] + k4.dk.comp[c][p]);
    }
  }
  if (!all_finite(next.g) || !all_finite(next.k)) raise(ErrorKind::NonFiniteField, "evolved data is not finite");

  for (std::size_t p = 0; p < next.g.size(); ++p) {
    const MetricPoint m = metric_point(next.g.at(p));
    const Sym3 kp = next.k.at(p);
    const double drift = t_new - trace(kp, m);
    report.cmc_drift = std::max(report.cmc_drift, std::abs(drift));
    if (options.trace_correction) next.k.set(p, kp + (drift / 3.0) * m.g);
  }
  report.corrected = options.trace_correction && report.cmc_drift > 0.0;
  if (!options.trace_correction && report.cmc_drift > options.cmc_drift_tol * std::abs(t_new)) {
    std::ostringstream msg;
    msg << "mean curvature drifted by " << report.cmc_drift << " from t = " << t_new;
    raise(ErrorKind::CmcDriftExceeded, msg.str());
  }

  next.lapse = stage.solve(next.g, next.k, n4);
  return result;
}

SliceState rescale(const SliceState& state, RescaleFactor r) {
  const double s = r.value();
  SliceState out{s * state.t, state.g, state.k, state.lapse};
  out.g *= 1.0 / (s * s);
  out.k *= 1.0 / s;
  return out;
}

}  // namespace cmcbr
