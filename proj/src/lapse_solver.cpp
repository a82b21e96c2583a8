#include "cmcbr/lapse_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cmcbr/error.hpp"
#include "cmcbr/tensor_algebra.hpp"

namespace cmcbr {

namespace {

// sum_s coeff_s * f(p + s e_axis) for s in {-2..2}
ScalarField axis_stencil(const ScalarField& f, int axis, const std::array<double, 5>& coeff) {
  const GridSpec& grid = f.grid();
  ScalarField out(grid);
  const int len = grid.n[axis];
  const std::ptrdiff_t stride = axis == 0 ? 1 : (axis == 1 ? grid.n[0] : std::ptrdiff_t{grid.n[0]} * grid.n[1]);
  std::size_t p = 0;
  for (int k = 0; k < grid.n[2]; ++k) {
    for (int j = 0; j < grid.n[1]; ++j) {
      for (int i = 0; i < grid.n[0]; ++i, ++p) {
        const int c = axis == 0 ? i : (axis == 1 ? j : k);
        double v = 0.0;
        for (int s = -2; s <= 2; ++s) {
          const int shift = (c + s + len) % len - c;
          v += coeff[s + 2] * f[p + shift * stride];
        }
        out[p] = v;
      }
    }
  }
  return out;
}

// Weighted operator  A u = sum_ab D_a^T (sqrt g g^ab) D_b u + sqrt g c u.
class WeightedOperator {
 public:
  WeightedOperator(const SymTensorField& g, const ScalarField& zero_order)
      : grid_(g.grid()), flux_weight_(grid_), volume_(grid_), mass_(grid_), diagonal_(grid_) {
    for (std::size_t p = 0; p < grid_.size(); ++p) {
      const MetricPoint m = metric_point(g.at(p));
      flux_weight_.set(p, m.sqrt_det * m.inv);
      volume_[p] = m.sqrt_det;
      mass_[p] = m.sqrt_det * zero_order[p];
    }
    diagonal_ = mass_;
    for (int a = 0; a < 3; ++a) {
      const double h2 = grid_.spacing(a) * grid_.spacing(a);
      const std::array<double, 5> sq{1.0 / (144.0 * h2), 64.0 / (144.0 * h2), 0.0, 64.0 / (144.0 * h2),
                                     1.0 / (144.0 * h2)};
      diagonal_ += axis_stencil(flux_weight_(a, a), a, sq);
    }
  }

  ScalarField apply(const ScalarField& u) const {
    std::array<ScalarField, 3> du;
    for (int b = 0; b < 3; ++b) du[b] = partial_derivative(u, b);
    ScalarField out(grid_);
    for (std::size_t p = 0; p < grid_.size(); ++p) out[p] = mass_[p] * u[p];
    for (int a = 0; a < 3; ++a) {
      ScalarField flux(grid_);
      for (std::size_t p = 0; p < grid_.size(); ++p)
        flux[p] = flux_weight_(a, 0)[p] * du[0][p] + flux_weight_(a, 1)[p] * du[1][p] +
                  flux_weight_(a, 2)[p] * du[2][p];
      const ScalarField dflux = partial_derivative(flux, a);
      for (std::size_t p = 0; p < grid_.size(); ++p) out[p] -= dflux[p];
    }
    return out;
  }

  const ScalarField& volume() const { return volume_; }
  const ScalarField& diagonal() const { return diagonal_; }

 private:
  GridSpec grid_;
  SymTensorField flux_weight_;
  ScalarField volume_;
  ScalarField mass_;
  ScalarField diagonal_;
};

double dot(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) s += a[p] * b[p];
  return s;
}

double rms(const ScalarField& f) { return std::sqrt(dot(f, f) / static_cast<double>(f.size())); }

// RMS of the unweighted residual r / sqrt g.
double unweighted_rms(const ScalarField& r, const ScalarField& volume) {
  double s = 0.0;
  for (std::size_t p = 0; p < r.size(); ++p) {
    const double v = r[p] / volume[p];
    s += v * v;
  }
  return std::sqrt(s / static_cast<double>(r.size()));
}

}  // namespace

int default_iteration_budget(const GridSpec& grid) {
  return static_cast<int>(std::ceil(10.0 * std::sqrt(static_cast<double>(grid.size()))));
}

LapseSolution solve_elliptic(const SymTensorField& g, const ScalarField& zero_order, const ScalarField& rhs,
                             const SolverOptions& options, const ScalarField* initial_guess) {
  const GridSpec& grid = g.grid();
  const auto [cmin, cmax] = std::minmax_element(zero_order.values().begin(), zero_order.values().end());
  if (!(*cmax > 0.0) || !(*cmin > 1e-14 * *cmax)) {
    std::ostringstream msg;
    msg << "zero-order coefficient range [" << *cmin << ", " << *cmax << "] is not positive";
    raise(ErrorKind::DegenerateZeroOrderTerm, msg.str());
  }

  const WeightedOperator op(g, zero_order);
  const int budget = options.max_iterations > 0 ? options.max_iterations : default_iteration_budget(grid);

  ScalarField b(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) b[p] = op.volume()[p] * rhs[p];
  const double rhs_norm = std::max(rms(rhs), std::numeric_limits<double>::min());

  ScalarField x(grid);
  if (initial_guess) {
    x = *initial_guess;
  } else {
    for (std::size_t p = 0; p < grid.size(); ++p) x[p] = rhs[p] / zero_order[p];
  }

  auto true_residual = [&](const ScalarField& u) {
    ScalarField r = op.apply(u);
    for (std::size_t p = 0; p < grid.size(); ++p) r[p] = b[p] - r[p];
    return r;
  };
  auto energy = [&](const ScalarField& u, const ScalarField& r) { return -0.5 * (dot(b, u) + dot(r, u)); };

  EllipticSolveReport report;
  ScalarField r = true_residual(x);
  if (options.record_energy) report.energy_history.push_back(energy(x, r));

  ScalarField z(grid);
  auto precondition = [&] {
    for (std::size_t p = 0; p < grid.size(); ++p) z[p] = r[p] / op.diagonal()[p];
  };
  precondition();
  ScalarField dir = z;
  double rz = dot(r, z);
  double residual = unweighted_rms(r, op.volume()) / rhs_norm;

  int it = 0;
  while (true) {
    if (residual <= options.tol) {
      // guard against drift of the recurrence before accepting
      r = true_residual(x);
      residual = unweighted_rms(r, op.volume()) / rhs_norm;
      if (residual <= options.tol) {
        report.converged = true;
        break;
      }
      precondition();
      dir = z;
      rz = dot(r, z);
    }
    if (it >= budget) break;

    const ScalarField adir = op.apply(dir);
    const double curvature = dot(dir, adir);
    if (!(curvature > 0.0)) break;
    const double alpha = rz / curvature;
    for (std::size_t p = 0; p < grid.size(); ++p) {
      x[p] += alpha * dir[p];
      r[p] -= alpha * adir[p];
    }
    ++it;
    if (options.record_energy) report.energy_history.push_back(energy(x, r));

    precondition();
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t p = 0; p < grid.size(); ++p) dir[p] = z[p] + beta * dir[p];
    residual = unweighted_rms(r, op.volume()) / rhs_norm;
  }

  report.iterations = it;
  report.final_residual = residual;
  if (!report.converged) {
    std::ostringstream msg;
    msg << "elliptic solve stopped after " << it << " iterations at relative residual " << residual
        << " (tolerance " << options.tol << ")";
    raise(ErrorKind::SolverDiverged, msg.str());
  }
  return LapseSolution{std::move(x), std::move(report)};
}

LapseSolution solve_lapse(const SymTensorField& g, const SymTensorField& k, const SolverOptions& options,
                          const ScalarField* initial_guess) {
  return solve_elliptic(g, norm_sq(k, g), ScalarField(g.grid(), 1.0), options, initial_guess);
}

ScalarField elliptic_residual(const SymTensorField& g, const ScalarField& zero_order, const ScalarField& rhs,
                              const ScalarField& u) {
  const WeightedOperator op(g, zero_order);
  ScalarField r = op.apply(u);
  for (std::size_t p = 0; p < r.size(); ++p) r[p] = r[p] / op.volume()[p] - rhs[p];
  return r;
}

LapseMargins lapse_margins(const ScalarField& lapse, const SymTensorField& k, const SymTensorField& g) {
  double k_sup = 0.0;
  double h_sum = 0.0;
  for (std::size_t p = 0; p < lapse.size(); ++p) {
    const MetricPoint m = metric_point(g.at(p));
    const Sym3 kp = k.at(p);
    k_sup = std::max(k_sup, norm_sq(kp, m));
    h_sum += trace(kp, m);
  }
  const double h = h_sum / static_cast<double>(lapse.size());
  const auto [nmin, nmax] = std::minmax_element(lapse.values().begin(), lapse.values().end());
  return LapseMargins{*nmin - 1.0 / k_sup, 3.0 / (h * h) - *nmax};
}

double lapse_bound_tolerance(const GridSpec& grid, double solver_tol, double mean_curvature) {
  const int n_min = std::min({grid.n[0], grid.n[1], grid.n[2]});
  const double h_rel = 1.0 / n_min;
  const double scale = 3.0 / (mean_curvature * mean_curvature);
  return std::max(solver_tol, std::pow(h_rel, 4)) * scale;
}

LapseMargins check_lapse_bounds(const ScalarField& lapse, const SymTensorField& k, const SymTensorField& g,
                                double tolerance) {
  const LapseMargins margins = lapse_margins(lapse, k, g);
  if (margins.lower < -tolerance || margins.upper < -tolerance) {
    std::ostringstream msg;
    msg << "lapse bounds violated: lower margin " << margins.lower << ", upper margin " << margins.upper
        << ", tolerance " << tolerance;
    raise(ErrorKind::BoundViolation, msg.str());
  }
  return margins;
}

}  // namespace cmcbr
