#pragma once

// CMC lapse equation  -Laplacian N + |K|^2 N = 1  on a periodic slice.
//
// The operator is discretized in divergence form,
//   Laplacian N = (1/sqrt g) d_a (sqrt g g^{ab} d_b N),
// with the same 4th-order difference used for d_a on both sides. Since the
// periodic centered difference is antisymmetric, multiplying through by
// sqrt g yields a symmetric positive definite system, solved by Jacobi
// preconditioned conjugate gradients.

#include <vector>

#include "cmcbr/grid.hpp"

namespace cmcbr {

struct SolverOptions {
  /// Relative discrete L2 tolerance on the unweighted residual.
  double tol = 1e-10;
  /// 0 selects the default budget of 10 * sqrt(total grid points).
  int max_iterations = 0;
  /// Record the CG energy functional after every iteration.
  bool record_energy = false;

  friend bool operator==(const SolverOptions&, const SolverOptions&) = default;
};

struct EllipticSolveReport {
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  /// 0.5 x^T A x - b^T x of the weighted system, one entry per iterate
  /// (including the initial guess) when requested.
  std::vector<double> energy_history;
};

struct LapseSolution {
  ScalarField lapse;
  EllipticSolveReport report;
};

int default_iteration_budget(const GridSpec& grid);

/// Solves -Laplacian u + c u = f. Requires c > 0 somewhere and c >= 0
/// everywhere; throws DegenerateZeroOrderTerm otherwise and SolverDiverged
/// when the budget runs out. `initial_guess` defaults to f / c pointwise.
LapseSolution solve_elliptic(const SymTensorField& g, const ScalarField& zero_order, const ScalarField& rhs,
                             const SolverOptions& options = {}, const ScalarField* initial_guess = nullptr);

/// The CMC lapse: c = |K|^2, f = 1.
LapseSolution solve_lapse(const SymTensorField& g, const SymTensorField& k, const SolverOptions& options = {},
                          const ScalarField* initial_guess = nullptr);

/// Discrete residual  -Laplacian u + c u - f  of the same operator the solver inverts.
ScalarField elliptic_residual(const SymTensorField& g, const ScalarField& zero_order, const ScalarField& rhs,
                              const ScalarField& u);

/// Margins of the maximum-principle bounds 1/sup|K|^2 <= N <= 3/H^2.
struct LapseMargins {
  double lower = 0.0;  ///< min N - 1/sup|K|^2
  double upper = 0.0;  ///< 3/H^2 - max N
};

/// H is taken as the mean of tr_g K (the slice is CMC).
LapseMargins lapse_margins(const ScalarField& lapse, const SymTensorField& k, const SymTensorField& g);

/// Tolerance max(solver_tol, h_max^4) scaled by the natural lapse size 3/H^2.
double lapse_bound_tolerance(const GridSpec& grid, double solver_tol, double mean_curvature);

/// Returns the margins; throws BoundViolation if either is below -tolerance.
LapseMargins check_lapse_bounds(const ScalarField& lapse, const SymTensorField& k, const SymTensorField& g,
                                double tolerance);

}  // namespace cmcbr
