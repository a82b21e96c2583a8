#pragma once

// Vacuum evolution of CMC slice data with zero shift:
//   d_t g = -2 N K
//   d_t K = -Hess N + N (Ric + H K - 2 K:K)
// with the lapse re-solved from -Laplacian N + |K|^2 N = 1 at every stage.
// Coordinate time is the mean curvature, H = t < 0.

#include <cstdint>

#include "cmcbr/grid.hpp"
#include "cmcbr/lapse_solver.hpp"

namespace cmcbr {

struct SliceState {
  double t = -1.0;
  SymTensorField g;
  SymTensorField k;
  ScalarField lapse;

  const GridSpec& grid() const { return g.grid(); }

  friend bool operator==(const SliceState&, const SliceState&) = default;
};

/// Throws unless g is positive definite, N > 0, all entries finite and t < 0.
void validate_state(const SliceState& state);

struct KasnerParams {
  double p1 = 2.0 / 3.0;
  double p2 = 2.0 / 3.0;
  double p3 = -1.0 / 3.0;

  static constexpr double kTolerance = 1e-12;

  std::array<double, 3> exponents() const { return {p1, p2, p3}; }
  bool admissible() const;
  /// Throws InvalidKasner if sum p != 1 or sum p^2 != 1.
  void validate() const;

  /// One-parameter family p(u) covering every admissible triple.
  static KasnerParams from_parameter(double u);

  friend bool operator==(const KasnerParams&, const KasnerParams&) = default;
};

class RescaleFactor {
 public:
  explicit RescaleFactor(double r);
  double value() const { return r_; }

 private:
  double r_;
};

/// Periodic shear chart y^a = x^a + amp_a (L/2pi) sin(2pi x^{a+1} / L_{a+1}).
/// Pulling exact homogeneous data back through it gives inhomogeneous
/// coordinate components of the same spacetime. |amp_a| < 1 keeps the map
/// a diffeomorphism of the torus.
struct CoordinateWarp {
  std::array<double, 3> amplitude{0.0, 0.0, 0.0};

  bool is_identity() const { return amplitude == std::array<double, 3>{0.0, 0.0, 0.0}; }
  /// Jacobian dy^i/dx^a at x, row i column a.
  std::array<std::array<double, 3>, 3> jacobian(const Vec3& x, const GridSpec& grid) const;
};

/// Slice of the Kasner spacetime at proper time tau = -1/t0:
/// g = diag(tau^{2p_i}), K = diag(-p_i tau^{2p_i - 1}), N = tau^2.
SliceState kasner_initial_data(const KasnerParams& p, double t0, const GridSpec& grid,
                               const CoordinateWarp& warp = {});

struct PerturbResult {
  SliceState state;
  double hamiltonian_norm = 0.0;
  double momentum_norm = 0.0;
  EllipticSolveReport lapse_report;
};

/// Adds a smooth zero-mean periodic perturbation of relative size `amplitude`
/// to g and K (then restores tr K = t) and re-solves the lapse.
/// Constraint violations are measured, not removed.
PerturbResult perturb(const SliceState& state, double amplitude, std::uint64_t seed,
                      const SolverOptions& solver = {});

struct StepOptions {
  double cfl = 0.25;
  bool trace_correction = true;
  /// Allowed |tr K - t| relative to |t|.
  double cmc_drift_tol = 1e-6;
  /// Throw BoundViolation when a stage lapse breaks the maximum-principle bounds.
  bool enforce_lapse_bounds = true;
  SolverOptions solver;
};

struct StepReport {
  /// max |tr K - t| before any correction.
  double cmc_drift = 0.0;
  bool corrected = false;
  int lapse_solves = 0;
  int solver_iterations = 0;
  /// Smallest margins seen over every lapse solved during the step,
  /// divided by the tolerance used for the bound check.
  double worst_lower_margin = 0.0;
  double worst_upper_margin = 0.0;
  double lower_margin_tolerance = 0.0;
};

struct StepResult {
  SliceState state;
  StepReport report;
};

/// Largest |dt| accepted by time_step: cfl * h_min / sup N.
double stable_time_step(const SliceState& state, double cfl);

struct EvolutionRates {
  SymTensorField dg;
  SymTensorField dk;
};

EvolutionRates evolution_rates(const SymTensorField& g, const SymTensorField& k, const ScalarField& lapse);

/// One classical RK4 step of size dt (negative dt runs toward t -> -infinity).
StepResult time_step(const SliceState& state, double dt, const StepOptions& options = {});

/// g' = g / r^2, K' = K / r, t' = r t, N' = N.
SliceState rescale(const SliceState& state, RescaleFactor r);

}  // namespace cmcbr
