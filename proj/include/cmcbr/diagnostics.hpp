#pragma once

// Bel-Robinson energy bookkeeping along a CMC foliation and the monitor
// for the two continuation criteria (spacetime energy, |K|/|H|).

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "cmcbr/evolution.hpp"
#include "cmcbr/geometry.hpp"
#include "cmcbr/lapse_solver.hpp"

namespace cmcbr {

/// Everything derived from one slice that the monitors need.
struct SliceAnalysis {
  Connection gamma;
  SymTensorField ricci;
  WeylParts weyl;
  BRComponents br;
  VectorField grad_lapse;
  ScalarField hamiltonian;
  VectorField momentum;
};

SliceAnalysis analyze_slice(const SliceState& state, Orientation orientation = Orientation::RightHanded);

/// Integral of |E|^2 + |B|^2 over the slice.
double br_energy(const SliceState& state);
double br_energy(const SliceState& state, const SliceAnalysis& analysis);

/// Integral of N (|E|^2 + |B|^2): the integrand of the spacetime energy.
double lapse_weighted_br_energy(const SliceState& state, const SliceAnalysis& analysis);

/// Trapezoidal t-quadrature of the lapse-weighted energy over a time-ordered
/// history. Throws EmptyHistory.
double spacetime_br_energy(std::span<const SliceState> history);

/// Gauss-law rate d_t E_BR = -3 int (-N Q_abTT K^ab + Q_aTTT grad^a N).
double br_flux(const SliceState& state);
double br_flux(const SliceState& state, const SliceAnalysis& analysis);

/// Curvature length (sup sqrt(|E|^2+|B|^2))^{-1/2}, capped at half the
/// shortest metric period of the torus. Stands in for the harmonic radius.
double curvature_radius(const SliceState& state);
double curvature_radius(const SliceState& state, const SliceAnalysis& analysis);
double injectivity_cap(const SymTensorField& g);

struct GradientLapseCheck {
  double lhs = 0.0;        ///< r_c * sup |grad N|
  double rhs_shape = 0.0;  ///< r_c^2 Lambda + 1/H^2
  double c_fit = 0.0;      ///< lhs / rhs_shape
};

GradientLapseCheck gradient_lapse_estimate_check(const SliceState& state, double lambda);
GradientLapseCheck gradient_lapse_estimate_check(const SliceState& state, const SliceAnalysis& analysis,
                                                 double r_c, double lambda);

struct DiagnosticsRecord {
  double t = 0.0;
  double e_br = 0.0;
  double e_br_spacetime = 0.0;
  double k_ratio = 0.0;
  double r_c = 0.0;
  double r_c_running = 0.0;
  double lapse_margin_lower = 0.0;
  double lapse_margin_upper = 0.0;
  double grad_n_sup = 0.0;
  double flux = 0.0;
  double hamiltonian_norm = 0.0;
  double momentum_norm = 0.0;

  friend bool operator==(const DiagnosticsRecord&, const DiagnosticsRecord&) = default;
};

/// Builds records along a run, accumulating the spacetime energy and the
/// running infimum of the curvature radius.
class DiagnosticsRecorder {
 public:
  const DiagnosticsRecord& record(const SliceState& state);
  const std::vector<DiagnosticsRecord>& records() const { return records_; }

 private:
  std::vector<DiagnosticsRecord> records_;
  double previous_weighted_ = 0.0;
};

struct MonitorConfig {
  double lambda = 10.0;
  double t0 = -1.0;
  /// End of the window. t_star > t0 monitors the expanding direction,
  /// t_star < t0 the time-reversed one.
  double t_star = -0.1;
  /// e_br growth (relative to the first record) that counts as blowup.
  double growth_factor = 10.0;

  void validate() const;
};

struct RecordVerdict {
  double t = 0.0;
  bool spacetime_energy_bounded = true;  ///< e_br_spacetime <= Lambda
  bool k_ratio_bounded = true;           ///< k_ratio^2 <= Lambda
};

struct MonitorVerdict {
  std::vector<RecordVerdict> records;
  bool criterion_spacetime_energy = false;  ///< spacetime energy exceeded Lambda
  bool criterion_k_ratio = false;           ///< |K|/|H| squared exceeded Lambda
  bool energy_growth = false;               ///< e_br grew past growth_factor
  /// Energy blew up while both criteria stayed bounded.
  bool theorem_tension = false;

  bool clean() const { return !criterion_spacetime_energy && !criterion_k_ratio && !theorem_tension; }
};

/// Records must be ordered from t0 toward t_star and lie inside the window.
MonitorVerdict continuation_monitor(std::span<const DiagnosticsRecord> records, const MonitorConfig& config);

/// Header plus one comma-separated row per record, shortest round-trip decimals.
void emit_records(std::span<const DiagnosticsRecord> records, std::ostream& sink);
std::vector<DiagnosticsRecord> parse_records(std::istream& source);

}  // namespace cmcbr
