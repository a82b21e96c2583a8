#pragma once

// Metric algebra on symmetric 3-tensors: index raising, traces, norms,
// the wedge and cross products, and the curl/divergence Hodge pair.
//
// All stored tensors carry lower indices. The volume form is
// eps_abc = orientation * sqrt(det g) * [abc] with [xyz] = +1 for the
// default right-handed orientation.

#include <array>

#include "cmcbr/grid.hpp"
#include "cmcbr/point_tensor.hpp"

namespace cmcbr {

enum class Orientation : int { RightHanded = 1, LeftHanded = -1 };

/// Metric data at one point: g, g^{-1}, det g and sqrt(det g).
struct MetricPoint {
  Sym3 g;
  Sym3 inv;
  double det = 1.0;
  double sqrt_det = 1.0;
};

/// Throws NonPositiveMetric unless g is positive definite (Sylvester test).
MetricPoint metric_point(const Sym3& g);

// ---- pointwise algebra ----

double trace(const Sym3& a, const MetricPoint& m);
Sym3 traceless(const Sym3& a, const MetricPoint& m);
/// Full contraction g^{ac} g^{bd} A_ab B_cd.
double dot(const Sym3& a, const Sym3& b, const MetricPoint& m);
double norm_sq(const Sym3& a, const MetricPoint& m);
double norm_sq(const Vec3& v, const MetricPoint& m);
double dot(const Vec3& u, const Vec3& v, const MetricPoint& m);
Vec3 raise(const Vec3& v, const MetricPoint& m);
/// A_ac g^{cd} B_db, symmetrized. Used for K:K = K_ac K^c_b.
Sym3 contract_middle(const Sym3& a, const Sym3& b, const MetricPoint& m);

/// (A ^ B)_a = eps_a^{bc} A_b^d B_dc.
Vec3 wedge(const Sym3& a, const Sym3& b, const MetricPoint& m,
           Orientation orientation = Orientation::RightHanded);

/// (A x B)_ab = eps_a^{cd} eps_b^{ef} A_ce B_df + (A.B) g_ab / 3 - (tr A)(tr B) g_ab / 3.
Sym3 cross(const Sym3& a, const Sym3& b, const MetricPoint& m);

// ---- connection ----

/// Christoffel symbols Gamma^a_{bc}, symmetric in (b, c).
struct Connection {
  std::array<ScalarField, 18> comp;

  static constexpr int slot(int a, int b, int c) { return 6 * a + sym_index(b, c); }

  Connection() = default;
  explicit Connection(const GridSpec& grid);

  const GridSpec& grid() const { return comp[0].grid(); }
  double operator()(std::size_t p, int a, int b, int c) const { return comp[slot(a, b, c)][p]; }
};

Connection christoffels(const SymTensorField& g);

// ---- field-level algebra ----

ScalarField trace(const SymTensorField& a, const SymTensorField& g);
SymTensorField traceless(const SymTensorField& a, const SymTensorField& g);
ScalarField norm_sq(const SymTensorField& a, const SymTensorField& g);
ScalarField norm_sq(const VectorField& v, const SymTensorField& g);
VectorField wedge(const SymTensorField& a, const SymTensorField& b, const SymTensorField& g,
                  Orientation orientation = Orientation::RightHanded);
SymTensorField cross(const SymTensorField& a, const SymTensorField& b, const SymTensorField& g);

/// Gradient of a scalar as a covector (partial derivatives).
VectorField gradient(const ScalarField& f);

/// Covariant Hessian del_a del_b f.
SymTensorField hessian(const ScalarField& f, const Connection& gamma);

/// curl A_ab = (eps_a^{st} del_t A_sb + eps_b^{st} del_t A_sa) / 2.
SymTensorField curl(const SymTensorField& a, const SymTensorField& g, const Connection& gamma,
                    Orientation orientation = Orientation::RightHanded);

/// (div A)_b = g^{ac} del_a A_cb.
VectorField divergence(const SymTensorField& a, const SymTensorField& g, const Connection& gamma);

}  // namespace cmcbr
