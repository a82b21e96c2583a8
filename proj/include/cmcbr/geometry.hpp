#pragma once

// Slice curvature, the electric/magnetic decomposition of the Weyl tensor,
// Bel-Robinson components, vacuum constraints and the static residual.

#include <utility>

#include "cmcbr/grid.hpp"
#include "cmcbr/tensor_algebra.hpp"

namespace cmcbr {

struct WeylParts {
  SymTensorField electric;
  SymTensorField magnetic;
};

/// Normal-frame components Q_TTTT, Q_aTTT, Q_abTT of the Bel-Robinson tensor.
struct BRComponents {
  ScalarField q_tttt;
  VectorField q_attt;
  SymTensorField q_abtt;
};

SymTensorField ricci(const SymTensorField& g, const Connection& gamma);
ScalarField scalar_curvature(const SymTensorField& g, const SymTensorField& ric);
ScalarField scalar_curvature(const SymTensorField& g, const Connection& gamma);

/// E = Ric + H K - K:K with H = tr_g K.
SymTensorField electric_weyl(const SymTensorField& g, const SymTensorField& k, const SymTensorField& ric);
SymTensorField electric_weyl(const SymTensorField& g, const SymTensorField& k, const Connection& gamma);

/// B = -curl K.
SymTensorField magnetic_weyl(const SymTensorField& k, const SymTensorField& g, const Connection& gamma,
                             Orientation orientation = Orientation::RightHanded);

WeylParts weyl_parts(const SymTensorField& g, const SymTensorField& k, const Connection& gamma,
                     Orientation orientation = Orientation::RightHanded);

BRComponents br_components(const SymTensorField& e, const SymTensorField& b, const SymTensorField& g,
                           Orientation orientation = Orientation::RightHanded);

/// R + H^2 - |K|^2.
ScalarField hamiltonian_constraint(const SymTensorField& g, const SymTensorField& k, const Connection& gamma);
ScalarField hamiltonian_constraint(const SymTensorField& g, const SymTensorField& k, const SymTensorField& ric);

/// (div K)_a - d_a H.
VectorField momentum_constraint(const SymTensorField& g, const SymTensorField& k, const Connection& gamma);

/// (Laplacian N, Hess N - N Ric). Throws NonPositiveLapse if N <= 0 anywhere.
std::pair<ScalarField, SymTensorField> static_residual(const SymTensorField& g, const ScalarField& lapse,
                                                       const Connection& gamma);

}  // namespace cmcbr
