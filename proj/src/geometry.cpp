#include "cmcbr/geometry.hpp"

#include <sstream>

#include "cmcbr/error.hpp"

namespace cmcbr {

SymTensorField ricci(const SymTensorField& g, const Connection& gamma) {
  const GridSpec& grid = g.grid();
  const std::size_t n = grid.size();

  // d_c Gamma^c_ab
  SymTensorField div_gamma(grid);
  for (int s = 0; s < 6; ++s)
    for (int c = 0; c < 3; ++c) div_gamma.comp[s] += partial_derivative(gamma.comp[6 * c + s], c);

  // V_b = Gamma^c_cb and its symmetrized gradient
  std::array<ScalarField, 3> contracted;
  for (int b = 0; b < 3; ++b) {
    contracted[b] = ScalarField(grid);
    for (std::size_t p = 0; p < n; ++p) {
      double v = 0.0;
      for (int c = 0; c < 3; ++c) v += gamma(p, c, c, b);
      contracted[b][p] = v;
    }
  }
  std::array<std::array<ScalarField, 3>, 3> dv;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) dv[a][b] = partial_derivative(contracted[b], a);

  SymTensorField out(grid);
  for (std::size_t p = 0; p < n; ++p) {
    double gam[3][3][3];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) gam[a][b][c] = gamma(p, a, b, c);
    double trace_gam[3];
    for (int d = 0; d < 3; ++d) trace_gam[d] = gam[0][0][d] + gam[1][1][d] + gam[2][2][d];

    for (int a = 0; a < 3; ++a) {
      for (int b = a; b < 3; ++b) {
        double quad = 0.0;
        for (int d = 0; d < 3; ++d) {
          quad += trace_gam[d] * gam[d][a][b];
          for (int c = 0; c < 3; ++c) quad -= gam[c][a][d] * gam[d][c][b];
        }
        const double sym_dv = 0.5 * (dv[a][b][p] + dv[b][a][p]);
        out(a, b)[p] = div_gamma(a, b)[p] - sym_dv + quad;
      }
    }
  }
  return out;
}

ScalarField scalar_curvature(const SymTensorField& g, const SymTensorField& ric) { return trace(ric, g); }

ScalarField scalar_curvature(const SymTensorField& g, const Connection& gamma) {
  return trace(ricci(g, gamma), g);
}

SymTensorField electric_weyl(const SymTensorField& g, const SymTensorField& k, const SymTensorField& ric) {
  SymTensorField out(g.grid());
  for (std::size_t p = 0; p < out.size(); ++p) {
    const MetricPoint m = metric_point(g.at(p));
    const Sym3 kp = k.at(p);
    const double h = trace(kp, m);
    out.set(p, ric.at(p) + h * kp - contract_middle(kp, kp, m));
  }
  return out;
}

SymTensorField electric_weyl(const SymTensorField& g, const SymTensorField& k, const Connection& gamma) {
  return electric_weyl(g, k, ricci(g, gamma));
}

SymTensorField magnetic_weyl(const SymTensorField& k, const SymTensorField& g, const Connection& gamma,
                             Orientation orientation) {
  SymTensorField b = curl(k, g, gamma, orientation);
  b *= -1.0;
  return b;
}

WeylParts weyl_parts(const SymTensorField& g, const SymTensorField& k, const Connection& gamma,
                     Orientation orientation) {
  return WeylParts{electric_weyl(g, k, gamma), magnetic_weyl(k, g, gamma, orientation)};
}

BRComponents br_components(const SymTensorField& e, const SymTensorField& b, const SymTensorField& g,
                           Orientation orientation) {
  const GridSpec& grid = g.grid();
  BRComponents q{ScalarField(grid), VectorField(grid), SymTensorField(grid)};
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const MetricPoint m = metric_point(g.at(p));
    const Sym3 ep = e.at(p);
    const Sym3 bp = b.at(p);
    const double energy = norm_sq(ep, m) + norm_sq(bp, m);
    q.q_tttt[p] = energy;
    Vec3 w = wedge(ep, bp, m, orientation);
    for (double& x : w) x *= 2.0;
    q.q_attt.set(p, w);
    q.q_abtt.set(p, (energy / 3.0) * m.g - cross(ep, ep, m) - cross(bp, bp, m));
  }
  return q;
}

ScalarField hamiltonian_constraint(const SymTensorField& g, const SymTensorField& k, const SymTensorField& ric) {
  ScalarField out(g.grid());
  for (std::size_t p = 0; p < out.size(); ++p) {
    const MetricPoint m = metric_point(g.at(p));
    const Sym3 kp = k.at(p);
    const double h = trace(kp, m);
    out[p] = trace(ric.at(p), m) + h * h - norm_sq(kp, m);
  }
  return out;
}

ScalarField hamiltonian_constraint(const SymTensorField& g, const SymTensorField& k, const Connection& gamma) {
  return hamiltonian_constraint(g, k, ricci(g, gamma));
}

VectorField momentum_constraint(const SymTensorField& g, const SymTensorField& k, const Connection& gamma) {
  VectorField out = divergence(k, g, gamma);
  const VectorField dh = gradient(trace(k, g));
  for (int a = 0; a < 3; ++a) out.comp[a] += ScalarField(dh.comp[a]) *= -1.0;
  return out;
}

std::pair<ScalarField, SymTensorField> static_residual(const SymTensorField& g, const ScalarField& lapse,
                                                       const Connection& gamma) {
  for (std::size_t p = 0; p < lapse.size(); ++p) {
    if (!(lapse[p] > 0.0)) {
      std::ostringstream msg;
      msg << "lapse " << lapse[p] << " at point " << p << " is not positive";
      raise(ErrorKind::NonPositiveLapse, msg.str());
    }
  }
  const SymTensorField hess = hessian(lapse, gamma);
  const SymTensorField ric = ricci(g, gamma);
  ScalarField laplacian = trace(hess, g);
  SymTensorField tensor(g.grid());
  for (std::size_t p = 0; p < lapse.size(); ++p) tensor.set(p, hess.at(p) - lapse[p] * ric.at(p));
  return {std::move(laplacian), std::move(tensor)};
}

}  // namespace cmcbr
