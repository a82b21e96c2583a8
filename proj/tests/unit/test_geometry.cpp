#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cmcbr/error.hpp"
#include "cmcbr/evolution.hpp"
#include "cmcbr/geometry.hpp"
#include "support/brute_force.hpp"
#include "support/kasner_oracle.hpp"
#include "support/random_fields.hpp"

using namespace cmcbr;
using std::numbers::pi;

namespace {

// g = exp(2w) delta with w = al sin(2pi x) + be cos(2pi (y + z)).
// Ric = -(dd w - dw dw) - (lap w + |dw|^2) delta.
double conformal_ricci_error(int n) {
  const double al = 0.2, be = 0.1;
  const GridSpec grid = GridSpec::cubic(n);
  const auto conf = ScalarField::sample(grid, [&](double x, double y, double z) {
    return std::exp(2.0 * (al * std::sin(2 * pi * x) + be * std::cos(2 * pi * (y + z))));
  });
  SymTensorField g(grid);
  g(0, 0) = conf;
  g(1, 1) = conf;
  g(2, 2) = conf;
  const SymTensorField ric = ricci(g, christoffels(g));
  double err = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Vec3 x = grid.coordinate(p);
    const double k = 2 * pi, yz = k * (x[1] + x[2]);
    const double dw[3] = {k * al * std::cos(k * x[0]), -k * be * std::sin(yz), -k * be * std::sin(yz)};
    const double c = -k * k * be * std::cos(yz);
    const double ddw[3][3] = {{-k * k * al * std::sin(k * x[0]), 0, 0}, {0, c, c}, {0, c, c}};
    const double lap = ddw[0][0] + ddw[1][1] + ddw[2][2];
    const double grad2 = dw[0] * dw[0] + dw[1] * dw[1] + dw[2] * dw[2];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const double expect = -(ddw[a][b] - dw[a] * dw[b]) - (a == b) * (lap + grad2);
        err = std::max(err, std::abs(ric(a, b)[p] - expect));
      }
  }
  return err;
}

struct KasnerErrors {
  double e = 0.0;
  double b = 0.0;
  double ham = 0.0;
  double mom = 0.0;
};

KasnerErrors warped_kasner_errors(const std::array<double, 3>& p, int n, double warp) {
  const GridSpec grid = GridSpec::cubic(n, 1.0);
  CoordinateWarp w;
  w.amplitude = {warp, -0.6 * warp, 0.8 * warp};
  const double t0 = -0.8;
  const SliceState s = kasner_initial_data(KasnerParams{p[0], p[1], p[2]}, t0, grid, w);
  const Connection gam = christoffels(s.g);
  const WeylParts wp = weyl_parts(s.g, s.k, gam);
  const oracle::Kasner k{p, t0};
  const std::array<double, 3> e_diag{k.e_lower(0), k.e_lower(1), k.e_lower(2)};
  KasnerErrors out;
  for (std::size_t pt = 0; pt < grid.size(); ++pt) {
    const auto ref = oracle::pull_back_diagonal(e_diag, w.amplitude, grid.period, grid.coordinate(pt));
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) out.e = std::max(out.e, std::abs(wp.electric(a, b)[pt] - ref[a][b]));
  }
  out.b = sup_norm(wp.magnetic, s.g);
  out.ham = sup_norm(hamiltonian_constraint(s.g, s.k, gam));
  out.mom = sup_norm(momentum_constraint(s.g, s.k, gam), s.g);
  return out;
}

}  // namespace

TEST_CASE("ricci of flat metrics vanishes") {
  const GridSpec grid = GridSpec::cubic(8);
  for (const Sym3& g0 : {Sym3::identity(), Sym3::diagonal(4.0, 0.25, 9.0)}) {
    const SymTensorField g = SymTensorField::constant(grid, g0);
    CHECK(sup_norm(ricci(g, christoffels(g)), g) == 0.0);
    CHECK(sup_norm(scalar_curvature(g, christoffels(g))) == 0.0);
  }
}

TEST_CASE("ricci matches the conformally flat oracle at fourth order") {
  const double e16 = conformal_ricci_error(16);
  const double e32 = conformal_ricci_error(32);
  const double e64 = conformal_ricci_error(64);
  CHECK(std::log2(e16 / e32) == doctest::Approx(4.0).epsilon(0.1));
  CHECK(std::log2(e32 / e64) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("electric part on Minkowski and flat Kasner data") {
  const GridSpec grid = GridSpec::cubic(8);
  const SymTensorField g = SymTensorField::constant(grid, Sym3::identity());
  CHECK(sup_norm(electric_weyl(g, SymTensorField(grid), christoffels(g)), g) == 0.0);

  const SliceState flat = kasner_initial_data(KasnerParams{1, 0, 0}, -1.0, grid);
  CHECK(sup_norm(electric_weyl(flat.g, flat.k, christoffels(flat.g)), flat.g) < 1e-14);
}

TEST_CASE("electric part of homogeneous Kasner matches geodesic deviation") {
  const GridSpec grid = GridSpec::cubic(8);
  for (const KasnerParams& kp : {KasnerParams{}, KasnerParams::from_parameter(2.0)}) {
    for (double t : {-1.0, -0.5, -3.0}) {
      const SliceState s = kasner_initial_data(kp, t, grid);
      const SymTensorField e = electric_weyl(s.g, s.k, christoffels(s.g));
      const oracle::Kasner k{kp.exponents(), t};
      for (int i = 0; i < 3; ++i) CHECK(e(i, i)[0] == doctest::Approx(k.e_lower(i)).epsilon(1e-13));
      CHECK(std::abs(e(0, 1)[0]) + std::abs(e(0, 2)[0]) + std::abs(e(1, 2)[0]) < 1e-14);
    }
  }
}

TEST_CASE("warped Kasner: E, B and constraints converge at fourth order") {
  const std::array<double, 3> p{2.0 / 3, 2.0 / 3, -1.0 / 3};
  const KasnerErrors c = warped_kasner_errors(p, 16, 0.3);
  const KasnerErrors f = warped_kasner_errors(p, 32, 0.3);
  CHECK(std::log2(c.e / f.e) == doctest::Approx(4.0).epsilon(0.1));
  CHECK(std::log2(c.b / f.b) == doctest::Approx(4.0).epsilon(0.1));
  CHECK(std::log2(c.ham / f.ham) == doctest::Approx(4.0).epsilon(0.1));
  CHECK(std::log2(c.mom / f.mom) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("magnetic part") {
  const GridSpec grid = GridSpec::cubic(16);
  testing_support::Rng rng(21);
  const SymTensorField g = testing_support::smooth_metric(grid, rng);
  SymTensorField k = g;
  k *= -0.4;
  CHECK(sup_norm(magnetic_weyl(k, g, christoffels(g)), g) < 1e-12);

  const SliceState s = kasner_initial_data(KasnerParams{}, -1.0, grid);
  CHECK(sup_norm(magnetic_weyl(s.k, s.g, christoffels(s.g)), s.g) < 1e-14);

  const GridSpec fine = GridSpec::cubic(32);
  const SymTensorField flat = SymTensorField::constant(fine, Sym3::identity());
  SymTensorField shear(fine);
  shear(0, 1) = ScalarField::sample(fine, [](double, double, double z) { return std::sin(2 * pi * z); });
  const SymTensorField b = magnetic_weyl(shear, flat, christoffels(flat));
  const SymTensorField bl = magnetic_weyl(shear, flat, christoffels(flat), Orientation::LeftHanded);
  double err = 0.0, flip = 0.0;
  for (std::size_t pt = 0; pt < fine.size(); ++pt) {
    const double fp = 2 * pi * std::cos(2 * pi * fine.coordinate(pt)[2]);
    const Sym3 expect = Sym3::diagonal(-fp, fp, 0.0);
    for (int i = 0; i < 6; ++i) {
      err = std::max(err, std::abs(b.at(pt).v[i] - expect.v[i]));
      flip = std::max(flip, std::abs(bl.at(pt).v[i] + b.at(pt).v[i]));
    }
  }
  CHECK(err < 1.1 * std::pow(2 * pi, 5) * std::pow(fine.spacing(2), 4) / 30.0);
  CHECK(flip == 0.0);
}

TEST_CASE("Bel-Robinson components") {
  const GridSpec grid = GridSpec::cubic(8);
  testing_support::Rng rng(22);
  const SymTensorField g = testing_support::smooth_metric(grid, rng);

  SUBCASE("zero Weyl field") {
    const BRComponents q = br_components(SymTensorField(grid), SymTensorField(grid), g);
    CHECK(sup_norm(q.q_tttt) == 0.0);
    CHECK(sup_norm(q.q_attt, g) == 0.0);
    CHECK(sup_norm(q.q_abtt, g) == 0.0);
  }

  SUBCASE("purely electric field has no momentum density") {
    const SymTensorField e = traceless(testing_support::smooth_tensor(grid, rng, 1.0), g);
    const BRComponents q = br_components(e, SymTensorField(grid), g);
    CHECK(sup_norm(q.q_attt, g) == 0.0);
  }

  SUBCASE("random traceless fields against the contraction oracle") {
    const SymTensorField e = traceless(testing_support::smooth_tensor(grid, rng, 1.0), g);
    const SymTensorField b = traceless(testing_support::smooth_tensor(grid, rng, 1.0), g);
    const BRComponents q = br_components(e, b, g);
    for (std::size_t p = 0; p < grid.size(); p += 17) {
      const oracle::Metric o(oracle::full(g.at(p)));
      const auto fe = oracle::full(e.at(p));
      const auto fb = oracle::full(b.at(p));
      const double energy = oracle::norm_sq(fe, o) + oracle::norm_sq(fb, o);
      CHECK(q.q_tttt[p] == doctest::Approx(energy).epsilon(1e-12));
      const auto w = oracle::wedge(fe, fb, o);
      for (int a = 0; a < 3; ++a) CHECK(std::abs(q.q_attt.comp[a][p] - 2 * w[a]) < 1e-12 * energy);
      const auto ee = oracle::cross(fe, fe, o);
      const auto bb = oracle::cross(fb, fb, o);
      for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c) {
          const double expect = energy / 3 * o.g[a][c] - ee[a][c] - bb[a][c];
          CHECK(std::abs(q.q_abtt(a, c)[p] - expect) < 1e-12 * energy);
        }
      // Q_abTT is traceless and Q_TTTT dominates |Q_aTTT|
      CHECK(std::abs(oracle::trace(oracle::full(q.q_abtt.at(p)), o) - energy) < 1e-12 * energy);
      CHECK(std::sqrt(oracle::norm_sq(oracle::V3{q.q_attt.comp[0][p], q.q_attt.comp[1][p], q.q_attt.comp[2][p]}, o)) <=
            energy * (1 + 1e-12));
    }
  }
}

TEST_CASE("vacuum constraints") {
  const GridSpec grid = GridSpec::cubic(8);
  const SymTensorField g = SymTensorField::constant(grid, Sym3::identity());
  const Connection gam = christoffels(g);
  CHECK(sup_norm(hamiltonian_constraint(g, SymTensorField(grid), gam)) == 0.0);
  CHECK(sup_norm(momentum_constraint(g, SymTensorField(grid), gam), g) == 0.0);

  const double c = -0.7;
  SymTensorField k = g;
  k *= c;
  const ScalarField h = hamiltonian_constraint(g, k, gam);
  CHECK(h[0] == doctest::Approx(6 * c * c).epsilon(1e-14));
  CHECK(sup_norm(h) == doctest::Approx(6 * c * c).epsilon(1e-14));

  for (const auto& kp : {KasnerParams{}, KasnerParams{1, 0, 0}, KasnerParams::from_parameter(0.4)}) {
    const SliceState s = kasner_initial_data(kp, -1.3, grid);
    const Connection gs = christoffels(s.g);
    CHECK(sup_norm(hamiltonian_constraint(s.g, s.k, gs)) < 1e-14);
    CHECK(sup_norm(momentum_constraint(s.g, s.k, gs), s.g) < 1e-14);
  }
}

TEST_CASE("static residual") {
  const GridSpec grid = GridSpec::cubic(32);
  const SymTensorField g = SymTensorField::constant(grid, Sym3::identity());
  const Connection gam = christoffels(g);

  const auto [lap0, t0] = static_residual(g, ScalarField(grid, 2.0), gam);
  CHECK(sup_norm(lap0) == 0.0);
  CHECK(sup_norm(t0, g) == 0.0);

  const double eps = 0.1;
  const auto n = ScalarField::sample(grid, [&](double x, double, double) { return 1.0 + eps * std::sin(2 * pi * x); });
  const auto [lap, hess] = static_residual(g, n, gam);
  double err = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double expect = -4 * pi * pi * eps * std::sin(2 * pi * grid.coordinate(p)[0]);
    err = std::max({err, std::abs(lap[p] - expect), std::abs(hess(0, 0)[p] - expect), std::abs(hess(1, 1)[p]),
                    std::abs(hess(0, 1)[p])});
  }
  CHECK(err < 1e-3 * 4 * pi * pi * eps);

  // Kasner slices are flat with constant lapse, so this residual vanishes there;
  // a curved conformal slice with constant lapse does not.
  const SliceState s = kasner_initial_data(KasnerParams{}, -1.0, GridSpec::cubic(8));
  const auto [lk, tk] = static_residual(s.g, s.lapse, christoffels(s.g));
  CHECK(sup_norm(lk) == 0.0);
  CHECK(sup_norm(tk, s.g) == 0.0);

  SymTensorField curved = g;
  const auto conf = ScalarField::sample(grid, [](double x, double, double) { return std::exp(0.4 * std::sin(2 * pi * x)); });
  curved(0, 0) = conf;
  curved(1, 1) = conf;
  curved(2, 2) = conf;
  const auto [lc, tc] = static_residual(curved, ScalarField(grid, 1.0), christoffels(curved));
  CHECK(sup_norm(tc, curved) > 1.0);

  ScalarField bad(grid, 1.0);
  bad[3] = 0.0;
  try {
    static_residual(g, bad, gam);
    FAIL("expected NonPositiveLapse");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPositiveLapse);
  }
}
