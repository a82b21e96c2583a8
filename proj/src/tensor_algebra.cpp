#include "cmcbr/tensor_algebra.hpp"

#include <cmath>
#include <sstream>

#include "cmcbr/error.hpp"

namespace cmcbr {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

// A_b^d B_dc as a general matrix indexed [b][c].
Mat3 mixed_product(const Sym3& a, const Sym3& b, const Sym3& inv) {
  Mat3 ag{};
  for (int i = 0; i < 3; ++i)
    for (int d = 0; d < 3; ++d)
      for (int e = 0; e < 3; ++e) ag[i][d] += a(i, e) * inv(e, d);
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 3; ++c)
      for (int d = 0; d < 3; ++d) out[i][c] += ag[i][d] * b(d, c);
  return out;
}

// g_ab v^b
Vec3 lower(const Vec3& v, const Sym3& g) {
  Vec3 out{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) out[a] += g(a, b) * v[b];
  return out;
}

// Nonzero entries of the permutation symbol: for each p the two (c, d)
// with [pcd] != 0, and the sign of the first (the second has the opposite).
constexpr int kPermNext[3] = {1, 2, 0};
constexpr int kPermPrev[3] = {2, 0, 1};

// Covariant derivative del_t A_sb of a symmetric tensor at point p,
// from precomputed partials dA[t] (one SymTensorField per direction).
std::array<Sym3, 3> covariant_derivative_at(std::size_t p, const SymTensorField& a,
                                            const std::array<SymTensorField, 3>& da, const Connection& gamma) {
  const Sym3 av = a.at(p);
  std::array<Sym3, 3> out;
  for (int t = 0; t < 3; ++t) {
    Sym3 d = da[t].at(p);
    for (int s = 0; s < 3; ++s) {
      for (int b = s; b < 3; ++b) {
        double corr = 0.0;
        for (int k = 0; k < 3; ++k) corr += gamma(p, k, t, s) * av(k, b) + gamma(p, k, t, b) * av(s, k);
        d(s, b) -= corr;
      }
    }
    out[t] = d;
  }
  return out;
}

std::array<SymTensorField, 3> partials(const SymTensorField& a) {
  std::array<SymTensorField, 3> out;
  for (int t = 0; t < 3; ++t)
    for (int c = 0; c < 6; ++c) out[t].comp[c] = partial_derivative(a.comp[c], t);
  return out;
}

}  // namespace

MetricPoint metric_point(const Sym3& g) {
  const double m1 = g(0, 0);
  const double m2 = g(0, 0) * g(1, 1) - g(0, 1) * g(0, 1);
  const double det = determinant(g);
  if (!(m1 > 0.0) || !(m2 > 0.0) || !(det > 0.0) || !std::isfinite(det)) {
    std::ostringstream msg;
    msg << "metric not positive definite (leading minors " << m1 << ", " << m2 << ", " << det << ")";
    raise(ErrorKind::NonPositiveMetric, msg.str());
  }
  return MetricPoint{g, inverse(g, det), det, std::sqrt(det)};
}

double trace(const Sym3& a, const MetricPoint& m) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += m.inv(i, j) * a(i, j);
  return s;
}

Sym3 traceless(const Sym3& a, const MetricPoint& m) { return a - (trace(a, m) / 3.0) * m.g; }

double dot(const Sym3& a, const Sym3& b, const MetricPoint& m) {
  const Mat3 ab = mixed_product(a, b, m.inv);  // A_i^d B_dj
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += ab[i][j] * m.inv(j, i);
  return s;
}

double norm_sq(const Sym3& a, const MetricPoint& m) { return dot(a, a, m); }

double dot(const Vec3& u, const Vec3& v, const MetricPoint& m) {
  double s = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) s += m.inv(a, b) * u[a] * v[b];
  return s;
}

double norm_sq(const Vec3& v, const MetricPoint& m) { return dot(v, v, m); }

Vec3 raise(const Vec3& v, const MetricPoint& m) { return lower(v, m.inv); }

Sym3 contract_middle(const Sym3& a, const Sym3& b, const MetricPoint& m) {
  const Mat3 ab = mixed_product(a, b, m.inv);
  Sym3 out;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) out(i, j) = 0.5 * (ab[i][j] + ab[j][i]);
  return out;
}

Vec3 wedge(const Sym3& a, const Sym3& b, const MetricPoint& m, Orientation orientation) {
  const Mat3 ab = mixed_product(a, b, m.inv);
  // v^p = [pbc] M_bc
  Vec3 v;
  for (int p = 0; p < 3; ++p) v[p] = ab[kPermNext[p]][kPermPrev[p]] - ab[kPermPrev[p]][kPermNext[p]];
  Vec3 out = lower(v, m.g);
  const double s = static_cast<int>(orientation) / m.sqrt_det;
  for (double& x : out) x *= s;
  return out;
}

Sym3 cross(const Sym3& a, const Sym3& b, const MetricPoint& m) {
  // X^{pq} = [pcd][qef] A_ce B_df
  Sym3 x;
  for (int p = 0; p < 3; ++p) {
    const int c0 = kPermNext[p], d0 = kPermPrev[p];
    for (int q = p; q < 3; ++q) {
      const int e0 = kPermNext[q], f0 = kPermPrev[q];
      x(p, q) = a(c0, e0) * b(d0, f0) - a(c0, f0) * b(d0, e0) - a(d0, e0) * b(c0, f0) + a(d0, f0) * b(c0, e0);
    }
  }
  // eps_a^{cd} eps_b^{ef} A_ce B_df = g_ap g_bq X^{pq} / det g
  Sym3 out;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      double s = 0.0;
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) s += m.g(i, p) * x(p, q) * m.g(q, j);
      out(i, j) = s / m.det;
    }
  }
  const double scalar = (dot(a, b, m) - trace(a, m) * trace(b, m)) / 3.0;
  return out + scalar * m.g;
}

Connection::Connection(const GridSpec& grid) {
  for (auto& c : comp) c = ScalarField(grid);
}

Connection christoffels(const SymTensorField& g) {
  const GridSpec& grid = g.grid();
  const auto dg = partials(g);
  Connection gamma(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const MetricPoint m = metric_point(g.at(p));
    std::array<Sym3, 3> d;
    for (int c = 0; c < 3; ++c) d[c] = dg[c].at(p);
    // Gamma_{dbc} = (d_b g_dc + d_c g_bd - d_d g_bc) / 2
    double low[3][6];
    for (int dd = 0; dd < 3; ++dd)
      for (int b = 0; b < 3; ++b)
        for (int c = b; c < 3; ++c) low[dd][sym_index(b, c)] = 0.5 * (d[b](dd, c) + d[c](b, dd) - d[dd](b, c));
    for (int a = 0; a < 3; ++a) {
      for (int s = 0; s < 6; ++s) {
        double v = 0.0;
        for (int dd = 0; dd < 3; ++dd) v += m.inv(a, dd) * low[dd][s];
        gamma.comp[6 * a + s][p] = v;
      }
    }
  }
  return gamma;
}

ScalarField trace(const SymTensorField& a, const SymTensorField& g) {
  ScalarField out(a.grid());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = trace(a.at(p), metric_point(g.at(p)));
  return out;
}

SymTensorField traceless(const SymTensorField& a, const SymTensorField& g) {
  SymTensorField out(a.grid());
  for (std::size_t p = 0; p < out.size(); ++p) out.set(p, traceless(a.at(p), metric_point(g.at(p))));
  return out;
}

ScalarField norm_sq(const SymTensorField& a, const SymTensorField& g) {
  ScalarField out(a.grid());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = norm_sq(a.at(p), metric_point(g.at(p)));
  return out;
}

ScalarField norm_sq(const VectorField& v, const SymTensorField& g) {
  ScalarField out(v.grid());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = norm_sq(v.at(p), metric_point(g.at(p)));
  return out;
}

VectorField wedge(const SymTensorField& a, const SymTensorField& b, const SymTensorField& g,
                  Orientation orientation) {
  VectorField out(a.grid());
  for (std::size_t p = 0; p < out.size(); ++p)
    out.set(p, wedge(a.at(p), b.at(p), metric_point(g.at(p)), orientation));
  return out;
}

SymTensorField cross(const SymTensorField& a, const SymTensorField& b, const SymTensorField& g) {
  SymTensorField out(a.grid());
  for (std::size_t p = 0; p < out.size(); ++p) out.set(p, cross(a.at(p), b.at(p), metric_point(g.at(p))));
  return out;
}

VectorField gradient(const ScalarField& f) {
  VectorField out;
  for (int a = 0; a < 3; ++a) out.comp[a] = partial_derivative(f, a);
  return out;
}

SymTensorField hessian(const ScalarField& f, const Connection& gamma) {
  const VectorField df = gradient(f);
  SymTensorField out;
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) out(a, b) = partial_derivative(df.comp[b], a);
  for (std::size_t p = 0; p < f.size(); ++p) {
    const Vec3 d = df.at(p);
    for (int a = 0; a < 3; ++a) {
      for (int b = a; b < 3; ++b) {
        double corr = 0.0;
        for (int c = 0; c < 3; ++c) corr += gamma(p, c, a, b) * d[c];
        out(a, b)[p] -= corr;
      }
    }
  }
  return out;
}

SymTensorField curl(const SymTensorField& a, const SymTensorField& g, const Connection& gamma,
                    Orientation orientation) {
  const auto da = partials(a);
  SymTensorField out(a.grid());
  const double sign = static_cast<int>(orientation);
  for (std::size_t p = 0; p < out.size(); ++p) {
    const MetricPoint m = metric_point(g.at(p));
    const auto nabla = covariant_derivative_at(p, a, da, gamma);
    // Y^q_b = [qst] del_t A_sb ; C_ab = sign / sqrt(g) * g_aq Y^q_b
    double y[3][3];
    for (int q = 0; q < 3; ++q) {
      const int s0 = kPermNext[q], t0 = kPermPrev[q];
      for (int b = 0; b < 3; ++b) y[q][b] = nabla[t0](s0, b) - nabla[s0](t0, b);
    }
    double c[3][3];
    for (int i = 0; i < 3; ++i)
      for (int b = 0; b < 3; ++b) {
        double s = 0.0;
        for (int q = 0; q < 3; ++q) s += m.g(i, q) * y[q][b];
        c[i][b] = sign * s / m.sqrt_det;
      }
    Sym3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) r(i, j) = 0.5 * (c[i][j] + c[j][i]);
    out.set(p, r);
  }
  return out;
}

VectorField divergence(const SymTensorField& a, const SymTensorField& g, const Connection& gamma) {
  const auto da = partials(a);
  VectorField out(a.grid());
  for (std::size_t p = 0; p < out.size(); ++p) {
    const MetricPoint m = metric_point(g.at(p));
    const auto nabla = covariant_derivative_at(p, a, da, gamma);
    Vec3 v{};
    for (int b = 0; b < 3; ++b)
      for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 3; ++c) v[b] += m.inv(i, c) * nabla[i](c, b);
    out.set(p, v);
  }
  return out;
}

}  // namespace cmcbr
