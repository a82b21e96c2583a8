#include "cmcbr/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cmcbr/error.hpp"
#include "cmcbr/tensor_algebra.hpp"

namespace cmcbr {

GridSpec GridSpec::cubic(int points, double period) {
  GridSpec g;
  g.n = {points, points, points};
  g.period = {period, period, period};
  return g;
}

void GridSpec::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (n[a] < kMinPointsPerAxis) {
      std::ostringstream msg;
      msg << "axis " << a << " has " << n[a] << " points, need at least " << kMinPointsPerAxis;
      raise(ErrorKind::InvalidGrid, msg.str());
    }
    if (!(period[a] > 0.0) || !std::isfinite(period[a])) {
      std::ostringstream msg;
      msg << "axis " << a << " period " << period[a] << " is not positive";
      raise(ErrorKind::InvalidGrid, msg.str());
    }
  }
}

double GridSpec::min_spacing() const { return std::min({spacing(0), spacing(1), spacing(2)}); }
double GridSpec::max_spacing() const { return std::max({spacing(0), spacing(1), spacing(2)}); }

Vec3 GridSpec::coordinate(std::size_t p) const {
  const std::size_t nx = static_cast<std::size_t>(n[0]);
  const std::size_t ny = static_cast<std::size_t>(n[1]);
  const std::size_t i = p % nx;
  const std::size_t j = (p / nx) % ny;
  const std::size_t k = p / (nx * ny);
  return {static_cast<double>(i) * spacing(0), static_cast<double>(j) * spacing(1),
          static_cast<double>(k) * spacing(2)};
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  for (std::size_t p = 0; p < values_.size(); ++p) values_[p] += other.values_[p];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

SymTensorField::SymTensorField(const GridSpec& grid)
    : comp{ScalarField(grid), ScalarField(grid), ScalarField(grid),
           ScalarField(grid), ScalarField(grid), ScalarField(grid)} {}

SymTensorField SymTensorField::constant(const GridSpec& grid, const Sym3& value) {
  SymTensorField out;
  for (int c = 0; c < 6; ++c) out.comp[c] = ScalarField(grid, value.v[c]);
  return out;
}

SymTensorField& SymTensorField::operator+=(const SymTensorField& other) {
  for (int c = 0; c < 6; ++c) comp[c] += other.comp[c];
  return *this;
}

SymTensorField& SymTensorField::operator*=(double s) {
  for (auto& c : comp) c *= s;
  return *this;
}

ScalarField axpy(const ScalarField& a, double s, const ScalarField& b) {
  ScalarField out(a);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] += s * b[p];
  return out;
}

SymTensorField axpy(const SymTensorField& a, double s, const SymTensorField& b) {
  SymTensorField out;
  for (int c = 0; c < 6; ++c) out.comp[c] = axpy(a.comp[c], s, b.comp[c]);
  return out;
}

bool all_finite(const ScalarField& f) {
  return std::all_of(f.values().begin(), f.values().end(), [](double v) { return std::isfinite(v); });
}

bool all_finite(const SymTensorField& f) {
  return std::all_of(f.comp.begin(), f.comp.end(), [](const ScalarField& c) { return all_finite(c); });
}

ScalarField partial_derivative(const ScalarField& f, int axis) {
  const GridSpec& grid = f.grid();
  ScalarField out(grid);
  const int len = grid.n[axis];
  const double scale = 1.0 / (12.0 * grid.spacing(axis));

  // wrapped neighbour offsets along the axis, in units of the axis stride
  std::vector<int> m2(len), m1(len), p1(len), p2(len);
  for (int c = 0; c < len; ++c) {
    m2[c] = (c - 2 + len) % len - c;
    m1[c] = (c - 1 + len) % len - c;
    p1[c] = (c + 1) % len - c;
    p2[c] = (c + 2) % len - c;
  }
  const std::ptrdiff_t stride = axis == 0 ? 1 : (axis == 1 ? grid.n[0] : std::ptrdiff_t{grid.n[0]} * grid.n[1]);

  const double* src = f.values().data();
  double* dst = out.values().data();
  std::size_t p = 0;
  for (int k = 0; k < grid.n[2]; ++k) {
    for (int j = 0; j < grid.n[1]; ++j) {
      for (int i = 0; i < grid.n[0]; ++i, ++p) {
        const int c = axis == 0 ? i : (axis == 1 ? j : k);
        const double* s = src + p;
        dst[p] = scale * (s[m2[c] * stride] - 8.0 * s[m1[c] * stride] + 8.0 * s[p1[c] * stride] -
                          s[p2[c] * stride]);
      }
    }
  }
  return out;
}

double integrate(const ScalarField& f, const SymTensorField& metric) {
  double sum = 0.0;
  for (std::size_t p = 0; p < f.size(); ++p) sum += f[p] * metric_point(metric.at(p)).sqrt_det;
  return sum * f.grid().cell_volume();
}

double coordinate_sum(const ScalarField& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return sum * f.grid().cell_volume();
}

double sup_norm(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double sup_norm(const ScalarField& f, const SymTensorField& metric) {
  for (std::size_t p = 0; p < f.size(); ++p) metric_point(metric.at(p));
  return sup_norm(f);
}

double sup_norm(const VectorField& v, const SymTensorField& metric) {
  double m = 0.0;
  for (std::size_t p = 0; p < v.size(); ++p) m = std::max(m, norm_sq(v.at(p), metric_point(metric.at(p))));
  return std::sqrt(m);
}

double sup_norm(const SymTensorField& a, const SymTensorField& metric) {
  double m = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) m = std::max(m, norm_sq(a.at(p), metric_point(metric.at(p))));
  return std::sqrt(m);
}

}  // namespace cmcbr
