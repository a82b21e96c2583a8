#pragma once

// Periodic 3-torus grid, value-semantic fields, 4th-order centered
// differences and metric-weighted reductions.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "cmcbr/point_tensor.hpp"

namespace cmcbr {

inline constexpr int kMinPointsPerAxis = 8;

struct GridSpec {
  std::array<int, 3> n{kMinPointsPerAxis, kMinPointsPerAxis, kMinPointsPerAxis};
  std::array<double, 3> period{1.0, 1.0, 1.0};

  static GridSpec cubic(int points, double period = 1.0);

  /// Throws InvalidGrid unless every axis has >= 8 points and a positive period.
  void validate() const;

  std::size_t size() const {
    return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]) *
           static_cast<std::size_t>(n[2]);
  }
  double spacing(int axis) const { return period[axis] / n[axis]; }
  double min_spacing() const;
  double max_spacing() const;
  double cell_volume() const { return spacing(0) * spacing(1) * spacing(2); }
  double coordinate_volume() const { return period[0] * period[1] * period[2]; }

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(n[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(n[1]) * static_cast<std::size_t>(k));
  }
  Vec3 coordinate(std::size_t p) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec& grid, double value = 0.0)
      : grid_(grid), values_(grid.size(), value) {}

  /// Samples f(x, y, z) at every grid point.
  template <class F>
  static ScalarField sample(const GridSpec& grid, F&& f) {
    ScalarField out(grid);
    for (std::size_t p = 0; p < out.size(); ++p) {
      const Vec3 x = grid.coordinate(p);
      out.values_[p] = f(x[0], x[1], x[2]);
    }
    return out;
  }

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t p) const { return values_[p]; }
  double& operator[](std::size_t p) { return values_[p]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator*=(double s);

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// Covector field: three lower-index components.
struct VectorField {
  std::array<ScalarField, 3> comp;

  VectorField() = default;
  explicit VectorField(const GridSpec& grid) : comp{ScalarField(grid), ScalarField(grid), ScalarField(grid)} {}

  const GridSpec& grid() const { return comp[0].grid(); }
  std::size_t size() const { return comp[0].size(); }

  Vec3 at(std::size_t p) const { return {comp[0][p], comp[1][p], comp[2][p]}; }
  void set(std::size_t p, const Vec3& v) {
    for (int a = 0; a < 3; ++a) comp[a][p] = v[a];
  }

  friend bool operator==(const VectorField&, const VectorField&) = default;
};

/// Symmetric lower-index 2-tensor; only the six independent components exist.
struct SymTensorField {
  std::array<ScalarField, 6> comp;

  SymTensorField() = default;
  explicit SymTensorField(const GridSpec& grid);

  static SymTensorField constant(const GridSpec& grid, const Sym3& value);

  const GridSpec& grid() const { return comp[0].grid(); }
  std::size_t size() const { return comp[0].size(); }

  const ScalarField& operator()(int a, int b) const { return comp[sym_index(a, b)]; }
  ScalarField& operator()(int a, int b) { return comp[sym_index(a, b)]; }

  Sym3 at(std::size_t p) const {
    Sym3 s;
    for (int c = 0; c < 6; ++c) s.v[c] = comp[c][p];
    return s;
  }
  void set(std::size_t p, const Sym3& s) {
    for (int c = 0; c < 6; ++c) comp[c][p] = s.v[c];
  }

  SymTensorField& operator+=(const SymTensorField& other);
  SymTensorField& operator*=(double s);

  friend bool operator==(const SymTensorField&, const SymTensorField&) = default;
};

/// out = a + s * b, componentwise.
ScalarField axpy(const ScalarField& a, double s, const ScalarField& b);
SymTensorField axpy(const SymTensorField& a, double s, const SymTensorField& b);

bool all_finite(const ScalarField& f);
bool all_finite(const SymTensorField& f);

/// 4th-order centered periodic difference along axis 0, 1 or 2.
ScalarField partial_derivative(const ScalarField& f, int axis);

/// Riemann sum of f * sqrt(det g) * cell volume. Throws NonPositiveMetric.
double integrate(const ScalarField& f, const SymTensorField& metric);

/// Coordinate Riemann sum of f (no metric weight).
double coordinate_sum(const ScalarField& f);

double sup_norm(const ScalarField& f);
double sup_norm(const ScalarField& f, const SymTensorField& metric);
/// Max over points of sqrt(g^{ab} v_a v_b).
double sup_norm(const VectorField& v, const SymTensorField& metric);
/// Max over points of sqrt(g^{ac} g^{bd} A_ab A_cd).
double sup_norm(const SymTensorField& a, const SymTensorField& metric);

}  // namespace cmcbr
