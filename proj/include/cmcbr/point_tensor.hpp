#pragma once

#include <array>

namespace cmcbr {

using Vec3 = std::array<double, 3>;

/// Storage slot of the lower-index pair (a, b) in a symmetric 3x3 tensor.
/// Order: xx, xy, xz, yy, yz, zz.
constexpr int sym_index(int a, int b) {
  constexpr int table[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  return table[a][b];
}

/// Totally antisymmetric symbol [abc] with [012] = +1.
constexpr int permutation_sign(int a, int b, int c) {
  if (a == b || b == c || a == c) return 0;
  // even permutations of (0,1,2) are the cyclic ones
  return ((b - a + 3) % 3 == 1) ? 1 : -1;
}

/// One symmetric 3x3 tensor at a point.
struct Sym3 {
  std::array<double, 6> v{};

  constexpr double operator()(int a, int b) const { return v[sym_index(a, b)]; }
  constexpr double& operator()(int a, int b) { return v[sym_index(a, b)]; }

  static constexpr Sym3 identity() { return Sym3{{1.0, 0.0, 0.0, 1.0, 0.0, 1.0}}; }
  static constexpr Sym3 diagonal(double xx, double yy, double zz) {
    return Sym3{{xx, 0.0, 0.0, yy, 0.0, zz}};
  }

  friend constexpr bool operator==(const Sym3&, const Sym3&) = default;
};

constexpr Sym3 operator+(const Sym3& a, const Sym3& b) {
  Sym3 r;
  for (int i = 0; i < 6; ++i) r.v[i] = a.v[i] + b.v[i];
  return r;
}

constexpr Sym3 operator-(const Sym3& a, const Sym3& b) {
  Sym3 r;
  for (int i = 0; i < 6; ++i) r.v[i] = a.v[i] - b.v[i];
  return r;
}

constexpr Sym3 operator*(double s, const Sym3& a) {
  Sym3 r;
  for (int i = 0; i < 6; ++i) r.v[i] = s * a.v[i];
  return r;
}

constexpr double determinant(const Sym3& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(1, 2)) -
         m(0, 1) * (m(0, 1) * m(2, 2) - m(1, 2) * m(0, 2)) +
         m(0, 2) * (m(0, 1) * m(1, 2) - m(1, 1) * m(0, 2));
}

/// Closed-form inverse given a precomputed nonzero determinant.
constexpr Sym3 inverse(const Sym3& m, double det) {
  const double s = 1.0 / det;
  Sym3 r;
  r(0, 0) = s * (m(1, 1) * m(2, 2) - m(1, 2) * m(1, 2));
  r(0, 1) = s * (m(0, 2) * m(1, 2) - m(0, 1) * m(2, 2));
  r(0, 2) = s * (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1));
  r(1, 1) = s * (m(0, 0) * m(2, 2) - m(0, 2) * m(0, 2));
  r(1, 2) = s * (m(0, 1) * m(0, 2) - m(0, 0) * m(1, 2));
  r(2, 2) = s * (m(0, 0) * m(1, 1) - m(0, 1) * m(0, 1));
  return r;
}

}  // namespace cmcbr
