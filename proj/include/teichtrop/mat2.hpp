#pragma once

// Plain real 2x2 matrices for the Fuchsian constructions and the axis-crossing oracle,
// where entries stay moderate and speed matters more than range.

#include <algorithm>
#include <cmath>
#include <utility>

namespace teichtrop {

/// A point of RP^1 = boundary of the upper half plane, as a homogeneous vector (x : y).
template <class T>
struct BasicVec2 {
  T x = 0;
  T y = 0;
};

template <class T>
struct BasicMat2 {
  T a = 1, b = 0, c = 0, d = 1;

  friend BasicMat2 operator*(const BasicMat2& m, const BasicMat2& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
  }
  friend BasicVec2<T> operator*(const BasicMat2& m, const BasicVec2<T>& v) {
    return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y};
  }

  T trace() const { return a + d; }
  T det() const { return a * d - b * c; }
  /// Inverse assuming unit determinant.
  BasicMat2 inverse() const { return {d, -b, -c, a}; }
  BasicMat2 scaled(T s) const { return {a * s, b * s, c * s, d * s}; }

  template <class U>
  BasicMat2<U> cast() const {
    return {static_cast<U>(a), static_cast<U>(b), static_cast<U>(c), static_cast<U>(d)};
  }
};

using Vec2 = BasicVec2<double>;
using Mat2 = BasicMat2<double>;

/// Orientation-free determinant of two homogeneous boundary points.
template <class T>
T cross(const BasicVec2<T>& p, const BasicVec2<T>& q) {
  return p.x * q.y - p.y * q.x;
}

/// Hyperbolic translation of length t along the imaginary axis, towards infinity for t > 0.
inline Mat2 translation_imaginary_axis(double t) { return {std::exp(t / 2), 0, 0, std::exp(-t / 2)}; }

/// Hyperbolic translation of length t along the unit circle geodesic (endpoints -1, 1).
inline Mat2 translation_unit_circle(double t) {
  return {std::cosh(t / 2), std::sinh(t / 2), std::sinh(t / 2), std::cosh(t / 2)};
}

/// Rotation by pi about i; swaps 0 and infinity.
inline Mat2 half_turn_at_i() { return {0, -1, 1, 0}; }

/// Eigenvector of m for eigenvalue lambda, taken from the better-conditioned row.
template <class T>
BasicVec2<T> eigenvector(const BasicMat2<T>& m, T lambda) {
  using std::hypot;
  BasicVec2<T> v1{m.b, lambda - m.a};
  BasicVec2<T> v2{lambda - m.d, m.c};
  const T n1 = hypot(v1.x, v1.y);
  const T n2 = hypot(v2.x, v2.y);
  BasicVec2<T> v = n1 >= n2 ? v1 : v2;
  const T n = std::max(n1, n2);
  return {v.x / n, v.y / n};
}

template <class T>
struct BasicHyperbolicData {
  T lambda = 1;               // eigenvalue of larger modulus
  BasicVec2<T> attracting;    // fixed point of the Moebius action with eigenvalue lambda
  BasicVec2<T> repelling;
};

using HyperbolicData = BasicHyperbolicData<double>;

/// Eigen-decomposition of a hyperbolic (|tr| > 2) unit-determinant matrix.
template <class T>
BasicHyperbolicData<T> hyperbolic_data(const BasicMat2<T>& m) {
  using std::sqrt;
  const T tr = m.trace();
  const T disc = sqrt(std::max(T(0), tr * tr - T(4)));
  // Larger-modulus root computed without cancellation.
  const T big = tr >= 0 ? (tr + disc) / 2 : (tr - disc) / 2;
  return {big, eigenvector(m, big), eigenvector(m, T(1) / big)};
}

/// F with det F = 1 and F^-1 m F = diag(lambda, 1/lambda), |lambda| > 1, so that the
/// axis of m becomes the imaginary axis translated towards infinity.
template <class T>
BasicMat2<T> eigenframe(const BasicMat2<T>& m) {
  using std::sqrt;
  const BasicHyperbolicData<T> h = hyperbolic_data(m);
  BasicVec2<T> p = h.attracting, q = h.repelling;
  T det = p.x * q.y - q.x * p.y;
  if (det < 0) {
    q = {-q.x, -q.y};
    det = -det;
  }
  const T s = T(1) / sqrt(det);
  return {p.x * s, q.x * s, p.y * s, q.y * s};
}

/// Signed orientation of three boundary points (invariant under rescaling each vector).
inline int cyclic_orientation(const Vec2& p, const Vec2& q, const Vec2& r) {
  const double s = cross(p, q) * cross(q, r) * cross(r, p);
  return s > 0 ? 1 : (s < 0 ? -1 : 0);
}

}  // namespace teichtrop
