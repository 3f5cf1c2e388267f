#pragma once

// Unit-determinant 2x2 complex matrices stored as 2^exponent * mantissa, so that
// long products and log|tr| never overflow.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "teichtrop/word.hpp"

namespace teichtrop {

using Complex = std::complex<double>;

class ScaledMatrix {
 public:
  /// Identity.
  ScaledMatrix() : entries_{Complex(1), Complex(0), Complex(0), Complex(1)}, exponent_(0) {}

  /// Row-major entries a, b, c, d scaled by 2^exponent.
  ScaledMatrix(Complex a, Complex b, Complex c, Complex d, std::int64_t exponent = 0)
      : entries_{a, b, c, d}, exponent_(exponent) {
    normalize();
  }

  static ScaledMatrix identity() { return {}; }

  static ScaledMatrix real(double a, double b, double c, double d) { return {Complex(a), Complex(b), Complex(c), Complex(d)}; }

  const std::array<Complex, 4>& entries() const { return entries_; }
  std::int64_t exponent() const { return exponent_; }

  /// Semantic entry value; overflows to inf for huge matrices.
  Complex value(int i) const { return entries_[static_cast<std::size_t>(i)] * std::exp2(static_cast<double>(exponent_)); }

  /// Semantic determinant computed in scaled form.
  Complex determinant() const {
    Complex det = entries_[0] * entries_[3] - entries_[1] * entries_[2];
    return det * std::exp2(2.0 * static_cast<double>(exponent_));
  }

  ScaledMatrix inverse() const {
    ScaledMatrix out = *this;
    out.entries_ = {entries_[3], -entries_[1], -entries_[2], entries_[0]};
    return out;
  }

  friend ScaledMatrix operator*(const ScaledMatrix& x, const ScaledMatrix& y) {
    const auto& p = x.entries_;
    const auto& q = y.entries_;
    ScaledMatrix out;
    out.entries_ = {p[0] * q[0] + p[1] * q[2], p[0] * q[1] + p[1] * q[3], p[2] * q[0] + p[3] * q[2],
                    p[2] * q[1] + p[3] * q[3]};
    out.exponent_ = x.exponent_ + y.exponent_;
    out.normalize();
    return out;
  }

  double max_abs_entry() const {
    double m = 0;
    for (const Complex& z : entries_) m = std::max(m, std::abs(z));
    return m;
  }

  /// Operator 2-norm distance to the identity; inf when the matrix is too large to compare.
  double distance_to_identity() const {
    if (exponent_ > 900) return std::numeric_limits<double>::infinity();
    const double s = std::exp2(static_cast<double>(exponent_));
    std::array<Complex, 4> m{entries_[0] * s - 1.0, entries_[1] * s, entries_[2] * s, entries_[3] * s - 1.0};
    return operator_norm(m);
  }

  /// Operator 2-norm of the semantic difference; both operands must be moderately sized.
  friend double distance(const ScaledMatrix& x, const ScaledMatrix& y) {
    const double sx = std::exp2(static_cast<double>(x.exponent_));
    const double sy = std::exp2(static_cast<double>(y.exponent_));
    std::array<Complex, 4> m;
    for (std::size_t i = 0; i < 4; ++i) m[i] = x.entries_[i] * sx - y.entries_[i] * sy;
    return operator_norm(m);
  }

  /// Largest absolute imaginary part relative to the largest entry.
  double max_imag_relative() const {
    double m = 0;
    for (const Complex& z : entries_) m = std::max(m, std::abs(z.imag()));
    const double scale = max_abs_entry();
    return scale > 0 ? m / scale : 0.0;
  }

 private:
  static double operator_norm(const std::array<Complex, 4>& m) {
    // sigma_max^2 is the larger eigenvalue of M^* M.
    const double f = std::norm(m[0]) + std::norm(m[1]) + std::norm(m[2]) + std::norm(m[3]);
    const double det = std::abs(m[0] * m[3] - m[1] * m[2]);
    const double disc = std::max(0.0, f * f - 4.0 * det * det);
    return std::sqrt(0.5 * (f + std::sqrt(disc)));
  }

  // Keeps max|entry| in [1, 2) with an exactly tracked binary exponent.
  void normalize() {
    const double m = max_abs_entry();
    if (m == 0.0 || !std::isfinite(m)) return;
    int e = 0;
    std::frexp(m, &e);  // m = f * 2^e, f in [0.5, 1)
    const int shift = e - 1;
    if (shift == 0) return;
    for (Complex& z : entries_) z = Complex(std::ldexp(z.real(), -shift), std::ldexp(z.imag(), -shift));
    exponent_ += shift;
  }

  std::array<Complex, 4> entries_;
  std::int64_t exponent_;
};

struct LogTrace {
  double log_abs_trace = -std::numeric_limits<double>::infinity();
  Complex phase{1.0, 0.0};  // trace / |trace|
  bool trace_zero = true;

  /// |trace| when representable, otherwise inf.
  double abs_trace() const { return trace_zero ? 0.0 : std::exp(log_abs_trace); }
  /// Real sign of a real trace (+1 / -1), 0 when the trace vanishes.
  int sign() const { return trace_zero ? 0 : (phase.real() >= 0 ? 1 : -1); }
};

/// log|tr| = log|tr(mantissa)| + exponent * log 2. A trace that vanishes to rounding
/// relative to the entries is flagged instead of returned.
inline LogTrace log_trace(const ScaledMatrix& m) {
  const Complex tr = m.entries()[0] + m.entries()[3];
  const double scale = m.max_abs_entry();
  LogTrace out;
  if (std::abs(tr) <= 8.0 * std::numeric_limits<double>::epsilon() * scale) return out;
  out.trace_zero = false;
  out.log_abs_trace = std::log(std::abs(tr)) + static_cast<double>(m.exponent()) * std::numbers::ln2;
  out.phase = tr / std::abs(tr);
  return out;
}

/// Product of generator images along the word (inverse letters use the SL2 inverse),
/// renormalized after every multiplication.
inline ScaledMatrix evaluate(std::span<const ScaledMatrix> images, const Word& word) {
  ScaledMatrix out;
  for (const Letter& l : word.letters()) {
    const ScaledMatrix& g = images[static_cast<std::size_t>(l.generator)];
    out = out * (l.inverted ? g.inverse() : g);
  }
  return out;
}

}  // namespace teichtrop
