#pragma once

// All roots of a univariate complex polynomial by Aberth-Ehrlich simultaneous iteration,
// started from the Newton polygon of the coefficient moduli (so roots of very different
// sizes get starting points of the right size) and finished with Newton polishing.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

namespace teichtrop {

struct RootOptions {
  int max_iterations = 200;
  double residual_tolerance = 1e-10;  // |p(z)| / sum |c_k| |z|^k
};

struct RootResult {
  std::vector<std::complex<double>> roots;  // with multiplicity; exact zeros included
  std::vector<double> residuals;            // relative residual per root
  int iterations = 0;
  bool converged = false;  // every residual below tolerance
};

namespace detail {

struct PolyValue {
  std::complex<double> newton;  // p / p'
  double residual;              // |p| / sum |c_k| |z|^k
};

/// Horner evaluation in z for |z| <= 1 and in 1/z (reversed coefficients) otherwise, so
/// that nothing overflows for roots of extreme size.
inline PolyValue evaluate_poly(const std::vector<std::complex<double>>& c, std::complex<double> z) {
  using C = std::complex<double>;
  const std::size_t d = c.size() - 1;
  if (std::abs(z) <= 1) {
    C p = c[d], dp = 0;
    double scale = std::abs(c[d]);
    const double az = std::abs(z);
    for (std::size_t k = d; k-- > 0;) {
      dp = dp * z + p;
      p = p * z + c[k];
      scale = scale * az + std::abs(c[k]);
    }
    return {dp == C(0) ? C(0) : p / dp, scale > 0 ? std::abs(p) / scale : 0.0};
  }
  const C y = C(1) / z;
  const double ay = std::abs(y);
  C q = c[0], dq = 0;
  double scale = std::abs(c[0]);
  for (std::size_t k = 1; k <= d; ++k) {
    dq = dq * y + q;
    q = q * y + c[k];
    scale = scale * ay + std::abs(c[k]);
  }
  // p(z) = z^d q(y), p'(z) = z^(d-1) (d q(y) - y q'(y)).
  const C denom = static_cast<double>(d) * q - y * dq;
  return {denom == C(0) ? C(0) : z * q / denom, scale > 0 ? std::abs(q) / scale : 0.0};
}

/// Starting points: for each edge of the upper convex hull of (k, log|c_k|), as many points
/// as the edge is wide on a circle of the matching radius.
inline std::vector<std::complex<double>> initial_roots(const std::vector<std::complex<double>>& c) {
  const std::size_t d = c.size() - 1;
  std::vector<std::size_t> hull;
  auto logabs = [&c](std::size_t k) {
    const double a = std::abs(c[k]);
    return a > 0 ? std::log(a) : -std::numeric_limits<double>::infinity();
  };
  for (std::size_t k = 0; k <= d; ++k) {
    if (c[k] == std::complex<double>(0)) continue;
    while (hull.size() >= 2) {
      const std::size_t i = hull[hull.size() - 2], j = hull.back();
      // Drop j when it lies on or below the segment from i to k.
      const double lhs = (logabs(j) - logabs(i)) * static_cast<double>(k - i);
      const double rhs = (logabs(k) - logabs(i)) * static_cast<double>(j - i);
      if (lhs <= rhs)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(k);
  }
  std::vector<std::complex<double>> out;
  out.reserve(d);
  constexpr double kOffset = 0.7;
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const std::size_t i = hull[h], j = hull[h + 1];
    const double width = static_cast<double>(j - i);
    const double radius = std::exp((logabs(i) - logabs(j)) / width);
    for (std::size_t m = 0; m < j - i; ++m) {
      const double turn = static_cast<double>(m) / width + static_cast<double>(i) / static_cast<double>(d);
      const double angle = 2 * std::numbers::pi * turn + kOffset;
      out.push_back(std::polar(radius, angle));
    }
  }
  return out;
}

}  // namespace detail

/// Roots of sum_k coefficients[k] z^k. Trailing zero coefficients lower the degree;
/// leading zero coefficients give exact zero roots.
inline RootResult find_roots(std::vector<std::complex<double>> coefficients, const RootOptions& options = {}) {
  using C = std::complex<double>;
  RootResult out;
  while (!coefficients.empty() && coefficients.back() == C(0)) coefficients.pop_back();
  std::size_t zeros = 0;
  while (zeros < coefficients.size() && coefficients[zeros] == C(0)) ++zeros;
  for (std::size_t k = 0; k < zeros && k + 1 < coefficients.size(); ++k) {
    out.roots.push_back(0);
    out.residuals.push_back(0);
  }
  coefficients.erase(coefficients.begin(), coefficients.begin() + static_cast<std::ptrdiff_t>(zeros));
  out.converged = true;
  if (coefficients.size() <= 1) return out;

  const std::size_t d = coefficients.size() - 1;
  std::vector<C> z = detail::initial_roots(coefficients);
  std::vector<bool> done(d, false);
  constexpr double kEps = std::numeric_limits<double>::epsilon();

  int it = 0;
  for (; it < options.max_iterations; ++it) {
    bool all_done = true;
    for (std::size_t i = 0; i < d; ++i) {
      if (done[i]) continue;
      const detail::PolyValue v = detail::evaluate_poly(coefficients, z[i]);
      if (v.residual <= 4 * kEps * static_cast<double>(d + 1)) {
        done[i] = true;
        continue;
      }
      all_done = false;
      C sum = 0;
      for (std::size_t j = 0; j < d; ++j)
        if (j != i) sum += C(1) / (z[i] - z[j]);
      const C w = v.newton / (C(1) - v.newton * sum);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) continue;
      z[i] -= w;
      if (std::abs(w) <= 4 * kEps * std::abs(z[i])) done[i] = true;
    }
    if (all_done) break;
  }
  out.iterations = it;

  for (std::size_t i = 0; i < d; ++i) {
    // Newton polish, kept only while it lowers the residual.
    detail::PolyValue v = detail::evaluate_poly(coefficients, z[i]);
    for (int k = 0; k < 3 && v.residual > 0; ++k) {
      const C next = z[i] - v.newton;
      const detail::PolyValue nv = detail::evaluate_poly(coefficients, next);
      if (!(nv.residual < v.residual)) break;
      z[i] = next;
      v = nv;
    }
    out.roots.push_back(z[i]);
    out.residuals.push_back(v.residual);
    if (!(v.residual < options.residual_tolerance)) out.converged = false;
  }
  return out;
}

}  // namespace teichtrop
