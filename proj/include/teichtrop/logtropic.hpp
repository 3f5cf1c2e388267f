#pragma once

// Amoebas, logarithmic limit sets and the Bergman dimension probe.
//
// Directions live in the positive projectivization (R^n \ 0) / R+, represented by unit
// vectors; antipodal directions are distinct and are never merged.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "teichtrop/error.hpp"
#include "teichtrop/roots.hpp"
#include "teichtrop/symeig.hpp"

namespace teichtrop {

using RealVector = std::vector<double>;

struct LogPoint {
  RealVector coords;
};

struct DirectionEstimate {
  RealVector direction;        // unit vector
  RealVector scale_sequence;   // c_i = 1 / |x_i|
  double residual = 0;         // angular spread of the tail estimates
  bool converged = false;      // residual < tolerance
};

// ---------------------------------------------------------------------------------------
// Vector helpers

inline double norm(const RealVector& x) {
  double scale = 0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0) return 0;
  double s = 0;
  for (double v : x) s += (v / scale) * (v / scale);
  return scale * std::sqrt(s);
}

inline RealVector normalized(const RealVector& x) {
  const double n = norm(x);
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "cannot normalize the zero vector");
  RealVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] / n;
  return out;
}

namespace detail {

/// Angle for vectors already of unit length.
inline double unit_angle(const RealVector& a, const RealVector& b) {
  double diff = 0, sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    sum += (a[i] + b[i]) * (a[i] + b[i]);
  }
  return 2 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

}  // namespace detail

/// Angle between the rays through u and v, in [0, pi]; accurate for tiny angles.
inline double angle_between(const RealVector& u, const RealVector& v) {
  if (u.size() != v.size()) throw Error(ErrorCode::InvalidArgument, "dimension mismatch in angle");
  return detail::unit_angle(normalized(u), normalized(v));
}

/// f(x) = x / (1 + |x|), Euclidean norm: a homeomorphism onto the open unit ball.
inline RealVector rescale(const RealVector& x) {
  const double n = norm(x);
  RealVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] / (1 + n);
  return out;
}

// ---------------------------------------------------------------------------------------
// Projective limits

struct ProjectiveLimitOptions {
  double tolerance = 1e-3;              // residual threshold for `converged`
  double divergence_threshold = 1e3;    // last-quartile norms must exceed this
  std::size_t min_points = 8;
};

namespace detail {

/// Least-squares fit of u_i ~ a + b s_i + c s_i^2 with s_i = 1/i over the points
/// [first, last), returning a / |a|: the limit of the unit vectors, with the O(1/i)
/// approach removed.
inline RealVector extrapolated_direction(const std::vector<RealVector>& units, std::size_t first, std::size_t last) {
  const std::size_t m = last - first;
  const std::size_t dim = units[first].size();
  const std::size_t terms = m >= 6 ? 3 : (m >= 3 ? 2 : 1);
  std::vector<double> s(m);
  double lo = 1e300, hi = -1e300;
  for (std::size_t k = 0; k < m; ++k) {
    s[k] = 1.0 / static_cast<double>(first + k + 1);
    lo = std::min(lo, s[k]);
    hi = std::max(hi, s[k]);
  }
  const double mid = (lo + hi) / 2, half = hi > lo ? (hi - lo) / 2 : 1;
  // Basis in the centred variable t = (s - mid) / half; the limit is t0 = -mid / half.
  auto basis = [&](double t, std::size_t j) { return j == 0 ? 1.0 : (j == 1 ? t : t * t); };
  double ata[3][3] = {};
  std::vector<std::array<double, 3>> rows(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double t = (s[k] - mid) / half;
    for (std::size_t j = 0; j < terms; ++j) rows[k][j] = basis(t, j);
    for (std::size_t i = 0; i < terms; ++i)
      for (std::size_t j = 0; j < terms; ++j) ata[i][j] += rows[k][i] * rows[k][j];
  }
  // Invert the (at most 3x3) normal matrix by Gauss-Jordan with partial pivoting.
  double inv[3][3] = {};
  for (std::size_t i = 0; i < terms; ++i) inv[i][i] = 1;
  for (std::size_t col = 0; col < terms; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < terms; ++r)
      if (std::abs(ata[r][col]) > std::abs(ata[piv][col])) piv = r;
    std::swap(ata[col], ata[piv]);
    std::swap(inv[col], inv[piv]);
    const double p = ata[col][col];
    for (std::size_t j = 0; j < terms; ++j) {
      ata[col][j] /= p;
      inv[col][j] /= p;
    }
    for (std::size_t r = 0; r < terms; ++r) {
      if (r == col) continue;
      const double f = ata[r][col];
      for (std::size_t j = 0; j < terms; ++j) {
        ata[r][j] -= f * ata[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  const double t0 = -mid / half;
  // Weights w_k such that the fitted value at t0 is sum_k w_k u_k.
  std::array<double, 3> at0{};
  for (std::size_t j = 0; j < terms; ++j) at0[j] = basis(t0, j);
  std::vector<double> w(m, 0.0);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = 0; i < terms; ++i)
      for (std::size_t j = 0; j < terms; ++j) w[k] += at0[i] * inv[i][j] * rows[k][j];
  RealVector out(dim, 0.0);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t d = 0; d < dim; ++d) out[d] += w[k] * units[first + k][d];
  return teichtrop::normalized(out);
}

}  // namespace detail

/// Direction of escape of a divergent sequence: c_i = 1/|x_i|, and the limit of c_i x_i is
/// estimated from the second half of the sequence by extrapolating in 1/i. The residual is
/// the largest angle between the estimates from the sequences truncated at each index of
/// the last quartile.
inline DirectionEstimate projective_limit(const std::vector<RealVector>& points, const ProjectiveLimitOptions& options = {}) {
  const std::size_t n = points.size();
  if (n < std::max<std::size_t>(options.min_points, 4))
    throw Error(ErrorCode::InvalidArgument, "projective_limit needs at least " + std::to_string(options.min_points) + " points");
  const std::size_t dim = points.front().size();
  for (const RealVector& p : points) {
    if (p.size() != dim) throw Error(ErrorCode::InvalidArgument, "points of different dimensions");
    for (double v : p)
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite coordinate");
  }

  DirectionEstimate out;
  out.scale_sequence.resize(n);
  std::vector<RealVector> units(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = norm(points[i]);
    out.scale_sequence[i] = r > 0 ? 1 / r : 0;
    units[i] = r > 0 ? normalized(points[i]) : RealVector(dim, 0.0);
  }
  const std::size_t quartile = n - n / 4;
  for (std::size_t i = quartile; i < n; ++i) {
    if (!(norm(points[i]) > options.divergence_threshold))
      throw Error(ErrorCode::NotDivergent, "norm " + std::to_string(norm(points[i])) + " at index " + std::to_string(i) +
                                               " does not exceed the divergence threshold");
  }
  if (!(norm(points[n - 1]) > norm(points[quartile])))
    throw Error(ErrorCode::NotDivergent, "norms are not increasing on the last quartile");

  std::vector<RealVector> estimates;
  for (std::size_t end = quartile; end <= n; ++end) {
    if (end < 4) continue;
    estimates.push_back(detail::extrapolated_direction(units, end / 2, end));
  }
  out.direction = estimates.back();
  out.residual = 0;
  for (std::size_t i = 0; i < estimates.size(); ++i)
    for (std::size_t j = i + 1; j < estimates.size(); ++j)
      out.residual = std::max(out.residual, angle_between(estimates[i], estimates[j]));
  out.converged = out.residual < options.tolerance;
  return out;
}

inline DirectionEstimate projective_limit(const std::vector<LogPoint>& points, const ProjectiveLimitOptions& options = {}) {
  std::vector<RealVector> raw;
  raw.reserve(points.size());
  for (const LogPoint& p : points) raw.push_back(p.coords);
  return projective_limit(raw, options);
}

/// Throws NOT_CONVERGED for an estimate whose residual is above tolerance.
inline const DirectionEstimate& require_converged(const DirectionEstimate& e) {
  if (!e.converged)
    throw Error(ErrorCode::NotConverged, "direction estimate residual " + std::to_string(e.residual) + " above tolerance");
  return e;
}

// ---------------------------------------------------------------------------------------
// Varieties

enum class VarietyKind { Parametrized, Hypersurface };

struct Monomial {
  std::vector<int> exponents;
  std::complex<double> coefficient;
};

struct VarietySpec {
  std::string name;
  std::size_t ambient_dim = 0;
  VarietyKind kind = VarietyKind::Hypersurface;
  std::size_t declared_dim = 0;
  std::vector<Monomial> terms;                                // hypersurface polynomial
  std::vector<std::vector<std::complex<double>>> coordinates;  // parametrized: x_k(t), ascending powers
  std::vector<RealVector> expected_rays;                       // recorded oracle rays, unit vectors
};

inline void validate(const VarietySpec& spec) {
  if (spec.ambient_dim < 1) throw Error(ErrorCode::InvalidArgument, "variety needs ambient dimension >= 1");
  if (spec.kind == VarietyKind::Hypersurface) {
    if (spec.terms.empty()) throw Error(ErrorCode::InvalidArgument, "hypersurface polynomial is zero");
    for (const Monomial& m : spec.terms) {
      if (m.exponents.size() != spec.ambient_dim) throw Error(ErrorCode::InvalidArgument, "exponent tuple of wrong length");
      for (int e : m.exponents)
        if (e < 0 || e > 6) throw Error(ErrorCode::InvalidArgument, "exponents must lie in [0, 6]");
    }
  } else {
    if (spec.coordinates.size() != spec.ambient_dim)
      throw Error(ErrorCode::InvalidArgument, "parametrization needs one polynomial per coordinate");
    for (const auto& c : spec.coordinates)
      if (std::all_of(c.begin(), c.end(), [](std::complex<double> z) { return z == 0.0; }))
        throw Error(ErrorCode::InvalidArgument, "coordinate polynomial is zero");
  }
  const std::size_t expected = spec.kind == VarietyKind::Hypersurface ? spec.ambient_dim - 1 : 1;
  if (spec.declared_dim != expected)
    throw Error(ErrorCode::InvalidArgument, "declared_dim must be " + std::to_string(expected) + " for this kind of variety");
  for (const RealVector& r : spec.expected_rays)
    if (r.size() != spec.ambient_dim) throw Error(ErrorCode::InvalidArgument, "expected ray of wrong dimension");
}

namespace detail {

inline std::complex<double> parse_coefficient(std::istringstream& in, const std::string& line) {
  double re = 0, im = 0;
  if (!(in >> re)) throw Error(ErrorCode::ParseError, "missing coefficient in '" + line + "'");
  if (!(in >> im)) im = 0;
  return {re, im};
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Plain-text variety description:
///   kind = hypersurface | parametrized, ambient_dim = n, declared_dim = d, name = ...,
///   ray = r1 r2 ...            (optional recorded limit directions)
///   e1 e2 ... en : re [im]     (hypersurface term)
///   x<k> : e : re [im]         (parametrized: adds re t^e to coordinate k, 1-based)
inline VarietySpec parse_variety(std::istream& in) {
  VarietySpec spec;
  bool have_kind = false, have_dim = false, have_declared = false;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = detail::trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      const std::string key = detail::trim(line.substr(0, eq));
      const std::string value = detail::trim(line.substr(eq + 1));
      std::istringstream vs(value);
      if (key == "kind") {
        if (value == "hypersurface")
          spec.kind = VarietyKind::Hypersurface;
        else if (value == "parametrized")
          spec.kind = VarietyKind::Parametrized;
        else
          throw Error(ErrorCode::ParseError, "unknown variety kind '" + value + "'");
        have_kind = true;
      } else if (key == "ambient_dim") {
        if (!(vs >> spec.ambient_dim)) throw Error(ErrorCode::ParseError, "bad ambient_dim");
        have_dim = true;
      } else if (key == "declared_dim") {
        if (!(vs >> spec.declared_dim)) throw Error(ErrorCode::ParseError, "bad declared_dim");
        have_declared = true;
      } else if (key == "name") {
        spec.name = value;
      } else if (key == "ray") {
        RealVector r;
        double v;
        while (vs >> v) r.push_back(v);
        spec.expected_rays.push_back(normalized(r));
      } else {
        throw Error(ErrorCode::ParseError, "unknown key '" + key + "' on line " + std::to_string(line_no));
      }
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::ParseError, "cannot parse line " + std::to_string(line_no));
    const std::string head = detail::trim(line.substr(0, colon));
    if (!head.empty() && (head[0] == 'x' || head[0] == 'X')) {
      const auto colon2 = line.find(':', colon + 1);
      if (colon2 == std::string::npos) throw Error(ErrorCode::ParseError, "parametrized term needs 'xk : e : c'");
      const int k = std::stoi(head.substr(1));
      const int e = std::stoi(detail::trim(line.substr(colon + 1, colon2 - colon - 1)));
      std::istringstream cs(line.substr(colon2 + 1));
      const std::complex<double> c = detail::parse_coefficient(cs, line);
      if (k < 1 || e < 0) throw Error(ErrorCode::ParseError, "bad coordinate index or exponent on line " + std::to_string(line_no));
      if (spec.coordinates.size() < static_cast<std::size_t>(k)) spec.coordinates.resize(static_cast<std::size_t>(k));
      auto& poly = spec.coordinates[static_cast<std::size_t>(k - 1)];
      if (poly.size() <= static_cast<std::size_t>(e)) poly.resize(static_cast<std::size_t>(e) + 1, 0.0);
      poly[static_cast<std::size_t>(e)] += c;
    } else {
      Monomial m;
      std::istringstream es(head);
      int e;
      while (es >> e) m.exponents.push_back(e);
      std::istringstream cs(line.substr(colon + 1));
      m.coefficient = detail::parse_coefficient(cs, line);
      spec.terms.push_back(std::move(m));
    }
  }
  if (!have_kind || !have_dim) throw Error(ErrorCode::ParseError, "variety file needs kind and ambient_dim");
  if (!have_declared) spec.declared_dim = spec.kind == VarietyKind::Hypersurface ? spec.ambient_dim - 1 : 1;
  validate(spec);
  return spec;
}

inline VarietySpec load_variety(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open variety file " + path);
  VarietySpec spec = parse_variety(in);
  if (spec.name.empty()) spec.name = path;
  return spec;
}

struct PolynomialValue {
  std::complex<double> value;
  double scale = 0;  // sum |c_a z^a|
};

inline PolynomialValue evaluate_polynomial(const VarietySpec& spec, const std::vector<std::complex<double>>& z) {
  PolynomialValue out;
  for (const Monomial& m : spec.terms) {
    std::complex<double> t = m.coefficient;
    for (std::size_t i = 0; i < z.size(); ++i)
      for (int e = 0; e < m.exponents[i]; ++e) t *= z[i];
    out.value += t;
    out.scale += std::abs(t);
  }
  return out;
}

inline std::complex<double> evaluate_univariate(const std::vector<std::complex<double>>& c, std::complex<double> t) {
  std::complex<double> v = 0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
  return v;
}

/// Log|x(t)| for a parametrized variety; nullopt when a coordinate vanishes.
inline std::optional<LogPoint> evaluate_parametrized(const VarietySpec& spec, std::complex<double> t) {
  LogPoint p;
  for (const auto& c : spec.coordinates) {
    const std::complex<double> v = evaluate_univariate(c, t);
    if (v == 0.0 || !std::isfinite(std::abs(v))) return std::nullopt;
    if (c.size() > 1 && c[0] != 0.0 && std::abs(v - c[0]) < 0.5 * std::abs(c[0])) {
      // near the constant term: log|c0| + log|1 + z| with z computed without cancellation
      std::vector<std::complex<double>> rest(c.begin() + 1, c.end());
      const std::complex<double> z = t * evaluate_univariate(rest, t) / c[0];
      p.coords.push_back(std::log(std::abs(c[0])) + 0.5 * std::log1p(2 * z.real() + std::norm(z)));
      continue;
    }
    p.coords.push_back(std::log(std::abs(v)));
  }
  return p;
}

// ---------------------------------------------------------------------------------------
// Amoeba sampling

struct SamplingPlan {
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  double log10_min = -6;  // sampled moduli are 10^u, u uniform in [log10_min, log10_max]
  double log10_max = 6;
  unsigned threads = 1;
  RootOptions roots;
};

struct AmoebaSample {
  std::vector<LogPoint> points;
  std::vector<std::vector<std::complex<double>>> torus_points;  // the z behind each LogPoint
  std::size_t stalls = 0;   // roots rejected by the residual contract
  std::size_t dropped = 0;  // samples with a zero coordinate
};

/// Points of Log|V|. PARAMETRIZED: t = center + 10^u e^{i phi} around 0 and the roots of the
/// coordinate polynomials. HYPERSURFACE: for sample j the variable j mod n is solved for,
/// the others are 10^u e^{i phi}; one point per nonzero root. Deterministic for a seed,
/// independent of the thread count.
inline AmoebaSample sample_amoeba(const VarietySpec& spec, const SamplingPlan& plan) {
  validate(spec);
  using C = std::complex<double>;
  const std::size_t n = spec.ambient_dim;
  std::mt19937_64 rng(plan.seed);
  std::uniform_real_distribution<double> mag(plan.log10_min, plan.log10_max);
  std::uniform_real_distribution<double> phase(0.0, 2 * std::numbers::pi);

  std::vector<C> centers;
  if (spec.kind == VarietyKind::Parametrized) {
    centers.push_back(0);
    for (const auto& c : spec.coordinates) {
      for (C r : find_roots(c, plan.roots).roots) {
        const bool seen = std::any_of(centers.begin(), centers.end(), [&](C x) { return std::abs(x - r) < 1e-9 * (1 + std::abs(r)); });
        if (!seen) centers.push_back(r);
      }
    }
  }
  // Random parameters are drawn up front so that the result does not depend on threads.
  std::vector<std::vector<C>> params(plan.samples);
  for (std::size_t j = 0; j < plan.samples; ++j) {
    const std::size_t count = spec.kind == VarietyKind::Parametrized ? 1 : n - 1;
    for (std::size_t k = 0; k < count; ++k) {
      const double u = mag(rng), phi = phase(rng);
      params[j].push_back(std::polar(std::pow(10.0, u), phi));
    }
    if (spec.kind == VarietyKind::Parametrized) params[j][0] += centers[j % centers.size()];
  }

  struct Slot {
    std::vector<LogPoint> points;
    std::vector<std::vector<C>> zs;
    std::size_t stalls = 0, dropped = 0;
  };
  std::vector<Slot> slots(plan.samples);
  auto work = [&](std::size_t j) {
    Slot& slot = slots[j];
    if (spec.kind == VarietyKind::Parametrized) {
      if (auto p = evaluate_parametrized(spec, params[j][0])) {
        slot.points.push_back(std::move(*p));
        std::vector<C> z;
        for (const auto& c : spec.coordinates) z.push_back(evaluate_univariate(c, params[j][0]));
        slot.zs.push_back(std::move(z));
      } else {
        ++slot.dropped;
      }
      return;
    }
    const std::size_t solved = j % n;
    std::vector<C> z(n);
    for (std::size_t i = 0, k = 0; i < n; ++i)
      if (i != solved) z[i] = params[j][k++];
    int degree = 0;
    for (const Monomial& m : spec.terms) degree = std::max(degree, m.exponents[solved]);
    std::vector<C> coeff(static_cast<std::size_t>(degree) + 1, 0.0);
    for (const Monomial& m : spec.terms) {
      C t = m.coefficient;
      for (std::size_t i = 0; i < n; ++i)
        if (i != solved)
          for (int e = 0; e < m.exponents[i]; ++e) t *= z[i];
      coeff[static_cast<std::size_t>(m.exponents[solved])] += t;
    }
    const RootResult roots = find_roots(coeff, plan.roots);
    for (std::size_t r = 0; r < roots.roots.size(); ++r) {
      if (roots.roots[r] == 0.0) {
        ++slot.dropped;
        continue;
      }
      if (!(roots.residuals[r] < plan.roots.residual_tolerance)) {
        ++slot.stalls;
        continue;
      }
      z[solved] = roots.roots[r];
      LogPoint p;
      for (const C& v : z) p.coords.push_back(std::log(std::abs(v)));
      slot.points.push_back(std::move(p));
      slot.zs.push_back(z);
    }
  };
  const unsigned threads = std::max(1u, plan.threads);
  if (threads == 1) {
    for (std::size_t j = 0; j < plan.samples; ++j) work(j);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t j = t; j < plan.samples; j += threads) work(j);
      });
    for (auto& th : pool) th.join();
  }
  AmoebaSample out;
  for (Slot& s : slots) {
    for (LogPoint& p : s.points) out.points.push_back(std::move(p));
    for (auto& z : s.zs) out.torus_points.push_back(std::move(z));
    out.stalls += s.stalls;
    out.dropped += s.dropped;
  }
  return out;
}

/// Unit vectors of the sampled points with |x| >= min_norm: the far part of the amoeba,
/// whose directions approximate the logarithmic limit set.
inline std::vector<RealVector> amoeba_directions(const std::vector<LogPoint>& points, double min_norm) {
  std::vector<RealVector> out;
  for (const LogPoint& p : points)
    if (norm(p.coords) >= min_norm) out.push_back(normalized(p.coords));
  return out;
}

// ---------------------------------------------------------------------------------------
// Clustering and subspace fits

struct DirectionCluster {
  std::vector<std::size_t> members;  // indices into the input
  RealVector mean;                   // normalized mean direction
  std::vector<RealVector> basis;     // orthonormal basis of the fitted subspace
  double max_residual = 0;           // largest member angle to the subspace
  std::optional<bool> rational;      // nullopt when not tested (ambient dimension > 4)
  std::vector<std::vector<int>> rational_basis;
};

struct ConeFit {
  std::vector<DirectionCluster> clusters;
  std::size_t max_subspace_dim = 0;
  double tolerance = 0;

  /// Bergman probe: every cluster lies in a subspace of dimension <= declared_dim.
  bool passes(std::size_t declared_dim) const {
    if (clusters.empty()) return false;
    return max_subspace_dim <= declared_dim &&
           std::all_of(clusters.begin(), clusters.end(), [this](const DirectionCluster& c) { return c.max_residual < tolerance; });
  }
};

namespace detail {

/// Angle between a unit vector and its projection onto an orthonormal basis.
inline double angle_to_subspace(const RealVector& v, const std::vector<RealVector>& basis) {
  if (basis.empty()) return std::numbers::pi / 2;
  RealVector proj(v.size(), 0.0);
  for (const RealVector& b : basis) {
    double dot = 0;
    for (std::size_t i = 0; i < v.size(); ++i) dot += v[i] * b[i];
    for (std::size_t i = 0; i < v.size(); ++i) proj[i] += dot * b[i];
  }
  RealVector perp(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) perp[i] = v[i] - proj[i];
  return std::atan2(teichtrop::norm(perp), teichtrop::norm(proj));
}

/// Small primitive integer vectors (entries in [-16, 16]) within tol of the subspace,
/// greedily reduced to a basis.
inline std::vector<std::vector<int>> rational_basis(const std::vector<RealVector>& basis, std::size_t n, double tol) {
  constexpr int kMax = 16;
  std::vector<std::vector<int>> candidates;
  std::vector<int> v(n, -kMax);
  while (true) {
    int g = 0;
    for (int x : v) g = std::gcd(g, std::abs(x));
    if (g == 1) {
      RealVector r(v.begin(), v.end());
      if (angle_to_subspace(teichtrop::normalized(r), basis) < tol) candidates.push_back(v);
    }
    std::size_t i = 0;
    while (i < n && v[i] == kMax) v[i++] = -kMax;
    if (i == n) break;
    ++v[i];
  }
  std::sort(candidates.begin(), candidates.end(), [](const std::vector<int>& a, const std::vector<int>& b) {
    int ma = 0, mb = 0;
    for (int x : a) ma = std::max(ma, std::abs(x));
    for (int x : b) mb = std::max(mb, std::abs(x));
    return ma != mb ? ma < mb : a < b;
  });
  std::vector<std::vector<int>> out;
  std::vector<RealVector> ortho;
  for (const auto& c : candidates) {
    if (out.size() == basis.size()) break;
    RealVector r(c.begin(), c.end());
    for (const RealVector& o : ortho) {
      double dot = 0;
      for (std::size_t i = 0; i < n; ++i) dot += r[i] * o[i];
      for (std::size_t i = 0; i < n; ++i) r[i] -= dot * o[i];
    }
    if (teichtrop::norm(r) < 1e-6) continue;
    ortho.push_back(teichtrop::normalized(r));
    out.push_back(c);
  }
  return out;
}

}  // namespace detail

/// Single-linkage clustering of unit vectors (two directions are linked when their angle
/// is below tol), then for each cluster the smallest k such that the top-k eigenvectors
/// of the scatter matrix hold every member within tol.
inline ConeFit cluster_directions(const std::vector<RealVector>& directions, double tol) {
  if (directions.empty()) throw Error(ErrorCode::EmptyInput, "no directions to cluster");
  if (!(tol > 0 && tol <= 0.2)) throw Error(ErrorCode::InvalidArgument, "cluster tolerance must lie in (0, 0.2]");
  const std::size_t m = directions.size();
  const std::size_t n = directions.front().size();
  std::vector<RealVector> units;
  units.reserve(m);
  for (const RealVector& d : directions) {
    if (d.size() != n) throw Error(ErrorCode::InvalidArgument, "directions of different dimensions");
    units.push_back(normalized(d));
  }

  std::vector<std::size_t> parent(m);
  for (std::size_t i = 0; i < m; ++i) parent[i] = i;
  auto find = [&parent](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  auto unite = [&](std::size_t i, std::size_t j) {
    const std::size_t a = find(i), b = find(j);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  // Linked directions are within tol in every coordinate, so only neighbouring grid cells
  // need comparing.
  if (n <= 6) {
    std::map<std::vector<long>, std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<long> key(n);
      for (std::size_t k = 0; k < n; ++k) key[k] = static_cast<long>(std::floor(units[i][k] / tol));
      cells[key].push_back(i);
    }
    for (const auto& [key, members] : cells) {
      std::vector<long> offset(n, -1);
      while (true) {
        std::vector<long> other(n);
        for (std::size_t k = 0; k < n; ++k) other[k] = key[k] + offset[k];
        if (other >= key) {
          if (auto it = cells.find(other); it != cells.end()) {
            for (std::size_t i : members)
              for (std::size_t j : it->second)
                if (i < j || other != key)
                  if (detail::unit_angle(units[i], units[j]) < tol) unite(i, j);
          }
        }
        std::size_t k = 0;
        while (k < n && offset[k] == 1) offset[k++] = -1;
        if (k == n) break;
        ++offset[k];
      }
    }
  } else {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        if (detail::unit_angle(units[i], units[j]) < tol) unite(i, j);
  }

  std::map<std::size_t, std::vector<std::size_t>> groups;  // keyed by smallest member
  for (std::size_t i = 0; i < m; ++i) groups[find(i)].push_back(i);

  ConeFit fit;
  fit.tolerance = tol;
  for (auto& [root, members] : groups) {
    DirectionCluster c;
    c.members = std::move(members);
    RealVector mean(n, 0.0);
    std::vector<double> scatter(n * n, 0.0);
    for (std::size_t i : c.members) {
      for (std::size_t a = 0; a < n; ++a) {
        mean[a] += units[i][a];
        for (std::size_t b = 0; b < n; ++b) scatter[a * n + b] += units[i][a] * units[i][b];
      }
    }
    c.mean = norm(mean) > 0 ? normalized(mean) : units[c.members.front()];
    const SymmetricEigen eig = symmetric_eigen(scatter, n);
    for (std::size_t k = 1; k <= n; ++k) {
      c.basis.assign(eig.vectors.begin(), eig.vectors.begin() + static_cast<std::ptrdiff_t>(k));
      c.max_residual = 0;
      for (std::size_t i : c.members) c.max_residual = std::max(c.max_residual, detail::angle_to_subspace(units[i], c.basis));
      if (c.max_residual < tol) break;
    }
    if (n <= 4) {
      c.rational_basis = detail::rational_basis(c.basis, n, tol);
      c.rational = c.rational_basis.size() == c.basis.size();
    }
    fit.max_subspace_dim = std::max(fit.max_subspace_dim, c.basis.size());
    fit.clusters.push_back(std::move(c));
  }
  return fit;
}

inline ConeFit cluster_directions(const std::vector<DirectionEstimate>& estimates, double tol) {
  std::vector<RealVector> dirs;
  dirs.reserve(estimates.size());
  for (const DirectionEstimate& e : estimates) dirs.push_back(e.direction);
  return cluster_directions(dirs, tol);
}

/// Matches cluster means to recorded rays one to one within tol; returns the largest
/// matched angle, or nullopt when the counts differ or some ray has no partner.
inline std::optional<double> match_rays(const ConeFit& fit, const std::vector<RealVector>& rays, double tol) {
  if (fit.clusters.size() != rays.size()) return std::nullopt;
  std::vector<bool> used(fit.clusters.size(), false);
  double worst = 0;
  for (const RealVector& r : rays) {
    std::size_t best = fit.clusters.size();
    double best_angle = tol;
    for (std::size_t c = 0; c < fit.clusters.size(); ++c) {
      if (used[c]) continue;
      const double a = angle_between(fit.clusters[c].mean, r);
      if (a < best_angle) {
        best_angle = a;
        best = c;
      }
    }
    if (best == fit.clusters.size()) return std::nullopt;
    used[best] = true;
    worst = std::max(worst, best_angle);
  }
  return worst;
}

}  // namespace teichtrop
