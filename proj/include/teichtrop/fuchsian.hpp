#pragma once

// Fuchsian representations of the genus-2 surface group from Fenchel-Nielsen coordinates.
//
// Pants decomposition (fixed): curve 0 = a1, curve 1 = a2, curve 2 = c = [a1,b1], which
// separates the one-holed tori T1 = <a1,b1> and T2 = <a2,b2>.
//
// Each torus is built from a right-angled hexagon: A = translation of length l_a along the
// imaginary axis, B = P(d) * T(t) where P(d) translates along the unit circle by the
// distance d between the two copies of a in the pants (sinh(l_a/2) sinh(d/2) = cosh(l_c/4))
// and T(t) twists along the axis of A. The commutator then has trace -2 cosh(l_c/2). Each
// torus is moved into the frame where its commutator is diag(-mu, -1/mu) and the common
// perpendicular to the axis of A has its foot at i. T2 is rotated by pi about i (so that
// [a2,b2] = [a1,b1]^-1 and the tori sit on opposite sides of the c axis) and translated by
// the c twist along the imaginary axis.
//
// Twists are stored as t = r + k*l with |r| <= l/2: the matrices realise the small twist r
// and the k full Dehn twists are applied as a substitution on words (the "marking"). This
// keeps every matrix product well conditioned even for twists of several hundred.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "teichtrop/error.hpp"
#include "teichtrop/mat2.hpp"
#include "teichtrop/scaled_matrix.hpp"
#include "teichtrop/word.hpp"

namespace teichtrop {

inline constexpr double kDegenerateLength = 1e-8;
inline constexpr double kHyperbolicSlack = 1e-9;

struct FenchelNielsen {
  std::vector<double> lengths;  // one per pants curve, hyperbolic length units
  std::vector<double> twists;

  int genus() const { return static_cast<int>(lengths.size() + 3) / 3; }
};

/// Words of the pants curves a1, a2, [a1,b1].
inline std::vector<Word> pants_curve_words() {
  return {Word::parse("a1"), Word::parse("a2"), Word::parse("a1b1A1B1")};
}

inline std::vector<std::string> pants_curve_names() { return {"a1", "a2", "c"}; }

/// Generator images of k_i full Dehn twists about each pants curve i (genus 2).
/// twist(a1): b1 -> b1 a1^k.  twist(a2): b2 -> b2 a2^k.
/// twist(c):  a2 -> c^k a2 c^-k, b2 -> c^k b2 c^-k, written up to the inner automorphism
///            by c^-k as a1 -> c^-k a1 c^k, b1 -> c^-k b1 c^k so that the relator is fixed
///            by free reduction.
inline std::vector<Word> dehn_twist_images(const std::vector<long>& powers) {
  const Word a1 = Word::parse("a1"), b1 = Word::parse("b1"), a2 = Word::parse("a2"), b2 = Word::parse("b2");
  const Word c = Word::parse("a1b1A1B1");
  const auto k1 = static_cast<int>(powers.at(0));
  const auto k2 = static_cast<int>(powers.at(1));
  const auto k3 = static_cast<int>(powers.at(2));
  const Word cl = c.power(-k3), cr = c.power(k3);
  return {reduce(cl * a1 * cr), reduce(cl * b1 * a1.power(k1) * cr), a2, reduce(b2 * a2.power(k2))};
}

/// Applies `count` full Dehn twists about pants curve `curve` to a word.
inline Word dehn_twist(const Word& word, int curve, int count) {
  std::vector<long> powers(3, 0);
  powers.at(static_cast<std::size_t>(curve)) = count;
  return substitute(word, dehn_twist_images(powers));
}

struct Representation {
  SurfaceGroup group{2};
  std::vector<ScaledMatrix> images;  // matrices of the reduced-twist structure
  std::vector<Word> marking;         // generator -> word in those matrices
  double relator_defect = 0;
  int euler_sign = 1;  // orientation class of the Fuchsian representation
};

/// Matrix of rho(word): the marking is applied, then the product is formed.
inline ScaledMatrix evaluate(const Representation& rep, const Word& word) {
  return evaluate(std::span<const ScaledMatrix>(rep.images), substitute(word, rep.marking));
}

/// log|tr rho(word)|, evaluated on the cyclic reduction of the marked word so that
/// conjugations introduced by large Dehn twists never reach the floating point product.
inline LogTrace trace_of(const Representation& rep, const Word& word) {
  return log_trace(evaluate(std::span<const ScaledMatrix>(rep.images), cyclic_reduce(substitute(word, rep.marking))));
}

inline double relator_defect(const Representation& rep) { return evaluate(rep, rep.group.relator()).distance_to_identity(); }

namespace detail {

inline ScaledMatrix to_scaled(const Mat2& m) { return ScaledMatrix::real(m.a, m.b, m.c, m.d); }

inline Mat2 commutator(const Mat2& x, const Mat2& y) { return x * y * x.inverse() * y.inverse(); }

/// One-holed torus <A,B> with cuff length `cuff`, twist `twist` and boundary length
/// `boundary`, normalised as described at the top of this file.
inline std::pair<Mat2, Mat2> framed_torus(double cuff, double twist, double boundary) {
  const Mat2 a = translation_imaginary_axis(cuff);
  const double half_d = std::asinh(std::cosh(boundary / 4) / std::sinh(cuff / 2));
  const Mat2 b = translation_unit_circle(2 * half_d) * translation_imaginary_axis(twist);

  const Mat2 f0 = eigenframe(commutator(a, b));
  const Mat2 a0 = f0.inverse() * a * f0;
  const HyperbolicData ha = hyperbolic_data(a0);
  // Foot of the common perpendicular on the imaginary axis is i*sqrt(x1 x2).
  const double x1 = ha.attracting.x / ha.attracting.y;
  const double x2 = ha.repelling.x / ha.repelling.y;
  const double h = std::sqrt(x1 * x2);
  const Mat2 s{std::sqrt(h), 0, 0, 1 / std::sqrt(h)};
  const Mat2 f = f0 * s;
  return {f.inverse() * a * f, f.inverse() * b * f};
}

}  // namespace detail

/// Discrete faithful representation pi_1(S) -> SL(2,R) realising the given coordinates,
/// lifted so that the relator maps to +I.
inline Representation build_representation(const FenchelNielsen& fn, const SurfaceGroup& group = SurfaceGroup(2)) {
  if (group.genus() != 2 || fn.lengths.size() != 3 || fn.twists.size() != 3)
    throw Error(ErrorCode::UnsupportedGenus, "Fenchel-Nielsen construction is implemented for genus 2 only");
  for (double l : fn.lengths) {
    if (!(l >= kDegenerateLength) || !std::isfinite(l))
      throw Error(ErrorCode::DegenerateLength, "pants curve length " + std::to_string(l) + " below 1e-8");
  }
  for (double t : fn.twists)
    if (!std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "non-finite twist");

  std::vector<long> powers(3);
  std::vector<double> rest(3);
  for (std::size_t i = 0; i < 3; ++i) {
    powers[i] = std::lround(fn.twists[i] / fn.lengths[i]);
    rest[i] = fn.twists[i] - static_cast<double>(powers[i]) * fn.lengths[i];
  }

  const auto [a1, b1] = detail::framed_torus(fn.lengths[0], rest[0], fn.lengths[2]);
  const auto [a2f, b2f] = detail::framed_torus(fn.lengths[1], rest[1], fn.lengths[2]);
  const Mat2 g = translation_imaginary_axis(rest[2]) * half_turn_at_i();
  const Mat2 a2 = g * a2f * g.inverse();
  const Mat2 b2 = g * b2f * g.inverse();

  Representation rep;
  rep.group = group;
  rep.images = {detail::to_scaled(a1), detail::to_scaled(b1), detail::to_scaled(a2), detail::to_scaled(b2)};
  rep.marking = dehn_twist_images(powers);
  rep.relator_defect = relator_defect(rep);
  const HyperbolicData ha = hyperbolic_data(a1), hb = hyperbolic_data(b1);
  // Euler number = euler_sign * (2g - 2). The fixed points of a1 and b1 interleave on the
  // circle; their cyclic order fixes the orientation, with this construction as +1.
  rep.euler_sign = -cyclic_orientation(ha.attracting, hb.attracting, ha.repelling);
  return rep;
}

/// 2 arccosh(|tr|/2) from a log-trace; for log|tr| > 40 uses 2 log|tr| - 2 e^{-2 log|tr|}.
inline double hyperbolic_length(const LogTrace& lt) {
  if (lt.trace_zero || lt.log_abs_trace < std::log(2.0 - kHyperbolicSlack))
    throw Error(ErrorCode::NotHyperbolic, "|tr| < 2: element is not hyperbolic");
  const double L = lt.log_abs_trace;
  if (L > 40) return 2 * L - 2 * std::exp(-2 * L);
  const double half = std::exp(L) / 2;
  return half <= 1 ? 0.0 : 2 * std::acosh(half);
}

inline double hyperbolic_length(const Representation& rep, const Word& word) {
  return hyperbolic_length(trace_of(rep, word));
}

/// A point of Teichmueller space with its log-trace character on a word family.
struct TeichPoint {
  FenchelNielsen fn;
  Representation rep;
  std::vector<LogTrace> character;

  TeichPoint(FenchelNielsen coords, const std::vector<Word>& family)
      : fn(std::move(coords)), rep(build_representation(fn)) {
    character.reserve(family.size());
    for (const Word& w : family) character.push_back(trace_of(rep, w));
  }
};

/// base, base + step, ..., base + (count-1) step in the twist about `curve_index`.
inline std::vector<TeichPoint> twist_sequence(const FenchelNielsen& base, int curve_index, double step, int count,
                                              const std::vector<Word>& family) {
  if (curve_index < 0 || static_cast<std::size_t>(curve_index) >= base.twists.size())
    throw Error(ErrorCode::InvalidArgument, "twist curve index out of range");
  if (step == 0 || !std::isfinite(step)) throw Error(ErrorCode::InvalidArgument, "twist step must be nonzero");
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "twist sequence count must be positive");
  std::vector<TeichPoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    FenchelNielsen fn = base;
    fn.twists[static_cast<std::size_t>(curve_index)] += k * step;
    out.emplace_back(std::move(fn), family);
  }
  return out;
}

}  // namespace teichtrop
