#pragma once

// Simple closed curves on the genus-2 surface and their geometric intersection numbers,
// computed two independent ways:
//
//  * intersection_number_oracle: counts double cosets <A> g <B> whose translated axis
//    g.axis(B) crosses axis(A), by enumerating reduced words g of the Cayley ball. Works
//    in the frame where axis(A) is the imaginary axis; a lift crosses iff its endpoints
//    have opposite signs. Lifts are identified modulo <A> by (position of the crossing
//    point reduced mod l(A), log of the endpoint ratio).
//  * dt_formula_intersection: piecewise-linear count from Dehn-Thurston style coordinates
//    (crossings inside each annulus plus crossings of normal arcs inside each pair of
//    pants), valid on the curated curve table.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "teichtrop/error.hpp"
#include "teichtrop/fuchsian.hpp"
#include "teichtrop/mat2.hpp"
#include "teichtrop/word.hpp"

namespace teichtrop {

/// Normal coordinates relative to the pants curves (a1, a2, c): m = number of crossings
/// with each pants curve, t = twist (a full Dehn twist adds m; a pants curve has m = 0 and
/// t = 1 on itself).
struct DTCoords {
  std::array<int, 3> m{};
  std::array<int, 3> t{};
  friend bool operator==(const DTCoords&, const DTCoords&) = default;
};

struct CurveClass {
  std::string name;
  Word word;
  std::optional<DTCoords> dt;
};

struct Multicurve {
  std::vector<std::pair<CurveClass, double>> components;
};

struct EmbeddingFamily {
  std::vector<CurveClass> curves;  // curated lamination curves first, then trace words
  std::vector<Word> words() const {
    std::vector<Word> out;
    out.reserve(curves.size());
    for (const CurveClass& c : curves) out.push_back(c.word);
    return out;
  }
  std::size_t size() const { return curves.size(); }
};

// ---------------------------------------------------------------------------------------
// Geometric oracle

struct OracleOptions {
  int radius = 8;
  int max_radius = 14;
  /// Word count guard; exceeding it stops the search unconverged.
  double max_nodes = 2e8;
  double identify_tolerance = 1e-6;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct OracleResult {
  long count = 0;
  bool converged = false;
  int radius = 0;
  std::vector<long> counts_by_radius;  // index r = count using words of length <= r
  long unresolved = 0;                 // crossings found but too ill-conditioned to identify
};

namespace detail {

struct CrossingHit {
  double position;  // log height of the crossing point, reduced mod l(A)
  double shape;     // log |x1 / x2| of the translated endpoints
  bool first_negative;
  int depth;
  double error = 0;  // bound on the rounding error of position and shape
  bool weak = false;  // crossing is certain but the key is too imprecise to identify the lift
};

inline Mat2 to_mat2(const ScaledMatrix& m) {
  if (m.exponent() > 500 || m.max_imag_relative() > 1e-9)
    throw Error(ErrorCode::InvalidArgument, "oracle needs a moderate real representation");
  const double s = std::exp2(static_cast<double>(m.exponent()));
  const auto& e = m.entries();
  return {e[0].real() * s, e[1].real() * s, e[2].real() * s, e[3].real() * s};
}

inline Mat2 abs(const Mat2& m) { return {std::abs(m.a), std::abs(m.b), std::abs(m.c), std::abs(m.d)}; }

inline double norm(const Mat2& m) { return 2 * std::max({std::abs(m.a), std::abs(m.b), std::abs(m.c), std::abs(m.d)}); }

/// Generators in the frame where the axis of alpha is the imaginary axis (translated
/// towards infinity), with the fixed points of beta and their rounding error bounds.
struct CrossingFrame {
  std::array<Mat2, 8> letters;
  std::array<Mat2, 8> letters_abs;  // entrywise bounds used for rounding error estimates
  Vec2 p, q;                        // attracting / repelling fixed points of beta
  double period = 0;                // translation length of alpha
  double endpoint_error = 0;        // error of p and q (unit vectors)
  double axis_error = 0;            // how far 0 and infinity may be from the true fixed points of alpha
  double letter_error = 0;          // relative error per letter, including the relator defect
};

/// Set up in long double: the fixed points of beta are ill-conditioned when beta is long,
/// and their error is amplified by every translate tested in the search.
inline CrossingFrame make_crossing_frame(const std::vector<ScaledMatrix>& images, const Word& alpha, const Word& beta) {
  using LMat = BasicMat2<long double>;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  constexpr long double kLongEps = std::numeric_limits<long double>::epsilon();

  std::array<LMat, 4> gens;
  for (std::size_t g = 0; g < 4; ++g) gens[g] = to_mat2(images[g]).cast<long double>();
  auto product = [&](const Word& w) {
    LMat out;
    for (const Letter& l : w.letters()) {
      const LMat& m = gens[static_cast<std::size_t>(l.generator)];
      out = out * (l.inverted ? m.inverse() : m);
    }
    return out;
  };

  const LMat a = product(alpha), b = product(beta);
  // Words equal in the surface group differ by the relator defect of the double images.
  const LMat rel = product(SurfaceGroup(2).relator());
  const auto defect = static_cast<double>(
      std::max({std::abs(rel.a - 1), std::abs(rel.b), std::abs(rel.c), std::abs(rel.d - 1)}));
  if (std::abs(a.trace()) <= 2 || std::abs(b.trace()) <= 2)
    throw Error(ErrorCode::EllipticElement, "non-hyperbolic curve in intersection oracle");

  CrossingFrame out;
  const auto ha = hyperbolic_data(a);
  const LMat frame = eigenframe(a);
  const LMat frame_inv = frame.inverse();
  out.period = static_cast<double>(2 * std::log(std::abs(ha.lambda)));
  for (std::size_t g = 0; g < 4; ++g) {
    const LMat m = frame_inv * gens[g] * frame;
    out.letters[2 * g] = m.cast<double>();
    out.letters[2 * g + 1] = m.inverse().cast<double>();
    out.letters_abs[2 * g] = abs(out.letters[2 * g]);
    out.letters_abs[2 * g + 1] = abs(out.letters[2 * g + 1]);
  }
  const auto hb = hyperbolic_data(frame_inv * b * frame);
  out.p = {static_cast<double>(hb.attracting.x), static_cast<double>(hb.attracting.y)};
  out.q = {static_cast<double>(hb.repelling.x), static_cast<double>(hb.repelling.y)};

  // Error estimates: the same computation in double differs from the long double one by
  // roughly the double rounding error; the long double error is smaller by kLongEps / kEps.
  const double ratio = 64 * static_cast<double>(kLongEps) / kEps;
  auto drift = [](const Vec2& x, const Vec2& y) {
    const double s = x.x * y.x + x.y * y.y >= 0 ? 1.0 : -1.0;
    return std::max(std::abs(x.x - s * y.x), std::abs(x.y - s * y.y));
  };
  const Mat2 frame_d = eigenframe(a.cast<double>());
  const Mat2 frame_ld = frame.cast<double>();
  out.axis_error = 4 * kEps + ratio * std::max(drift({frame_d.a, frame_d.c}, {frame_ld.a, frame_ld.c}),
                                               drift({frame_d.b, frame_d.d}, {frame_ld.b, frame_ld.d}));
  const HyperbolicData hb_d = hyperbolic_data(frame_d.inverse() * b.cast<double>() * frame_d);
  out.letter_error = std::max(kEps, defect);
  out.endpoint_error = 4 * kEps + ratio * std::max(drift(hb_d.attracting, out.p), drift(hb_d.repelling, out.q));
  return out;
}

inline void crossing_search(const CrossingFrame& cf, int radius, int first_letter, std::vector<CrossingHit>& hits,
                            double& nodes) {
  struct Frame {
    Mat2 g;
    Mat2 g_abs;  // |m1| |m2| ... |mk| entrywise: fl(g) - g is at most ~ depth * eps * g_abs
    int last;
    int depth;
  };
  // Only lifts crossing the window [-period, 2 period] of the axis are kept: every double
  // coset has a representative crossing there, reached at a larger radius.
  // Hits whose components are known only to within kMaxRelative are weak: they are not
  // counted, only checked against the counted lifts. Others carry an error bar used when
  // identifying lifts. Hits whose signs are uncertain are dropped.
  constexpr double kMaxRelative = 1e-3;
  const double period = cf.period;
  const Vec2 pa{std::abs(cf.p.x), std::abs(cf.p.y)}, qa{std::abs(cf.q.x), std::abs(cf.q.y)};
  const Vec2 delta{cf.endpoint_error, cf.endpoint_error};
  auto visit = [&](const Frame& f) {
    const Vec2 gp = f.g * cf.p, gq = f.g * cf.q;
    const double sp = gp.x * gp.y, sq = gq.x * gq.y;
    if ((sp < 0) == (sq < 0)) return;
    // Rounding of the product, error of the endpoints, misplacement of 0 and infinity.
    const double unit = 16 * (f.depth + 4) * cf.letter_error;
    const Vec2 rp = f.g_abs * pa, rq = f.g_abs * qa, e = f.g_abs * delta;
    const std::array<std::pair<double, double>, 4> parts{
        std::pair{gp.x, unit * rp.x + e.x + cf.axis_error * std::abs(gp.y)},
        {gp.y, unit * rp.y + e.y + cf.axis_error * std::abs(gp.x)},
        {gq.x, unit * rq.x + e.x + cf.axis_error * std::abs(gq.y)},
        {gq.y, unit * rq.y + e.y + cf.axis_error * std::abs(gq.x)}};
    double rel = 0;
    for (auto [v, e] : parts) {
      if (std::abs(v) <= 2 * e) return;
      rel = std::max(rel, e / std::abs(v));
    }
    const double lp = std::log(std::abs(gp.x / gp.y)), lq = std::log(std::abs(gq.x / gq.y));
    const double height = 0.5 * (lp + lq);
    if (height < -period || height > 2 * period) return;
    double pos = std::fmod(height, period);
    if (pos < 0) pos += period;
    hits.push_back({pos, lp - lq, sp < 0, f.depth, 8 * rel, rel > kMaxRelative});
  };

  if (first_letter < 0) {
    visit(Frame{Mat2{}, Mat2{}, -1, 0});
    nodes += 1;
    return;
  }
  std::vector<Frame> stack;
  const auto first = static_cast<std::size_t>(first_letter);
  stack.push_back({cf.letters[first], cf.letters_abs[first], first_letter, 1});
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    nodes += 1;
    visit(f);
    if (f.depth == radius) continue;
    for (int l = 0; l < 8; ++l) {
      if ((l ^ 1) == f.last) continue;  // letter followed by its inverse
      const auto k = static_cast<std::size_t>(l);
      stack.push_back({f.g * cf.letters[k], f.g_abs * cf.letters_abs[k], l, f.depth + 1});
    }
  }
}

struct LiftCount {
  std::vector<long> counts;  // distinct lifts among hits of depth <= r, per r
  long unresolved = 0;       // weak hits matching no counted lift
};

/// Distinct lifts (mod <A>) among the hits. Two hits are the same lift when their keys
/// agree within tol plus both error bars.
inline LiftCount count_lifts(std::vector<CrossingHit> hits, double period, double tol, int radius) {
  auto by_key = [](const CrossingHit& x, const CrossingHit& y) {
    if (x.first_negative != y.first_negative) return x.first_negative < y.first_negative;
    return x.shape < y.shape;
  };
  auto same = [&](const CrossingHit& x, const CrossingHit& y) {
    const double slack = tol + x.error + y.error;
    if (x.first_negative != y.first_negative || std::abs(x.shape - y.shape) > slack) return false;
    double dp = std::abs(x.position - y.position);
    return std::min(dp, period - dp) <= slack;
  };
  std::vector<CrossingHit> weak;
  std::erase_if(hits, [&weak](const CrossingHit& h) {
    if (h.weak) weak.push_back(h);
    return h.weak;
  });
  std::sort(hits.begin(), hits.end(), by_key);
  const std::size_t n = hits.size();
  double max_error = 0;
  for (const CrossingHit& h : hits) max_error = std::max(max_error, h.error);

  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&parent](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (hits[j].first_negative != hits[i].first_negative) break;
      if (hits[j].shape - hits[i].shape > tol + hits[i].error + max_error) break;
      if (same(hits[i], hits[j])) parent[find(j)] = find(i);
    }
  }
  std::map<std::size_t, int> lift_depth;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = lift_depth.try_emplace(find(i), hits[i].depth);
    if (!inserted) it->second = std::min(it->second, hits[i].depth);
  }
  LiftCount out;
  out.counts.assign(static_cast<std::size_t>(radius) + 1, 0);
  for (const auto& [root, d] : lift_depth)
    for (int r = d; r <= radius; ++r) ++out.counts[static_cast<std::size_t>(r)];
  for (const CrossingHit& w : weak)
    if (std::none_of(hits.begin(), hits.end(), [&](const CrossingHit& h) { return same(w, h); })) ++out.unresolved;
  return out;
}

inline OracleResult oracle_primitive(const Representation& rep, const Word& alpha, const Word& beta,
                                     const OracleOptions& options) {
  const CrossingFrame cf = make_crossing_frame(rep.images, alpha, beta);

  unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
  threads = std::min(threads, 8u);

  OracleResult result;
  int radius = std::max(2, options.radius);
  while (true) {
    const double estimate = 1 + 8 * (std::pow(7.0, radius) - 1) / 6;
    if (estimate > options.max_nodes) break;

    std::vector<std::vector<CrossingHit>> hits(9);
    std::vector<double> nodes(9, 0);
    auto work = [&](int slot) {
      crossing_search(cf, radius, slot - 1, hits[static_cast<std::size_t>(slot)], nodes[static_cast<std::size_t>(slot)]);
    };
    if (threads <= 1) {
      for (int s = 0; s < 9; ++s) work(s);
    } else {
      std::vector<std::thread> pool;
      for (int s = 0; s < 9; ++s) pool.emplace_back(work, s);
      for (auto& t : pool) t.join();
    }
    std::vector<CrossingHit> all;
    for (auto& h : hits) all.insert(all.end(), h.begin(), h.end());

    LiftCount lifts = count_lifts(std::move(all), cf.period, options.identify_tolerance, radius);
    result.counts_by_radius = std::move(lifts.counts);
    result.unresolved = lifts.unresolved;
    result.radius = radius;
    result.count = result.counts_by_radius.back();
    const auto& c = result.counts_by_radius;
    result.converged =
        c[c.size() - 1] == c[c.size() - 2] && c[c.size() - 2] == c[c.size() - 3] && result.unresolved == 0;
    if (result.converged || radius >= options.max_radius) break;
    radius = std::min(2 * radius, options.max_radius);
  }
  return result;
}

}  // namespace detail

/// Geometric intersection number i(alpha, beta) of the closed geodesics of two words
/// (proper powers are handled through their primitive roots). Never throws
/// NOT_CONVERGED; check `converged` or use intersection_number().
inline OracleResult intersection_number_oracle(const Representation& rep, const Word& alpha, const Word& beta,
                                               const OracleOptions& options = {}) {
  // Counted on the reduced-twist structure rep.images. It differs from rep only by the
  // Dehn twists of the marking, and intersection numbers are mapping class invariant.
  const Word ca = cyclic_reduce(alpha), cb = cyclic_reduce(beta);
  if (ca.empty() || cb.empty()) throw Error(ErrorCode::InvalidArgument, "intersection with the trivial word");
  const auto [ra, pa] = primitive_root(ca);
  const auto [rb, pb] = primitive_root(cb);
  OracleResult r = detail::oracle_primitive(rep, ra, rb, options);
  const long mult = static_cast<long>(pa) * pb;
  r.count *= mult;
  for (long& c : r.counts_by_radius) c *= mult;
  return r;
}

inline OracleResult intersection_number_oracle(const Representation& rep, const CurveClass& alpha,
                                               const CurveClass& beta, const OracleOptions& options = {}) {
  return intersection_number_oracle(rep, alpha.word, beta.word, options);
}

/// Oracle value, throwing NOT_CONVERGED when the count was still moving at the last radius.
inline long intersection_number(const Representation& rep, const Word& alpha, const Word& beta,
                                const OracleOptions& options = {}) {
  const OracleResult r = intersection_number_oracle(rep, alpha, beta, options);
  if (!r.converged)
    throw Error(ErrorCode::NotConverged, "intersection count of " + alpha.to_string() + " and " + beta.to_string() +
                                             " not stable at radius " + std::to_string(r.radius));
  return r.count;
}

// ---------------------------------------------------------------------------------------
// Dehn-Thurston route

namespace detail {

/// Normal arcs in a pair of pants with boundary intersection numbers n[0..2]:
/// arcs[k] joins the two slots other than k, loops[k] starts and ends on slot k.
struct PantsArcs {
  std::array<int, 3> arcs{};
  std::array<int, 3> loops{};
};

inline PantsArcs pants_arcs(const std::array<int, 3>& n) {
  PantsArcs out;
  if ((n[0] + n[1] + n[2]) % 2 != 0) throw Error(ErrorCode::InvalidArgument, "odd boundary count in pants");
  for (int k = 0; k < 3; ++k) {
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    if (n[k] > n[i] + n[j]) {
      out.loops[k] = (n[k] - n[i] - n[j]) / 2;
      out.arcs[i] = n[j];  // joins k and j
      out.arcs[j] = n[i];  // joins k and i
      out.arcs[k] = 0;
      return out;
    }
  }
  for (int k = 0; k < 3; ++k) out.arcs[k] = (n[(k + 1) % 3] + n[(k + 2) % 3] - n[k]) / 2;
  return out;
}

/// Minimal crossings between the normal arcs of two curves inside one pair of pants.
inline int pants_crossings(const PantsArcs& x, const PantsArcs& y) {
  int total = 0;
  for (int k = 0; k < 3; ++k) {
    // A loop at slot k separates the other two slots: it meets every arc joining them once.
    total += x.loops[k] * y.arcs[k] + y.loops[k] * x.arcs[k];
    for (int j = 0; j < 3; ++j)
      if (j != k) total += 2 * x.loops[k] * y.loops[j];
  }
  return total;
}

}  // namespace detail

inline int dt_formula_intersection(const DTCoords& x, const DTCoords& y) {
  int total = 0;
  for (std::size_t i = 0; i < 3; ++i) total += std::abs(x.t[i] * y.m[i] - y.t[i] * x.m[i]);
  // Pants P1 has slots (a1+, a1-, c), P2 has (a2+, a2-, c).
  for (int side = 0; side < 2; ++side) {
    const std::array<int, 3> nx{x.m[static_cast<std::size_t>(side)], x.m[static_cast<std::size_t>(side)], x.m[2]};
    const std::array<int, 3> ny{y.m[static_cast<std::size_t>(side)], y.m[static_cast<std::size_t>(side)], y.m[2]};
    total += detail::pants_crossings(detail::pants_arcs(nx), detail::pants_arcs(ny));
  }
  return total;
}

inline int dt_formula_intersection(const CurveClass& alpha, const CurveClass& beta) {
  if (!alpha.dt || !beta.dt)
    throw Error(ErrorCode::NoDtCoords, "curve without Dehn-Thurston coordinates: " + (alpha.dt ? beta.name : alpha.name));
  return dt_formula_intersection(*alpha.dt, *beta.dt);
}

// ---------------------------------------------------------------------------------------
// Intersection-vector embedding

/// (sum_k w_k i(c_k, gamma_j))_j over the family.
inline std::vector<double> intersection_vector(const Multicurve& lam, const EmbeddingFamily& family,
                                               const Representation& rep, const OracleOptions& options = {}) {
  if (family.curves.empty()) throw Error(ErrorCode::InvalidArgument, "empty embedding family");
  std::vector<double> out(family.size(), 0.0);
  for (const auto& [curve, weight] : lam.components)
    for (std::size_t j = 0; j < family.size(); ++j)
      out[j] += weight * static_cast<double>(intersection_number(rep, curve.word, family.curves[j].word, options));
  return out;
}

// ---------------------------------------------------------------------------------------
// Curve table file: "version 1", "genus 2", then lines
//   name word m_a1 m_a2 m_c t_a1 t_a2 t_c      (DT part optional)

inline std::vector<CurveClass> parse_curve_table(std::istream& in) {
  std::vector<CurveClass> out;
  std::string line;
  int lineno = 0;
  bool versioned = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "version") {
      int v = 0;
      ls >> v;
      if (v != 1) throw Error(ErrorCode::ParseError, "unsupported curve table version");
      versioned = true;
      continue;
    }
    if (first == "genus") {
      int g = 0;
      ls >> g;
      if (g != 2) throw Error(ErrorCode::UnsupportedGenus, "curve table genus must be 2");
      continue;
    }
    CurveClass c;
    c.name = first;
    std::string word;
    if (!(ls >> word)) throw Error(ErrorCode::ParseError, "curve table line " + std::to_string(lineno) + ": missing word");
    c.word = Word::parse(word);
    std::vector<int> nums;
    int v = 0;
    while (ls >> v) nums.push_back(v);
    if (!ls.eof()) throw Error(ErrorCode::ParseError, "curve table line " + std::to_string(lineno) + ": bad number");
    if (nums.size() == 6) {
      DTCoords dt;
      for (std::size_t i = 0; i < 3; ++i) {
        dt.m[i] = nums[i];
        dt.t[i] = nums[i + 3];
      }
      c.dt = dt;
    } else if (!nums.empty()) {
      throw Error(ErrorCode::ParseError, "curve table line " + std::to_string(lineno) + ": expected 6 DT numbers");
    }
    out.push_back(std::move(c));
  }
  if (!versioned) throw Error(ErrorCode::ParseError, "curve table has no version line");
  return out;
}

inline std::vector<CurveClass> load_curve_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open curve table " + path);
  return parse_curve_table(in);
}

/// Curated curves (pants curve, dual, twisted dual for each pants curve) followed by the
/// trace embedding words that are not already conjugate to a curated curve.
inline EmbeddingFamily joint_family(const std::vector<CurveClass>& curated, const std::vector<Word>& trace_words) {
  EmbeddingFamily fam;
  fam.curves = curated;
  std::set<std::vector<int>> seen;
  for (const CurveClass& c : curated) seen.insert(cyclic_class_key(cyclic_reduce(c.word)));
  for (const Word& w : trace_words) {
    if (!seen.insert(cyclic_class_key(cyclic_reduce(w))).second) continue;
    fam.curves.push_back({w.to_string(), w, std::nullopt});
  }
  return fam;
}

}  // namespace teichtrop
