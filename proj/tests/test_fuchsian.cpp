#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "teichtrop/fuchsian.hpp"
#include "teichtrop/laminations.hpp"

using namespace teichtrop;

namespace {

FenchelNielsen random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> len(0.5, 4.0), tw(-3.0, 3.0);
  return {{len(rng), len(rng), len(rng)}, {tw(rng), tw(rng), tw(rng)}};
}

double trace_value(const Representation& rep, const char* w) {
  const LogTrace t = trace_of(rep, Word::parse(w));
  return t.sign() * std::exp(t.log_abs_trace);
}

}  // namespace

TEST(Fuchsian, StandardPointHasCuffTraceTwoCoshOne) {
  const Representation rep = build_representation({{2, 2, 2}, {0, 0, 0}});
  EXPECT_LT(rep.relator_defect, 1e-9);
  EXPECT_NEAR(std::abs(trace_value(rep, "a1")), 2 * std::cosh(1.0), 1e-12);
  EXPECT_NEAR(std::abs(trace_value(rep, "a1")), 3.0861612696304874, 1e-12);
}

TEST(Fuchsian, RandomPointsSatisfyDiscretenessSignature) {
  std::mt19937_64 rng(11);
  const auto family = embedding_set(SurfaceGroup(2), 4);
  for (int trial = 0; trial < 20; ++trial) {
    const FenchelNielsen fn = random_point(rng);
    const Representation rep = build_representation(fn);
    EXPECT_LT(rep.relator_defect, 1e-9);
    for (const ScaledMatrix& g : rep.images) EXPECT_EQ(g.max_imag_relative(), 0.0);
    for (const Word& w : family) {
      const LogTrace t = trace_of(rep, w);
      ASSERT_FALSE(t.trace_zero);
      EXPECT_LT(std::abs(t.phase.imag()) * std::exp(t.log_abs_trace), 1e-9);
      EXPECT_GE(std::exp(t.log_abs_trace), 2 - 1e-9) << w.to_string();
    }
  }
}

TEST(Fuchsian, PantsLengthsRoundTrip) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const FenchelNielsen fn = random_point(rng);
    const Representation rep = build_representation(fn);
    const auto words = pants_curve_words();
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(hyperbolic_length(rep, words[i]), fn.lengths[i], 1e-9);
  }
}

TEST(Fuchsian, EulerSignIsStable) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) EXPECT_EQ(build_representation(random_point(rng)).euler_sign, 1);
}

TEST(Fuchsian, TwistingKeepsCuffTraces) {
  const Representation base = build_representation({{2, 2, 2}, {0, 0, 0}});
  for (double t : {-7.3, -0.4, 0.9, 3.0, 40.0}) {
    const Representation rep = build_representation({{2, 2, 2}, {t, 0, 0}});
    for (const char* w : {"a1", "a2", "a1b1A1B1"})
      EXPECT_NEAR(trace_value(rep, w), trace_value(base, w), 1e-9 * std::abs(trace_value(base, w)));
  }
}

TEST(Fuchsian, TracesOfCurvesDisjointFromTheTwistCurveAreConstant) {
  const FenchelNielsen base{{1.2, 2.7, 1.9}, {0.4, -0.3, 0.8}};
  // Words carried by the torus <a2, b2> miss a1; words in <a1, b1> miss a2.
  const std::vector<std::pair<int, std::vector<const char*>>> cases = {
      {0, {"a2", "b2", "a2b2", "a2B2", "a2a2b2", "a1b1A1B1"}},
      {1, {"a1", "b1", "a1b1", "a1B1", "b1b1a1", "a1b1A1B1"}},
  };
  for (const auto& [curve, words] : cases) {
    const auto seq = twist_sequence(base, curve, 1.7, 12, {});
    for (const char* w : words) {
      const double ref = trace_value(seq.front().rep, w);
      for (const TeichPoint& p : seq) EXPECT_NEAR(trace_value(p.rep, w), ref, 1e-9 * std::abs(ref)) << w;
    }
  }
}

TEST(Fuchsian, FullDehnTwistMatchesTwistedWordsAcrossTheMarkingSwitch) {
  // Twists t = r + k l are realised with k as a word substitution. Across t = l/2 the
  // stored (r, k) jumps from (l/2, 0) to (-l/2, 1), so continuity there compares the
  // geometric twist by a full length with the symbolic Dehn twist.
  const FenchelNielsen base{{1.3, 2.1, 1.7}, {0.2, -0.5, 0.4}};
  const auto family = embedding_set(SurfaceGroup(2), 3);
  for (int curve = 0; curve < 3; ++curve) {
    FenchelNielsen lo = base, hi = base;
    const double edge = base.lengths[static_cast<std::size_t>(curve)] / 2;
    lo.twists[static_cast<std::size_t>(curve)] = edge - 1e-10;
    hi.twists[static_cast<std::size_t>(curve)] = edge + 1e-10;
    const Representation a = build_representation(lo), b = build_representation(hi);
    ASSERT_NE(a.marking, b.marking);
    for (const Word& w : family) {
      const LogTrace ta = trace_of(a, w), tb = trace_of(b, w);
      EXPECT_NEAR(ta.log_abs_trace, tb.log_abs_trace, 1e-8) << "curve " << curve << " word " << w.to_string();
    }
  }
}

TEST(Fuchsian, CharacterMatchesFrozenValues) {
  std::ifstream in(std::string(TEICHTROP_SOURCE_DIR) + "/tests/golden/character_fn1.txt");
  ASSERT_TRUE(in);
  const Representation rep = build_representation({{1.5, 2.0, 2.5}, {0.3, -0.7, 1.1}});
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream s(line);
    std::string word;
    double log_abs = 0;
    int sign = 0;
    s >> word >> log_abs >> sign;
    const LogTrace t = trace_of(rep, Word::parse(word));
    EXPECT_NEAR(t.log_abs_trace, log_abs, 1e-9) << word;
    EXPECT_EQ(t.sign(), sign) << word;
    ++rows;
  }
  EXPECT_EQ(rows, embedding_set(SurfaceGroup(2), 4).size());
}

TEST(Fuchsian, CharacterAgreesWithDirectEvaluation) {
  const auto family = embedding_set(SurfaceGroup(2), 3);
  const TeichPoint p({{1.1, 0.9, 2.4}, {1.0, -2.0, 0.5}}, family);
  for (std::size_t j = 0; j < family.size(); ++j) {
    const ScaledMatrix m = evaluate(p.rep, family[j]);
    const double direct = std::log(std::abs(m.value(0) + m.value(3)));
    EXPECT_NEAR(p.character[j].log_abs_trace, direct, 1e-9);
  }
}

TEST(HyperbolicLength, InvertsTheTraceFormula) {
  LogTrace t;
  t.trace_zero = false;
  t.log_abs_trace = std::log(2 * std::cosh(1.0));
  EXPECT_NEAR(hyperbolic_length(t), 2.0, 1e-14);
  t.log_abs_trace = std::log(2.0);
  EXPECT_NEAR(hyperbolic_length(t), 0.0, 1e-7);
  t.log_abs_trace = std::log(1.5);
  EXPECT_THROW(hyperbolic_length(t), Error);
}

TEST(HyperbolicLength, LargeTraceBranchIsContinuous) {
  LogTrace t;
  t.trace_zero = false;
  t.log_abs_trace = 40 - 1e-12;
  const double below = hyperbolic_length(t);
  t.log_abs_trace = 40 + 1e-12;
  const double above = hyperbolic_length(t);
  EXPECT_NEAR(below, above, 1e-9);
  t.log_abs_trace = 500;
  EXPECT_DOUBLE_EQ(hyperbolic_length(t), 1000.0);
}

TEST(HyperbolicLength, AgreesWithEigenvalueOfTheMatrix) {
  const Representation rep = build_representation({{2, 2, 2}, {0, 0, 0}});
  for (const char* w : {"a1", "b1", "a1b1", "a2B2b1"}) {
    const ScaledMatrix m = evaluate(rep, Word::parse(w));
    const double tr = std::abs((m.value(0) + m.value(3)).real());
    const double lambda = (tr + std::sqrt(tr * tr - 4)) / 2;
    EXPECT_NEAR(hyperbolic_length(rep, Word::parse(w)), 2 * std::log(lambda), 1e-10) << w;
  }
}

TEST(TwistSequence, SingletonAndFullTwistSteps) {
  const FenchelNielsen base{{2, 2, 2}, {0.1, 0.2, 0.3}};
  const auto one = twist_sequence(base, 1, 5.0, 1, {});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].fn.twists, base.twists);
  const auto three = twist_sequence(base, 0, base.lengths[0], 3, {});
  for (const TeichPoint& p : three)
    for (const Word& w : pants_curve_words())
      EXPECT_NEAR(hyperbolic_length(p.rep, w), hyperbolic_length(three[0].rep, w), 1e-9);
  EXPECT_THROW(twist_sequence(base, 3, 1.0, 3, {}), Error);
  EXPECT_THROW(twist_sequence(base, 0, 0.0, 3, {}), Error);
}

TEST(TwistSequence, DualLengthSlopeEqualsIntersectionNumber) {
  // Along t -> t + s k the length of a curve crossing the twist curve i times grows like
  // i * s * k; the slope is compared with the geometric intersection count.
  const FenchelNielsen base{{2, 2, 2}, {0, 0, 0}};
  const std::vector<std::pair<int, const char*>> duals = {{0, "b1"}, {1, "b2"}, {2, "a1a2"}};
  for (const auto& [curve, dual] : duals) {
    const Word w = Word::parse(dual);
    const auto seq = twist_sequence(base, curve, 5.0, 60, {w});
    const long i = intersection_number(build_representation(base), pants_curve_words()[static_cast<std::size_t>(curve)], w);
    ASSERT_GT(i, 0);
    // Least-squares slope over the second half.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int k = 30; k < 60; ++k) {
      const double y = hyperbolic_length(seq[static_cast<std::size_t>(k)].character[0]);
      sx += k, sy += y, sxx += double(k) * k, sxy += k * y;
      ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    EXPECT_NEAR(slope / 5.0, static_cast<double>(i), 1e-2 * static_cast<double>(i)) << dual;
  }
}

TEST(Fuchsian, RejectsDegenerateAndUnsupportedInput) {
  EXPECT_THROW(build_representation({{2, 1e-9, 2}, {0, 0, 0}}), Error);
  EXPECT_THROW(build_representation({{2, 2, 2, 2, 2, 2}, {0, 0, 0, 0, 0, 0}}, SurfaceGroup(3)), Error);
  try {
    build_representation({{2, 0, 2}, {0, 0, 0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateLength);
  }
}
