#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "teichtrop/laminations.hpp"

using namespace teichtrop;

namespace {

std::vector<CurveClass> table() { return load_curve_table(std::string(TEICHTROP_DATA_DIR) + "/curves_genus2.txt"); }

const CurveClass& named(const std::vector<CurveClass>& t, const std::string& name) {
  for (const CurveClass& c : t)
    if (c.name == name) return c;
  throw std::runtime_error("no curve " + name);
}

const FenchelNielsen kPoint1{{1.5, 2.0, 2.5}, {0.3, -0.7, 1.1}};
const FenchelNielsen kPoint2{{0.6, 3.5, 1.0}, {-2.5, 2.9, 0.0}};
const FenchelNielsen kPoint3{{4.0, 0.5, 3.9}, {3.0, -3.0, -2.0}};

}  // namespace

TEST(CurveTable, LoadsNineCurvesWithCoordinates) {
  const auto t = table();
  ASSERT_EQ(t.size(), 9u);
  for (const CurveClass& c : t) {
    EXPECT_TRUE(c.dt.has_value()) << c.name;
    EXPECT_FALSE(c.word.empty());
    EXPECT_EQ(cyclic_reduce(c.word), c.word) << c.name;
  }
}

TEST(CurveTable, RejectsMalformedInput) {
  std::istringstream no_version("genus 2\na1 a1 0 0 0 1 0 0\n");
  EXPECT_THROW(parse_curve_table(no_version), Error);
  std::istringstream bad_word("version 1\ngenus 2\nx q1 0 0 0 1 0 0\n");
  EXPECT_THROW(parse_curve_table(bad_word), Error);
  std::istringstream short_dt("version 1\ngenus 2\nx a1 0 0\n");
  EXPECT_THROW(parse_curve_table(short_dt), Error);
}

TEST(DtFormula, PantsCurvesAndSelfPairsAreZero) {
  const auto t = table();
  for (const char* a : {"a1", "a2", "c"})
    for (const char* b : {"a1", "a2", "c"}) EXPECT_EQ(dt_formula_intersection(named(t, a), named(t, b)), 0);
  for (const CurveClass& c : t) EXPECT_EQ(dt_formula_intersection(c, c), 0) << c.name;
}

TEST(DtFormula, IsSymmetric) {
  const auto t = table();
  for (const CurveClass& a : t)
    for (const CurveClass& b : t) EXPECT_EQ(dt_formula_intersection(a, b), dt_formula_intersection(b, a));
}

TEST(DtFormula, KnownSmallValues) {
  const auto t = table();
  EXPECT_EQ(dt_formula_intersection(named(t, "a1"), named(t, "b1")), 1);
  EXPECT_EQ(dt_formula_intersection(named(t, "a2"), named(t, "b2")), 1);
  EXPECT_EQ(dt_formula_intersection(named(t, "c"), named(t, "d")), 2);
  EXPECT_EQ(dt_formula_intersection(named(t, "b1"), named(t, "Ta1b1")), 1);
}

TEST(Oracle, SimpleCurveDoesNotCrossItself) {
  const Representation rep = build_representation(kPoint1);
  for (const CurveClass& c : table()) {
    const OracleResult r = intersection_number_oracle(rep, c.word, c.word);
    EXPECT_TRUE(r.converged) << c.name;
    EXPECT_EQ(r.count, 0) << c.name;
  }
}

TEST(Oracle, DistinctPantsCurvesAreDisjoint) {
  const Representation rep = build_representation(kPoint2);
  const auto p = pants_curve_words();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) {
      const OracleResult r = intersection_number_oracle(rep, p[i], p[j]);
      EXPECT_TRUE(r.converged);
      EXPECT_EQ(r.count, 0);
    }
}

TEST(Oracle, AgreesWithFormulaOnEveryCuratedPair) {
  const auto t = table();
  const Representation rep = build_representation(kPoint1);
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      const OracleResult r = intersection_number_oracle(rep, t[i].word, t[j].word);
      EXPECT_TRUE(r.converged) << t[i].name << " x " << t[j].name;
      EXPECT_EQ(r.count, dt_formula_intersection(t[i], t[j])) << t[i].name << " x " << t[j].name;
    }
}

TEST(Oracle, IsSymmetric) {
  const auto t = table();
  const Representation rep = build_representation(kPoint3);
  for (const auto& [a, b] : std::vector<std::pair<const char*, const char*>>{{"a1", "b1"}, {"c", "d"}, {"Tcd", "b2"}, {"Ta1b1", "Ta2b2"}}) {
    const OracleResult ab = intersection_number_oracle(rep, named(t, a).word, named(t, b).word);
    const OracleResult ba = intersection_number_oracle(rep, named(t, b).word, named(t, a).word);
    EXPECT_TRUE(ab.converged && ba.converged);
    EXPECT_EQ(ab.count, ba.count) << a << " x " << b;
  }
}

TEST(Oracle, IndependentOfTheBasePoint) {
  const auto t = table();
  const std::vector<Representation> reps = {build_representation(kPoint1), build_representation(kPoint2),
                                            build_representation(kPoint3)};
  for (const auto& [a, b] : std::vector<std::pair<const char*, const char*>>{{"a1", "Ta1b1"}, {"c", "Tcd"}, {"d", "b1"}}) {
    std::set<long> values;
    for (const Representation& rep : reps) {
      const OracleResult r = intersection_number_oracle(rep, named(t, a).word, named(t, b).word);
      EXPECT_TRUE(r.converged);
      values.insert(r.count);
    }
    EXPECT_EQ(values.size(), 1u) << a << " x " << b;
  }
}

TEST(Oracle, ProperPowersMultiply) {
  const Representation rep = build_representation(kPoint1);
  EXPECT_EQ(intersection_number(rep, Word::parse("a1"), Word::parse("b1b1")), 2);
  EXPECT_EQ(intersection_number(rep, Word::parse("a1a1"), Word::parse("b1b1b1")), 6);
}

TEST(Oracle, LargeTwistsDoNotChangeCounts) {
  // The marking carries the full Dehn twists; counts are mapping class invariant.
  const auto t = table();
  const Representation rep = build_representation({{1.5, 2.0, 2.5}, {41.3, -37.2, 25.9}});
  for (const auto& [a, b] : std::vector<std::pair<const char*, const char*>>{{"a1", "b1"}, {"c", "d"}, {"a2", "Ta2b2"}}) {
    const OracleResult r = intersection_number_oracle(rep, named(t, a).word, named(t, b).word);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.count, dt_formula_intersection(named(t, a), named(t, b)));
  }
}

TEST(Oracle, RejectsTheTrivialWord) {
  const Representation rep = build_representation(kPoint1);
  EXPECT_THROW(intersection_number_oracle(rep, Word{}, Word::parse("a1")), Error);
  EXPECT_THROW(intersection_number_oracle(rep, Word::parse("a1A1"), Word::parse("a1")), Error);
}

TEST(IntersectionVector, EmptyMulticurveIsZero) {
  const auto t = table();
  EmbeddingFamily fam;
  fam.curves = t;
  const auto v = intersection_vector(Multicurve{}, fam, build_representation(kPoint1));
  EXPECT_EQ(v, std::vector<double>(t.size(), 0.0));
}

TEST(IntersectionVector, PantsCurveRowOverTheCuratedTable) {
  const auto t = table();
  EmbeddingFamily fam;
  fam.curves = t;
  const Representation rep = build_representation(kPoint1);
  // Order of the table: a1 a2 c b1 b2 d Ta1b1 Ta2b2 Tcd.
  EXPECT_EQ(intersection_vector(Multicurve{{{named(t, "a1"), 1.0}}}, fam, rep),
            (std::vector<double>{0, 0, 0, 1, 0, 0, 1, 0, 0}));
  EXPECT_EQ(intersection_vector(Multicurve{{{named(t, "c"), 1.0}}}, fam, rep),
            (std::vector<double>{0, 0, 0, 0, 0, 2, 0, 0, 2}));
}

TEST(IntersectionVector, HomogeneousAndAdditiveInTheWeights) {
  const auto t = table();
  EmbeddingFamily fam;
  fam.curves = t;
  const Representation rep = build_representation(kPoint2);
  const auto va = intersection_vector(Multicurve{{{named(t, "a1"), 1.0}}}, fam, rep);
  const auto vc = intersection_vector(Multicurve{{{named(t, "a2"), 1.0}}}, fam, rep);
  const auto scaled = intersection_vector(Multicurve{{{named(t, "a1"), 2.5}}}, fam, rep);
  const auto sum = intersection_vector(Multicurve{{{named(t, "a1"), 0.75}, {named(t, "a2"), 3.0}}}, fam, rep);
  for (std::size_t j = 0; j < t.size(); ++j) {
    EXPECT_EQ(scaled[j], 2.5 * va[j]);
    EXPECT_EQ(sum[j], 0.75 * va[j] + 3.0 * vc[j]);
  }
}

TEST(JointFamily, CuratedCurvesFirstAndNoRepeatedClasses) {
  const auto t = table();
  const EmbeddingFamily fam = joint_family(t, embedding_set(SurfaceGroup(2), 4));
  ASSERT_GT(fam.size(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(fam.curves[i].name, t[i].name);
  std::set<std::vector<int>> keys;
  for (const CurveClass& c : fam.curves) EXPECT_TRUE(keys.insert(cyclic_class_key(cyclic_reduce(c.word))).second) << c.name;
}
