#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "teichtrop/scaled_matrix.hpp"

using namespace teichtrop;

namespace {

ScaledMatrix random_sl2(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3, 3);
  while (true) {
    const double a = u(rng), b = u(rng), c = u(rng);
    if (std::abs(a) < 0.2) continue;
    return ScaledMatrix::real(a, b, c, (1 + b * c) / a);
  }
}

Complex trace(const ScaledMatrix& m) { return m.value(0) + m.value(3); }

Word random_word(std::mt19937_64& rng, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len), letter(0, 7);
  std::vector<Letter> ls;
  for (int i = len(rng); i > 0; --i) {
    const int x = letter(rng);
    ls.push_back({x / 2, x % 2 == 1});
  }
  return Word(ls);
}

// Non-negative big integer in base 1e9, enough for exact powers of a small matrix.
struct BigUInt {
  std::vector<std::uint64_t> limbs{0};  // little endian
  static constexpr std::uint64_t kBase = 1000000000;

  static BigUInt from(std::uint64_t v) {
    BigUInt b;
    b.limbs.clear();
    do {
      b.limbs.push_back(v % kBase);
      v /= kBase;
    } while (v);
    return b;
  }
  BigUInt times(std::uint64_t k) const {
    BigUInt out;
    out.limbs.clear();
    std::uint64_t carry = 0;
    for (std::uint64_t l : limbs) {
      const std::uint64_t v = l * k + carry;
      out.limbs.push_back(v % kBase);
      carry = v / kBase;
    }
    while (carry) {
      out.limbs.push_back(carry % kBase);
      carry /= kBase;
    }
    return out;
  }
  BigUInt plus(const BigUInt& o) const {
    BigUInt out;
    out.limbs.clear();
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < std::max(limbs.size(), o.limbs.size()) || carry; ++i) {
      const std::uint64_t v = (i < limbs.size() ? limbs[i] : 0) + (i < o.limbs.size() ? o.limbs[i] : 0) + carry;
      out.limbs.push_back(v % kBase);
      carry = v / kBase;
    }
    return out;
  }
  double log() const {
    // Three leading limbs carry far more than double precision.
    double lead = 0;
    const std::size_t n = limbs.size();
    const std::size_t take = std::min<std::size_t>(3, n);
    for (std::size_t i = 0; i < take; ++i) lead = lead * static_cast<double>(kBase) + static_cast<double>(limbs[n - 1 - i]);
    return std::log(lead) + static_cast<double>(n - take) * std::log(static_cast<double>(kBase));
  }
};

}  // namespace

TEST(ScaledMatrix, NormalizedMantissaLiesInOneTwo) {
  std::mt19937_64 rng(1);
  ScaledMatrix m;
  for (int i = 0; i < 200; ++i) {
    m = m * random_sl2(rng);
    EXPECT_GE(m.max_abs_entry(), 1.0);
    EXPECT_LT(m.max_abs_entry(), 2.0);
  }
  EXPECT_EQ(ScaledMatrix::identity().exponent(), 0);
}

TEST(ScaledMatrix, DeterminantStaysOne) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const ScaledMatrix m = random_sl2(rng) * random_sl2(rng) * random_sl2(rng);
    EXPECT_NEAR(std::abs(m.determinant() - 1.0), 0.0, 1e-12 * std::pow(m.max_abs_entry() * std::exp2(double(m.exponent())), 2));
  }
}

TEST(ScaledMatrix, FundamentalTraceIdentity) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const ScaledMatrix a = random_sl2(rng), b = random_sl2(rng);
    const Complex lhs = trace(a * b) + trace(a * b.inverse());
    const Complex rhs = trace(a) * trace(b);
    const double scale = std::max({1.0, std::abs(rhs), std::abs(trace(a * b)), std::abs(trace(a * b.inverse()))});
    EXPECT_LT(std::abs(lhs - rhs), 1e-9 * scale) << "trial " << trial;
  }
}

TEST(ScaledMatrix, EvaluateIsAHomomorphism) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ScaledMatrix> images;
    for (int g = 0; g < 4; ++g) images.push_back(random_sl2(rng));
    const Word w1 = random_word(rng, 8), w2 = random_word(rng, 8);
    const ScaledMatrix lhs = evaluate(std::span<const ScaledMatrix>(images), w1 * w2);
    const ScaledMatrix rhs = evaluate(std::span<const ScaledMatrix>(images), w1) * evaluate(std::span<const ScaledMatrix>(images), w2);
    const double scale = std::max(1.0, lhs.max_abs_entry() * std::exp2(double(lhs.exponent())));
    EXPECT_LT(distance(lhs, rhs), 1e-9 * scale);
  }
}

TEST(ScaledMatrix, WordTimesInverseIsIdentity) {
  std::mt19937_64 rng(5);
  std::vector<ScaledMatrix> images;
  for (int g = 0; g < 4; ++g) images.push_back(random_sl2(rng));
  for (int trial = 0; trial < 100; ++trial) {
    const Word w = random_word(rng, 6);
    // rounding grows with the squared size of the partial products
    const ScaledMatrix m = evaluate(std::span<const ScaledMatrix>(images), w);
    const double size = std::max(1.0, m.max_abs_entry() * std::exp2(double(m.exponent())));
    EXPECT_LT(evaluate(std::span<const ScaledMatrix>(images), w * w.inverse()).distance_to_identity(), 1e-12 * size * size);
  }
  const ScaledMatrix e = evaluate(std::span<const ScaledMatrix>(images), Word{});
  EXPECT_EQ(e.exponent(), 0);
  EXPECT_EQ(e.distance_to_identity(), 0.0);
}

TEST(ScaledMatrix, LogTraceIsConjugationInvariant) {
  std::mt19937_64 rng(6);
  std::vector<ScaledMatrix> images;
  for (int g = 0; g < 4; ++g) images.push_back(random_sl2(rng));
  const std::span<const ScaledMatrix> im(images);
  for (int trial = 0; trial < 300; ++trial) {
    const Word w = random_word(rng, 8), g = random_word(rng, 5);
    const LogTrace a = log_trace(evaluate(im, w)), b = log_trace(evaluate(im, g * w * g.inverse()));
    if (a.trace_zero || std::exp(a.log_abs_trace) < 1e-3) continue;
    EXPECT_NEAR(a.log_abs_trace, b.log_abs_trace, 1e-9 * std::max(1.0, std::abs(a.log_abs_trace)));
  }
}

TEST(ScaledMatrix, SemanticValueIndependentOfNormalization) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const ScaledMatrix m = random_sl2(rng);
    for (int shift : {-40, -3, 0, 5, 60}) {
      const double s = std::exp2(-shift);
      const ScaledMatrix n(m.value(0) * s, m.value(1) * s, m.value(2) * s, m.value(3) * s, shift);
      for (int i = 0; i < 4; ++i) EXPECT_LT(std::abs(n.value(i) - m.value(i)), 1e-15 * 4);
      EXPECT_NEAR(log_trace(n).log_abs_trace, log_trace(m).log_abs_trace, 1e-14);
    }
  }
}

TEST(ScaledMatrix, LogTraceExamples) {
  EXPECT_NEAR(log_trace(ScaledMatrix::identity()).log_abs_trace, std::log(2.0), 1e-15);
  const double l = std::exp(3.0);
  const LogTrace d = log_trace(ScaledMatrix::real(l, 0, 0, 1 / l));
  EXPECT_NEAR(d.log_abs_trace, 3.0 + std::log1p(std::exp(-6.0)), 1e-13);
  EXPECT_TRUE(log_trace(ScaledMatrix::real(0, -1, 1, 0)).trace_zero);
}

TEST(ScaledMatrix, LogTraceMatchesDirectTraceWhenRepresentable) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    ScaledMatrix m;
    for (int k = 0; k < 10; ++k) m = m * random_sl2(rng);
    const double direct = std::abs(trace(m));
    if (direct < 1e-3) continue;
    EXPECT_NEAR(std::exp(log_trace(m).log_abs_trace) / direct, 1.0, 1e-9);
  }
}

TEST(ScaledMatrix, FortiethPowerAgreesWithExactIntegerPowers) {
  // M = [[9, 8], [1, 1]] has trace 10 and determinant 1.
  const ScaledMatrix m = ScaledMatrix::real(9, 8, 1, 1);
  ScaledMatrix p;
  BigUInt a = BigUInt::from(1), b = BigUInt::from(0), c = BigUInt::from(0), d = BigUInt::from(1);
  for (int k = 0; k < 40; ++k) {
    p = p * m;
    // [a b; c d] * [9 8; 1 1]
    BigUInt na = a.times(9).plus(b), nb = a.times(8).plus(b), nc = c.times(9).plus(d), nd = c.times(8).plus(d);
    a = na, b = nb, c = nc, d = nd;
  }
  const double exact = a.plus(d).log();
  EXPECT_NEAR(log_trace(p).log_abs_trace, exact, 1e-12 * exact);
  EXPECT_NEAR(exact, 40 * std::acosh(5.0), 1e-12 * exact);
}

TEST(ScaledMatrix, HugePowersDoNotOverflow) {
  const ScaledMatrix m = ScaledMatrix::real(9, 8, 1, 1);
  ScaledMatrix p;
  for (int k = 0; k < 2000; ++k) p = p * m;
  const LogTrace t = log_trace(p);
  ASSERT_FALSE(t.trace_zero);
  EXPECT_TRUE(std::isfinite(t.log_abs_trace));
  EXPECT_NEAR(t.log_abs_trace, 2000 * std::acosh(5.0), 1e-9 * t.log_abs_trace);
}
