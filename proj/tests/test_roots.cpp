#include <gtest/gtest.h>

#include <algorithm>
#include <complex>
#include <random>

#include "teichtrop/roots.hpp"
#include "teichtrop/symeig.hpp"

using namespace teichtrop;
using C = std::complex<double>;

namespace {

std::vector<C> from_roots(const std::vector<C>& roots) {
  std::vector<C> c{1.0};
  for (C r : roots) {
    std::vector<C> next(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= r * c[k];
    }
    c = next;
  }
  return c;
}

// Each expected root has a distinct found root within tol (relative).
void expect_roots(const std::vector<C>& found, std::vector<C> expected, double tol) {
  ASSERT_EQ(found.size(), expected.size());
  for (C f : found) {
    auto it = std::min_element(expected.begin(), expected.end(), [f](C a, C b) { return std::abs(a - f) < std::abs(b - f); });
    EXPECT_LT(std::abs(*it - f), tol * std::max(1.0, std::abs(*it))) << f;
    expected.erase(it);
  }
}

}  // namespace

TEST(Roots, QuadraticAndCubic) {
  const RootResult q = find_roots({-1.0, 0.0, 1.0});
  EXPECT_TRUE(q.converged);
  expect_roots(q.roots, {1.0, -1.0}, 1e-12);
  const RootResult c = find_roots(from_roots({2.0, C(0, 3), C(-1, -1)}));
  EXPECT_TRUE(c.converged);
  expect_roots(c.roots, {2.0, C(0, 3), C(-1, -1)}, 1e-11);
}

TEST(Roots, WidelySeparatedMagnitudes) {
  const std::vector<C> r = {1e-6, C(0, 1), -1e6, C(3e3, 4e3)};
  const RootResult out = find_roots(from_roots(r));
  EXPECT_TRUE(out.converged);
  expect_roots(out.roots, r, 1e-8);
}

TEST(Roots, ZeroAndTrailingCoefficients) {
  const RootResult z = find_roots({0.0, 0.0, 2.0, 1.0, 0.0});  // x^2 (x + 2)
  ASSERT_EQ(z.roots.size(), 3u);
  EXPECT_EQ(std::count(z.roots.begin(), z.roots.end(), C(0.0)), 2);
  EXPECT_TRUE(find_roots({5.0}).roots.empty());
}

TEST(Roots, RandomPolynomialsMeetTheResidualContract) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> mag(-6, 6), ph(0, 6.283185307179586);
  std::uniform_int_distribution<int> deg(1, 6);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<C> c(static_cast<std::size_t>(deg(rng)) + 1);
    for (C& x : c) x = std::polar(std::pow(10.0, mag(rng)), ph(rng));
    const RootResult r = find_roots(c);
    EXPECT_TRUE(r.converged) << "trial " << trial;
    for (double res : r.residuals) EXPECT_LT(res, 1e-10);
  }
}

TEST(SymmetricEigen, DiagonalizesRandomMatrices) {
  std::mt19937_64 rng(22);
  std::normal_distribution<double> g;
  for (std::size_t n : {1u, 2u, 3u, 5u}) {
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) a[i * n + j] = a[j * n + i] = g(rng);
    const SymmetricEigen e = symmetric_eigen(a, n);
    for (std::size_t k = 0; k < n; ++k) {
      if (k + 1 < n) { EXPECT_GE(e.values[k], e.values[k + 1]); }
      for (std::size_t i = 0; i < n; ++i) {
        double av = 0;
        for (std::size_t j = 0; j < n; ++j) av += a[i * n + j] * e.vectors[k][j];
        EXPECT_NEAR(av, e.values[k] * e.vectors[k][i], 1e-12);
      }
      for (std::size_t l = 0; l < n; ++l) {
        double dot = 0;
        for (std::size_t i = 0; i < n; ++i) dot += e.vectors[k][i] * e.vectors[l][i];
        EXPECT_NEAR(dot, k == l ? 1.0 : 0.0, 1e-12);
      }
    }
  }
}
