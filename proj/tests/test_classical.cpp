#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "hilbert/classical.hpp"

using namespace hilbert::classical;

namespace {

std::int64_t inverse_mod(std::int64_t a, std::int64_t c) {
  for (std::int64_t x = 1; x < c; ++x) {
    if ((a * x) % c == 1) return x;
  }
  return 0;
}

int euler_phi(std::int64_t c) {
  int n = 0;
  for (std::int64_t x = 1; x <= c; ++x) n += std::gcd(x, c) == 1;
  return n;
}

}  // namespace

TEST(Params, Validation) {
  EXPECT_THROW((ClassicalParams{1, 1, 11, 1}).validate(), std::invalid_argument);
  EXPECT_THROW((ClassicalParams{1, 1, 2, 1}).validate(), std::invalid_argument);
  EXPECT_THROW((ClassicalParams{0, 1, 12, 1}).validate(), std::invalid_argument);
  EXPECT_THROW(kloosterman(1, 1, 0), std::invalid_argument);
}

TEST(Kloosterman, SmallModuli) {
  EXPECT_EQ(kloosterman(1, 1, 1), 1.0);
  for (std::int64_t c : {2, 3, 4, 5, 6, 7, 8, 9, 12, 30}) {
    EXPECT_NEAR(kloosterman(0, 0, c), euler_phi(c), 1e-12) << c;
  }
  // Ramanujan sums: S(1, 0; p) = -1 for a prime p
  for (std::int64_t p : {3, 5, 7, 11, 13}) EXPECT_NEAR(kloosterman(1, 0, p), -1.0, 1e-12) << p;
}

TEST(Kloosterman, Symmetry) {
  for (std::int64_t c = 1; c <= 40; ++c) {
    for (std::int64_t m = 1; m <= 5; ++m) {
      for (std::int64_t n = 1; n <= 5; ++n) {
        EXPECT_NEAR(kloosterman(m, n, c), kloosterman(n, m, c), 1e-10);
        EXPECT_LE(std::abs(kloosterman(m, n, c)), euler_phi(c) + 1e-9);
        if (std::gcd(m, c) == 1) EXPECT_NEAR(kloosterman(m, n, c), kloosterman(1, m * n, c), 1e-10);
      }
    }
  }
}

TEST(Kloosterman, TwistedMultiplicativity) {
  // S(m,n;c1 c2) = S(m c2', n c2'; c1) S(m c1', n c1'; c2) with c2 c2' = 1 mod c1, c1 c1' = 1 mod c2
  for (auto [c1, c2] : {std::pair<std::int64_t, std::int64_t>{3, 5}, {4, 7}, {5, 9}, {8, 11}, {7, 13}}) {
    const std::int64_t i2 = inverse_mod(c2 % c1, c1), i1 = inverse_mod(c1 % c2, c2);
    for (std::int64_t m = 1; m <= 4; ++m) {
      for (std::int64_t n = 1; n <= 4; ++n) {
        const double lhs = kloosterman(m, n, c1 * c2);
        const double rhs = kloosterman(m * i2 * i2, n, c1) * kloosterman(m * i1 * i1, n, c2);
        EXPECT_NEAR(lhs, rhs, 1e-9) << c1 << "*" << c2 << " m=" << m << " n=" << n;
      }
    }
  }
}

TEST(Kloosterman, WeilBound) {
  for (std::int64_t p : {5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    for (std::int64_t m = 1; m < 5; ++m) EXPECT_LE(std::abs(kloosterman(m, 1, p)), 2 * std::sqrt(double(p)) + 1e-9);
  }
}

TEST(Bessel, MatchesStd) {
  double worst = 0;
  for (int v = 0; v < 48; ++v) {
    for (double x : {0.0, 0.1, 1.0, 5.0, 11.9, 12.1, 17.77, 30.0, 50.0, 123.4, 999.0}) {
      const double ref = std::cyl_bessel_j(static_cast<double>(v), x);
      worst = std::max(worst, std::abs(bessel_j(v, x) - ref));
    }
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Bessel, ThreeTermRecurrence) {
  for (double x : {0.7, 3.0, 12.5, 40.0, 200.0}) {
    for (int v = 1; v < 30; ++v) {
      const double lhs = bessel_j(v - 1, x) + bessel_j(v + 1, x);
      const double rhs = 2.0 * v / x * bessel_j(v, x);
      EXPECT_NEAR(lhs, rhs, 1e-12) << v << " " << x;
    }
  }
}

TEST(Bessel, SeriesRemainderAndDomain) {
  const auto s = bessel_j_series(11, 4.0);
  EXPECT_GE(s.remainder, 0.0);
  EXPECT_LT(s.remainder, 1e-16);
  EXPECT_THROW(bessel_j(-1, 1.0), std::domain_error);
  EXPECT_THROW(bessel_j(1, 1001.0), std::domain_error);
}

TEST(Tau, KnownValues) {
  const auto t = delta_coefficients(10);
  const std::vector<long> expect{1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920};
  ASSERT_EQ(t.size(), expect.size());
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(t[i], BigInt(expect[i])) << i + 1;
}

TEST(Tau, HeckeRelations) {
  const auto t = delta_coefficients(400);
  auto tau = [&](int n) { return t[static_cast<std::size_t>(n - 1)]; };
  for (int p : {2, 3, 5, 7, 11, 13, 17, 19}) {
    EXPECT_EQ(tau(p * p), tau(p) * tau(p) - pow(BigInt(p), 11)) << p;
  }
  for (auto [a, b] : {std::pair{2, 3}, {4, 9}, {5, 7}, {8, 25}, {11, 13}, {16, 23}}) {
    EXPECT_EQ(tau(a * b), tau(a) * tau(b)) << a << "*" << b;
  }
}

TEST(Petersson, VanishesWithoutCuspForms) {
  // S_k(SL2(Z)) = 0 for these k, so every Poincare series is identically zero
  for (int k : {8, 10, 14}) {
    for (std::int64_t n : {1, 2, 3}) {
      const auto r = petersson_coefficient({1, n, k, 1}, 1500);
      EXPECT_LT(std::abs(r.value), 1e-9) << "k=" << k << " n=" << n;
    }
  }
}

TEST(Petersson, RatiosFollowTauAtWeight12) {
  const auto t = delta_coefficients(6);
  const double p1 = petersson_coefficient({1, 1, 12, 1}, 2000).value;
  for (int n = 2; n <= 6; ++n) {
    const double pn = petersson_coefficient({1, n, 12, 1}, 2000).value;
    EXPECT_NEAR(pn / p1, static_cast<double>(t[static_cast<std::size_t>(n - 1)]), 1e-9 * std::abs(static_cast<double>(t[n - 1]))) << n;
  }
}

TEST(Petersson, SymmetryUnderSwap) {
  // p_m(n) (m/n)^{(k-1)/2} is symmetric in (m, n)
  for (int k : {12, 16, 20}) {
    const double a = petersson_coefficient({2, 3, k, 1}, 2000).value * std::pow(2.0 / 3.0, (k - 1) / 2.0);
    const double b = petersson_coefficient({3, 2, k, 1}, 2000).value * std::pow(3.0 / 2.0, (k - 1) / 2.0);
    EXPECT_NEAR(a, b, 1e-10 * std::max(1.0, std::abs(a))) << k;
  }
}

TEST(Petersson, TailBoundShrinks) {
  const auto a = petersson_coefficient({1, 2, 12, 1}, 100);
  const auto b = petersson_coefficient({1, 2, 12, 1}, 1000);
  EXPECT_LT(b.tail_bound, a.tail_bound);
  EXPECT_LE(std::abs(a.value - b.value), a.tail_bound);
  EXPECT_THROW(petersson_coefficient({1, 1, 12, 5}, 4), std::invalid_argument);
}

TEST(Quadrature, AgreesWithPetersson) {
  for (auto [m, n, k, q] : {std::tuple<int, int, int, int>{1, 1, 12, 1}, {1, 2, 12, 1}, {2, 3, 16, 1}, {1, 2, 12, 3}, {1, 1, 20, 2}}) {
    const ClassicalParams p{m, n, k, q};
    const double quad = classical_poincare_coefficient_by_quadrature(p);
    const double pet = petersson_coefficient(p, 2000).value;
    EXPECT_NEAR(quad, pet, 1e-9 * std::max(1.0, std::abs(pet))) << m << "," << n << "," << k << "," << q;
  }
}

TEST(Quadrature, HighWeightNeedsLargerY) {
  const ClassicalParams p{1, 2, 40, 1};
  QuadraturePolicy pol;
  pol.y = 1.0;
  const double quad = classical_poincare_coefficient_by_quadrature(p, pol);
  const double pet = petersson_coefficient(p, 2000).value;
  EXPECT_NEAR(quad, pet, 1e-8);
  EXPECT_GT(quadrature_error_estimate(p), quadrature_error_estimate(p, pol));
}

TEST(Quadrature, RejectsIndexBeyondGrid) {
  QuadraturePolicy pol;
  pol.grid_n = 8;
  EXPECT_THROW(classical_poincare_coefficient_by_quadrature({1, 4, 12, 1}, pol), std::domain_error);
}

TEST(RangeScan, CertifiesSmallIndices) {
  const auto rows = nonvanishing_range_scan(12, 20, 500);
  ASSERT_EQ(rows.size(), 20u);
  EXPECT_EQ(largest_certified_prefix(rows), 20);
  std::vector<RangeScanRow> gap = rows;
  gap[3].certified = false;
  EXPECT_EQ(largest_certified_prefix(gap), 3);
}
