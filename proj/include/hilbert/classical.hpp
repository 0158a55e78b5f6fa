#pragma once

// Classical (F = Q) Poincare series for Gamma_0(q):
//
//   P_{m,k,q}(z) = sum over Gamma_inf \ Gamma_0(q) of (cz+d)^(-k) exp(2 pi i m gz)
//               = sum_n p_{m,k,q}(n) exp(2 pi i n z)
//
// Two independent routes to p_{m,k,q}(n): the Petersson formula with
// Kloosterman sums and J-Bessel values, and a direct coset sum sampled on a
// horizontal line followed by a discrete Fourier transform.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hilbert/poincare.hpp"
#include "hilbert/qfield.hpp"
#include "hilbert/summation.hpp"

namespace hilbert::classical {

using BigInt = boost::multiprecision::cpp_int;

struct ClassicalParams {
  std::int64_t m = 1;
  std::int64_t n = 1;
  int k = 12;
  std::int64_t q = 1;

  void validate() const {
    if (k < 4 || k % 2 != 0) throw std::invalid_argument("classical: weight must be even and >= 4, got " + std::to_string(k));
    if (m < 1 || n < 1 || q < 1) throw std::invalid_argument("classical: m, n, q must be positive");
  }
};

struct PeterssonResult {
  double value = 0;
  std::int64_t c_max = 0;
  double tail_bound = 0;
};

/// S(m, n; c) = sum over x mod c, gcd(x, c) = 1 of exp(2 pi i (m x + n x^-1)/c).
inline double kloosterman(std::int64_t m, std::int64_t n, std::int64_t c) {
  if (c < 1) throw std::invalid_argument("kloosterman: modulus must be positive");
  if (c == 1) return 1.0;
  const std::int64_t mr = detail::floor_mod(m, c), nr = detail::floor_mod(n, c);
  CompensatedSum<double> acc;
  for (std::int64_t x = 1; x < c; ++x) {
    const auto g = detail::ext_gcd(x, c);
    if (g[0] != 1) continue;
    const std::int64_t xinv = detail::floor_mod(g[1], c);
    const auto idx = static_cast<std::int64_t>((static_cast<__int128>(mr) * x + static_cast<__int128>(nr) * xinv) % c);
    acc.add(std::cos(2.0 * std::numbers::pi * static_cast<double>(idx) / static_cast<double>(c)));
  }
  return acc.value();
}

struct SeriesValue {
  double value = 0;
  double remainder = 0;  // bound on the omitted part of the series
};

/// Ascending series  J_v(x) = sum_j (-1)^j (x/2)^(2j+v) / (j! (j+v)!)  with a remainder bound.
///
/// Once the terms decrease monotonically the series alternates, so the first
/// omitted term bounds the error.
inline SeriesValue bessel_j_series(int order, double x, double tolerance = 1e-17) {
  if (order < 0 || !(x >= 0)) throw std::domain_error("bessel_j: need order >= 0 and x >= 0");
  if (x == 0) return {order == 0 ? 1.0 : 0.0, 0.0};
  const long double h = static_cast<long double>(x) / 2;
  long double t = std::exp(order * std::log(h) - std::lgamma(static_cast<long double>(order) + 1));
  long double sum = 0;
  for (int j = 0; j < 10000; ++j) {
    sum += t;
    const long double next = -t * h * h / ((j + 1.0L) * (j + 1.0L + order));
    const bool decreasing = std::abs(next) < std::abs(t);
    if (decreasing && std::abs(next) < tolerance) return {static_cast<double>(sum), static_cast<double>(std::abs(next))};
    t = next;
  }
  throw std::runtime_error("bessel_j: series did not converge");
}

namespace detail {

// Miller's backward recurrence normalized by J_0 + 2 sum J_2j = 1.
inline double bessel_j_miller(int order, double x) {
  const double big = std::max<double>(order, x);
  int start = static_cast<int>(big + 60 + 8 * std::sqrt(big));
  if (start % 2 != 0) ++start;
  long double jp1 = 0, j = 1e-300L, result = 0;
  long double norm = 0;
  for (int i = start; i > 0; --i) {
    const long double jm1 = (2.0L * i / x) * j - jp1;
    jp1 = j;
    j = jm1;
    if (i - 1 == order) result = j;
    if ((i - 1) % 2 == 0) norm += (i - 1 == 0) ? j : 2 * j;
    if (std::abs(j) > 1e250L) {
      j *= 1e-250L;
      jp1 *= 1e-250L;
      result *= 1e-250L;
      norm *= 1e-250L;
    }
  }
  return static_cast<double>(result / norm);
}

}  // namespace detail

/// Above this argument the ascending series loses too much to cancellation.
inline constexpr double kBesselSeriesLimit = 12.0;

/// J_order(x) for integer order >= 0 and 0 <= x <= 1000.
inline double bessel_j(int order, double x) {
  if (order < 0 || !(x >= 0) || x > 1000) throw std::domain_error("bessel_j: need order >= 0 and 0 <= x <= 1000");
  if (x <= kBesselSeriesLimit || order > 2 * x) return bessel_j_series(order, x).value;
  return detail::bessel_j_miller(order, x);
}

/// Partial Petersson sum over c <= c_max, q | c, with a tail bound from
/// |S(m,n;c)| <= c and J_v(x) <= (x/2)^v / v!.
inline PeterssonResult petersson_coefficient(const ClassicalParams& p, std::int64_t c_max) {
  p.validate();
  if (c_max < p.q) throw std::invalid_argument("petersson_coefficient: c_max must be at least q");
  const double mn = static_cast<double>(p.m) * static_cast<double>(p.n);
  const double ratio = std::pow(static_cast<double>(p.n) / static_cast<double>(p.m), 0.5 * (p.k - 1));
  const double sign = (p.k / 2) % 2 == 0 ? 1.0 : -1.0;  // i^(-k)
  CompensatedSum<double> acc;
  for (std::int64_t c = p.q; c <= c_max; c += p.q) {
    const double s = kloosterman(p.m, p.n, c);
    if (s == 0) continue;
    acc.add(s / static_cast<double>(c) * bessel_j(p.k - 1, 4.0 * std::numbers::pi * std::sqrt(mn) / static_cast<double>(c)));
  }
  PeterssonResult r;
  r.c_max = c_max;
  r.value = (p.m == p.n ? 1.0 : 0.0) + 2.0 * std::numbers::pi * sign * ratio * acc.value();
  const double log_tail = (p.k - 1) * std::log(2.0 * std::numbers::pi * std::sqrt(mn)) - std::lgamma(static_cast<double>(p.k)) +
                          (2.0 - p.k) * std::log(static_cast<double>(c_max)) - std::log(p.k - 2.0);
  r.tail_bound = 2.0 * std::numbers::pi * ratio * std::exp(log_tail);
  return r;
}

struct QuadraturePolicy {
  double y = 0.5;
  int grid_n = 64;
  /// Target for the discarded coset mass per sample, before unfolding.
  double sample_tail = 1e-15;

  void validate() const {
    if (!(y > 0) || grid_n < 4 || grid_n % 2 != 0 || !(sample_tail > 0)) {
      throw std::invalid_argument("QuadraturePolicy: need y > 0, even grid_n >= 4, sample_tail > 0");
    }
  }
};

/// Truncated coset sum for P_{m,k,q} at z.
class ClassicalPoincare {
 public:
  ClassicalPoincare(std::int64_t m, int k, std::int64_t q, double y_min, double sample_tail) : m_(m), k_(k), q_(q) {
    ClassicalParams{m, m, k, q}.validate();
    // sum_d |cz+d|^-k <= 2 (cy)^-k + C_k (cy)^(1-k); over c > C with phi(c) <= c
    const double ck = hilbert::detail::line_integral_constant(k);
    auto tail = [&](double C) {
      return 2.0 * std::pow(y_min, -k) * std::pow(C, 2.0 - k) / (k - 2.0) +
             ck * std::pow(y_min, 1.0 - k) * std::pow(C, 3.0 - k) / (k - 3.0);
    };
    c_max_ = q;
    while (tail(static_cast<double>(c_max_)) > sample_tail) c_max_ += q;
    // per c, |cx + d| > R drops at most 2 R^(1-k)/(k-1); spread the budget over the c's
    const double per_c = sample_tail / static_cast<double>(c_max_ / q);
    d_radius_ = std::pow(per_c * (k - 1) / 2.0, 1.0 / (1.0 - k)) + 1.0;
    y_min_ = y_min;
    for (std::int64_t c = q; c <= c_max_; c += q) {
      std::vector<std::int64_t> inv(static_cast<std::size_t>(c), -1);
      for (std::int64_t d = 0; d < c; ++d) {
        const auto g = hilbert::detail::ext_gcd(d, c);
        if (g[0] == 1) inv[static_cast<std::size_t>(d)] = hilbert::detail::floor_mod(g[1], c);
      }
      inverses_.push_back(std::move(inv));
    }
  }

  std::int64_t c_max() const { return c_max_; }

  Complex evaluate(Complex z) const {
    if (z.imag() + 1e-15 < y_min_) throw std::invalid_argument("ClassicalPoincare: Im z below the planned minimum");
    const double two_pi = 2.0 * std::numbers::pi;
    ComplexCompensatedSum<double> acc;
    acc.add(std::exp(Complex(0.0, two_pi * static_cast<double>(m_)) * z));
    std::size_t ci = 0;
    for (std::int64_t c = q_; c <= c_max_; c += q_, ++ci) {
      const auto& inv = inverses_[ci];
      const double cd = static_cast<double>(c);
      const double center = -cd * z.real();
      const auto dlo = static_cast<std::int64_t>(std::ceil(center - d_radius_));
      const auto dhi = static_cast<std::int64_t>(std::floor(center + d_radius_));
      for (std::int64_t d = dlo; d <= dhi; ++d) {
        const std::int64_t a = inv[static_cast<std::size_t>(hilbert::detail::floor_mod(d, c))];
        if (a < 0) continue;
        const Complex w = cd * z + static_cast<double>(d);
        // gz = a/c - 1/(c w), a = d^-1 mod c
        const double phase = static_cast<double>(a) / cd;
        const Complex e = std::exp(Complex(0.0, two_pi * static_cast<double>(m_)) * (phase - 1.0 / (cd * w)));
        acc.add(e * std::pow(w, -k_));
      }
    }
    return acc.value();
  }

 private:
  std::int64_t m_;
  int k_;
  std::int64_t q_;
  std::int64_t c_max_ = 0;
  double d_radius_ = 0;
  double y_min_ = 0;
  std::vector<std::vector<std::int64_t>> inverses_;
};

/// p_{m,k,q}(n) from samples of the coset sum on Im z = y.
inline double classical_poincare_coefficient_by_quadrature(const ClassicalParams& p, const QuadraturePolicy& policy = {}) {
  p.validate();
  policy.validate();
  if (p.n >= policy.grid_n / 2) throw std::domain_error("quadrature: coefficient index beyond the grid's Nyquist limit");
  const ClassicalPoincare series(p.m, p.k, p.q, policy.y, policy.sample_tail);
  const int N = policy.grid_n;
  ComplexCompensatedSum<double> acc;
  for (int u = 0; u < N; ++u) {
    const double x = static_cast<double>(u) / N;
    const double angle = -2.0 * std::numbers::pi * static_cast<double>((p.n * u) % N) / N;
    acc.add(series.evaluate(Complex(x, policy.y)) * Complex(std::cos(angle), std::sin(angle)));
  }
  const Complex c = acc.value() / static_cast<double>(N) * std::exp(2.0 * std::numbers::pi * static_cast<double>(p.n) * policy.y);
  return c.real();
}

/// Rough size of the quadrature error: dropped cosets plus rounding on the
/// largest single term (y^-k at c = 1), both amplified by exp(2 pi n y).
inline double quadrature_error_estimate(const ClassicalParams& p, const QuadraturePolicy& policy = {}) {
  const double rounding = std::numeric_limits<double>::epsilon() * std::max(1.0, std::pow(policy.y, -p.k));
  return (policy.sample_tail + rounding) * std::exp(2.0 * std::numbers::pi * static_cast<double>(p.n) * policy.y);
}

/// tau(1..n_max) from Delta = (E4^3 - E6^2)/1728, exact.
inline std::vector<BigInt> delta_coefficients(int n_max) {
  if (n_max < 0 || n_max > 10000) throw std::invalid_argument("delta_coefficients: need 0 <= n_max <= 10000");
  const auto len = static_cast<std::size_t>(n_max) + 1;
  std::vector<BigInt> e4(len), e6(len);
  e4[0] = 1;
  e6[0] = 1;
  for (std::size_t n = 1; n < len; ++n) {
    BigInt s3 = 0, s5 = 0;
    for (std::size_t d = 1; d <= n; ++d) {
      if (n % d != 0) continue;
      const BigInt bd = d;
      s3 += bd * bd * bd;
      s5 += bd * bd * bd * bd * bd;
    }
    e4[n] = 240 * s3;
    e6[n] = -504 * s5;
  }
  auto mul = [len](const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
    std::vector<BigInt> c(len);
    for (std::size_t i = 0; i < len; ++i) {
      if (a[i] == 0) continue;
      for (std::size_t j = 0; i + j < len; ++j) c[i + j] += a[i] * b[j];
    }
    return c;
  };
  const auto e4sq = mul(e4, e4);
  const auto e4cube = mul(e4sq, e4);
  const auto e6sq = mul(e6, e6);
  std::vector<BigInt> tau;
  for (std::size_t n = 1; n < len; ++n) {
    const BigInt diff = e4cube[n] - e6sq[n];
    if (diff % 1728 != 0) throw std::logic_error("delta_coefficients: non-integral coefficient");
    tau.push_back(diff / 1728);
  }
  return tau;
}

struct RangeScanRow {
  std::int64_t m = 0;
  bool certified = false;
  double value = 0;
  double tail_bound = 0;
};

/// |p_{m,k,1}(m)| > 10 * tail_bound for each m <= m_max.
inline std::vector<RangeScanRow> nonvanishing_range_scan(int k, std::int64_t m_max, std::int64_t c_max) {
  std::vector<RangeScanRow> rows;
  for (std::int64_t m = 1; m <= m_max; ++m) {
    const PeterssonResult r = petersson_coefficient({m, m, k, 1}, c_max);
    rows.push_back({m, std::abs(r.value) > 10.0 * r.tail_bound, r.value, r.tail_bound});
  }
  return rows;
}

/// Largest m such that every m' <= m is certified; 0 if none.
inline std::int64_t largest_certified_prefix(const std::vector<RangeScanRow>& rows) {
  std::int64_t best = 0;
  for (const auto& r : rows) {
    if (!r.certified) break;
    best = r.m;
  }
  return best;
}

}  // namespace hilbert::classical
