#pragma once

// Fourier coefficients of O_F-periodic functions on H^2.
//
// For f(z) = sum_m c(m) exp(2 pi i tr(m z)) with m in the codifferent, the
// coefficient at mu is recovered from samples on the fiber Im z = y:
//
//   c(mu) = exp(2 pi tr(mu y)) * (1/n^2) sum_{u,v} f(x(u,v) + i y) exp(-2 pi i (r u + s v)/n)
//
// with x(u,v) = u/n + (v/n) w in each embedding and (r, s) = (tr mu, tr mu w).
// In lattice coordinates the torus R^2/O_F has volume 1.

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "hilbert/poincare.hpp"
#include "hilbert/qfield.hpp"
#include "hilbert/summation.hpp"

namespace hilbert {

struct SamplingDomain {
  RealQuadraticField field;
  std::array<double, 2> y{1.1, 1.0};
  int grid_n = 32;

  void validate() const {
    if (!(y[0] > 0) || !(y[1] > 0)) throw std::invalid_argument("SamplingDomain: y must be positive");
    if (!(y[0] * y[1] > 1)) throw std::invalid_argument("SamplingDomain: need N(y) = y1*y2 > 1");
    if (grid_n < 4 || grid_n % 2 != 0) throw std::invalid_argument("SamplingDomain: grid_n must be even and >= 4");
  }
};

struct CoefficientEstimate {
  DualIndex mu;
  Complex value;
  double quad_error = 0;
  double trunc_error = 0;

  double total_error() const { return quad_error + trunc_error; }
};

struct Sample {
  Complex value;
  double tail = 0;
};

/// Where the Fourier coefficients of an evaluand may be nonzero.
struct SpectralSupport {
  enum class Kind { TotallyPositiveCone, Finite, Unknown };
  Kind kind = Kind::Unknown;
  std::vector<DualIndex::Frequency> frequencies;  // Kind::Finite only

  static SpectralSupport cone() { return {Kind::TotallyPositiveCone, {}}; }
  static SpectralSupport finite(std::vector<DualIndex::Frequency> f) { return {Kind::Finite, std::move(f)}; }
  static SpectralSupport unknown() { return {}; }
};

template <class E>
concept Evaluand = requires(const E& e, const HPoint& z) {
  { e.sample(z) } -> std::convertible_to<Sample>;
  { e.support() } -> std::convertible_to<SpectralSupport>;
};

/// Truncated Poincare series as an evaluand.
class PoincareEvaluand {
 public:
  PoincareEvaluand(const PoincareSpec& spec, const TruncationPolicy& policy) : series_(spec, policy) {}
  explicit PoincareEvaluand(PoincareSeries series) : series_(std::move(series)) {}

  Sample sample(const HPoint& z) const {
    const EvalResult r = series_.evaluate(z);
    return {r.value, r.tail_estimate};
  }
  SpectralSupport support() const { return SpectralSupport::cone(); }
  const PoincareSeries& series() const { return series_; }

 private:
  PoincareSeries series_;
};

/// Finite sum  sum_i c_i exp(2 pi i tr(nu_i z)).
class FourierSum {
 public:
  explicit FourierSum(RealQuadraticField field) : field_(field) {}

  FourierSum& add(const DualIndex& nu, Complex coefficient) {
    const auto e = nu.elem().embed();
    terms_.push_back({nu, {e[0], e[1]}, coefficient});
    return *this;
  }

  Sample sample(const HPoint& z) const {
    ComplexCompensatedSum<double> acc;
    for (const auto& t : terms_) {
      const Complex phase = t.emb[0] * z[0] + t.emb[1] * z[1];
      acc.add(t.coefficient * std::exp(Complex(0.0, 2.0 * std::numbers::pi) * phase));
    }
    return {acc.value(), 0.0};
  }

  SpectralSupport support() const {
    std::vector<DualIndex::Frequency> f;
    for (const auto& t : terms_) f.push_back(t.nu.freq());
    return SpectralSupport::finite(std::move(f));
  }

 private:
  struct Term {
    DualIndex nu;
    std::array<double, 2> emb;
    Complex coefficient;
  };
  RealQuadraticField field_;
  std::vector<Term> terms_;
};

/// Arbitrary callable; the caller declares its spectral support.
class FunctionEvaluand {
 public:
  FunctionEvaluand(std::function<Complex(const HPoint&)> fn, SpectralSupport support)
      : fn_(std::move(fn)), support_(std::move(support)) {}
  Sample sample(const HPoint& z) const { return {fn_(z), 0.0}; }
  SpectralSupport support() const { return support_; }

 private:
  std::function<Complex(const HPoint&)> fn_;
  SpectralSupport support_;
};

/// exp(-2 pi (min(y) T - tr(mu y))) above this aborts extraction.
inline constexpr double kAliasingThreshold = 1e-16;

namespace detail {

inline bool in_nyquist_box(const DualIndex::Frequency& f, int n) {
  const std::int64_t h = n / 2;
  return f.r >= -h && f.r < h && f.s >= -h && f.s < h;
}

inline double trace_y(const DualIndex& mu, const std::array<double, 2>& y) {
  const auto e = mu.elem().embed();
  return e[0] * y[0] + e[1] * y[1];
}

template <class E>
void check_aliasing(const E& evaluand, const std::vector<DualIndex>& mus, const SamplingDomain& dom) {
  const int n = dom.grid_n;
  for (const auto& mu : mus) {
    if (!in_nyquist_box(mu.freq(), n)) {
      throw std::domain_error("extract_coefficient: frequency (" + std::to_string(mu.freq().r) + "," +
                              std::to_string(mu.freq().s) + ") is outside the Nyquist box of grid " + std::to_string(n));
    }
  }
  const SpectralSupport sup = evaluand.support();
  switch (sup.kind) {
    case SpectralSupport::Kind::Finite:
      for (const auto& f : sup.frequencies) {
        if (!in_nyquist_box(f, n)) {
          throw std::domain_error("extract_coefficient: evaluand frequency (" + std::to_string(f.r) + "," +
                                  std::to_string(f.s) + ") aliases on grid " + std::to_string(n));
        }
      }
      break;
    case SpectralSupport::Kind::TotallyPositiveCone: {
      // m >> 0 outside the box has tr(m) >= T, hence weight <= exp(-2 pi min(y) T)
      const double w = std::max({1.0, std::abs(dom.field.omega_embedding(0)), std::abs(dom.field.omega_embedding(1))});
      const double T = n / (2.0 * w);
      const double ymin = std::min(dom.y[0], dom.y[1]);
      for (const auto& mu : mus) {
        const double rel = std::exp(-2.0 * std::numbers::pi * (ymin * T - trace_y(mu, dom.y)));
        if (rel > kAliasingThreshold) {
          throw std::domain_error("extract_coefficient: grid " + std::to_string(n) +
                                  " under-resolves the spectrum at this y (relative alias weight " + std::to_string(rel) + ")");
        }
      }
      break;
    }
    case SpectralSupport::Kind::Unknown:
      break;
  }
}

struct SampleGrid {
  int n = 0;
  std::vector<Complex> values;  // row-major in (u, v)
  double mean_tail = 0;
};

template <class E>
SampleGrid sample_grid(const E& evaluand, const SamplingDomain& dom) {
  SampleGrid g;
  g.n = dom.grid_n;
  g.values.resize(static_cast<std::size_t>(g.n) * g.n);
  const double w0 = dom.field.omega_embedding(0), w1 = dom.field.omega_embedding(1);
  CompensatedSum<double> tails;
  for (int u = 0; u < g.n; ++u) {
    for (int v = 0; v < g.n; ++v) {
      const double su = static_cast<double>(u) / g.n, sv = static_cast<double>(v) / g.n;
      const HPoint z{Complex(su + sv * w0, dom.y[0]), Complex(su + sv * w1, dom.y[1])};
      const Sample s = evaluand.sample(z);
      g.values[static_cast<std::size_t>(u) * g.n + v] = s.value;
      tails.add(s.tail);
    }
  }
  g.mean_tail = tails.value() / (static_cast<double>(g.n) * g.n);
  return g;
}

// (1/m^2) sum over the sub-grid with stride `stride`, m = n / stride.
inline Complex dft_at(const SampleGrid& g, const DualIndex::Frequency& f, int stride) {
  const int m = g.n / stride;
  std::vector<Complex> twiddle(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double angle = -2.0 * std::numbers::pi * i / m;
    twiddle[static_cast<std::size_t>(i)] = {std::cos(angle), std::sin(angle)};
  }
  const std::int64_t r = floor_mod(f.r, m), s = floor_mod(f.s, m);
  ComplexCompensatedSum<double> acc;
  for (int u = 0; u < m; ++u) {
    for (int v = 0; v < m; ++v) {
      const auto idx = static_cast<std::size_t>((r * u + s * v) % m);
      acc.add(g.values[static_cast<std::size_t>(u * stride) * g.n + v * stride] * twiddle[idx]);
    }
  }
  return acc.value() / (static_cast<double>(m) * m);
}

inline CoefficientEstimate read_coefficient(const SampleGrid& g, const DualIndex& mu, const SamplingDomain& dom) {
  const double unfold = std::exp(2.0 * std::numbers::pi * trace_y(mu, dom.y));
  const Complex full = dft_at(g, mu.freq(), 1) * unfold;
  const Complex half = dft_at(g, mu.freq(), 2) * unfold;
  CoefficientEstimate c;
  c.mu = mu;
  c.value = full;
  c.quad_error = std::abs(full - half);
  c.trunc_error = g.mean_tail * unfold;
  return c;
}

}  // namespace detail

/// All requested coefficients from one shared grid of samples.
template <Evaluand E>
std::vector<CoefficientEstimate> extract_many(const E& evaluand, const std::vector<DualIndex>& mus, const SamplingDomain& domain) {
  domain.validate();
  if (mus.empty()) return {};
  for (const auto& mu : mus) {
    if (!mu.consistent(domain.field)) throw std::invalid_argument("extract_coefficient: inconsistent dual index");
  }
  detail::check_aliasing(evaluand, mus, domain);
  const detail::SampleGrid g = detail::sample_grid(evaluand, domain);
  std::vector<CoefficientEstimate> out;
  out.reserve(mus.size());
  for (const auto& mu : mus) out.push_back(detail::read_coefficient(g, mu, domain));
  return out;
}

template <Evaluand E>
CoefficientEstimate extract_coefficient(const E& evaluand, const DualIndex& mu, const SamplingDomain& domain) {
  return extract_many(evaluand, {mu}, domain).front();
}

/// |c(mu) on fiber y1 - c(mu) on fiber y2|; zero for a holomorphic evaluand up to numerics.
template <Evaluand E>
double y_independence_check(const E& evaluand, const DualIndex& mu, const SamplingDomain& d1, const SamplingDomain& d2) {
  return std::abs(extract_coefficient(evaluand, mu, d1).value - extract_coefficient(evaluand, mu, d2).value);
}

}  // namespace hilbert
