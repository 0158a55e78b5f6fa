#pragma once

// Exact arithmetic in a real quadratic field F = Q(sqrt d).
//
// Elements are stored as rational coordinates over the integral basis [1, w]
// where w = (1 + sqrt d)/2 when d = 1 mod 4 and w = sqrt d otherwise. All
// arithmetic, traces, norms, signs of embeddings and ideal membership are
// exact; floating point only appears in embed().

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hilbert/rational.hpp"

namespace hilbert {

/// Thrown for inputs outside the supported family of fields or operations.
class UnsupportedField : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline bool is_squarefree(std::int64_t n) {
  if (n < 1) return false;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % (p * p) == 0) return false;
  }
  return true;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline std::int64_t floor_mod(std::int64_t a, std::int64_t m) { return a - floor_div(a, m) * m; }

// Returns (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0.
inline std::array<std::int64_t, 3> ext_gcd(std::int64_t a, std::int64_t b) {
  std::int64_t r0 = a, r1 = b, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
  while (r1 != 0) {
    const std::int64_t q = floor_div(r0, r1);
    std::tie(r0, r1) = std::pair{r1, r0 - q * r1};
    std::tie(s0, s1) = std::pair{s1, s0 - q * s1};
    std::tie(t0, t1) = std::pair{t1, t0 - q * t1};
  }
  if (r0 < 0) return {-r0, -s0, -t0};
  return {r0, s0, t0};
}

}  // namespace detail

class FieldElement;

/// Q(sqrt d) with its integral basis [1, w].
class RealQuadraticField {
 public:
  enum class OmegaKind { HalfInteger, Root };  // w = (1+sqrt d)/2  or  w = sqrt d

  /// Norm-Euclidean real quadratic fields supported by the exact GCD.
  static constexpr std::array<std::int64_t, 6> kEuclidean{2, 3, 5, 6, 7, 13};

  static RealQuadraticField make(std::int64_t d, bool strict = true) {
    if (d <= 1) throw std::invalid_argument("make_field: d must exceed 1, got " + std::to_string(d));
    if (!detail::is_squarefree(d)) throw std::invalid_argument("make_field: d=" + std::to_string(d) + " is not squarefree");
    bool euclid = false;
    for (auto e : kEuclidean) euclid = euclid || (e == d);
    if (strict && !euclid) {
      throw UnsupportedField("make_field: d=" + std::to_string(d) + " is outside the supported norm-Euclidean set {2,3,5,6,7,13}");
    }
    RealQuadraticField f;
    f.d_ = d;
    f.kind_ = (d % 4 == 1) ? OmegaKind::HalfInteger : OmegaKind::Root;
    f.euclidean_ = euclid;
    return f;
  }

  std::int64_t d() const { return d_; }
  std::int64_t discriminant() const { return kind_ == OmegaKind::HalfInteger ? d_ : 4 * d_; }
  OmegaKind omega_kind() const { return kind_; }
  bool euclidean() const { return euclidean_; }

  /// w^2 = omega_trace * w - omega_norm.
  std::int64_t omega_trace() const { return kind_ == OmegaKind::HalfInteger ? 1 : 0; }
  std::int64_t omega_norm() const { return kind_ == OmegaKind::HalfInteger ? (1 - d_) / 4 : -d_; }

  /// sigma_j(w); sigma_1 sends sqrt d to the positive root.
  template <class T = double>
  T omega_embedding(int j) const {
    const T r = std::sqrt(static_cast<T>(d_));
    if (kind_ == OmegaKind::HalfInteger) return j == 0 ? (1 + r) / 2 : (1 - r) / 2;
    return j == 0 ? r : -r;
  }

  /// Area of a fundamental parallelogram of O_F embedded in R^2, i.e. sqrt(D).
  double covolume() const { return std::sqrt(static_cast<double>(discriminant())); }

  FieldElement element(Rational a, Rational b = 0) const;
  FieldElement zero() const;
  FieldElement one() const;
  FieldElement omega() const;
  /// sqrt(D) as an integral element.
  FieldElement sqrt_disc() const;
  /// Generator 1/sqrt(D) of the codifferent (trace dual of O_F).
  FieldElement codifferent_gen() const;
  /// Fundamental unit eps > 1 under sigma_1 (table-driven).
  FieldElement fundamental_unit() const;

  friend bool operator==(const RealQuadraticField& a, const RealQuadraticField& b) { return a.d_ == b.d_; }

 private:
  std::int64_t d_ = 5;
  OmegaKind kind_ = OmegaKind::HalfInteger;
  bool euclidean_ = true;
};

/// Element a + b*w of a real quadratic field, rational coordinates.
class FieldElement {
 public:
  FieldElement() = default;
  FieldElement(std::int64_t d, Rational a, Rational b) : d_(d), a_(a), b_(b) {}

  std::int64_t field_d() const { return d_; }
  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }
  bool is_zero() const { return a_.sign() == 0 && b_.sign() == 0; }
  bool is_integral() const { return a_.is_integer() && b_.is_integer(); }

  friend bool operator==(const FieldElement& x, const FieldElement& y) {
    return x.d_ == y.d_ && x.a_ == y.a_ && x.b_ == y.b_;
  }

  friend FieldElement operator+(const FieldElement& x, const FieldElement& y) {
    check_same(x, y);
    return {x.d_, x.a_ + y.a_, x.b_ + y.b_};
  }
  friend FieldElement operator-(const FieldElement& x, const FieldElement& y) {
    check_same(x, y);
    return {x.d_, x.a_ - y.a_, x.b_ - y.b_};
  }
  FieldElement operator-() const { return {d_, -a_, -b_}; }
  friend FieldElement operator*(const FieldElement& x, const FieldElement& y) {
    check_same(x, y);
    const auto [t, n] = omega_poly(x.d_);
    // (a + b w)(c + e w) = ac + (ae + bc) w + be w^2,  w^2 = t w - n
    const Rational be = x.b_ * y.b_;
    return {x.d_, x.a_ * y.a_ - be * n, x.a_ * y.b_ + x.b_ * y.a_ + be * t};
  }
  friend FieldElement operator*(const Rational& s, const FieldElement& x) { return {x.d_, s * x.a_, s * x.b_}; }
  friend FieldElement operator/(const FieldElement& x, const FieldElement& y) {
    if (y.is_zero()) throw std::domain_error("FieldElement: division by zero");
    const Rational ny = y.norm();
    const FieldElement p = x * y.conj();
    return {x.d_, p.a_ / ny, p.b_ / ny};
  }
  FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
  FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
  FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }

  /// Galois conjugate: w -> t - w.
  FieldElement conj() const {
    const auto [t, n] = omega_poly(d_);
    (void)n;
    return {d_, a_ + b_ * t, -b_};
  }
  Rational trace() const { return Rational(2) * a_ + b_ * omega_poly(d_).first; }
  Rational norm() const {
    const auto [t, n] = omega_poly(d_);
    return a_ * a_ + a_ * b_ * t + b_ * b_ * n;
  }

  /// Exact sign of sigma_j(x), j in {0, 1}.
  int embedding_sign(int j) const {
    // x = p + q sqrt d  (embedding 0) or p - q sqrt d (embedding 1)
    Rational p = a_, q = b_;
    if (d_ % 4 == 1) {
      p = a_ + Rational(b_.num(), 2 * b_.den());
      q = Rational(b_.num(), 2 * b_.den());
    }
    if (j == 1) q = -q;
    const int sp = p.sign(), sq = q.sign();
    if (sq == 0) return sp;
    if (sp == 0 || sp == sq) return sq;
    // opposite signs: compare p^2 with q^2 d
    const int c = compare(p * p, q * q * Rational(d_));
    return c > 0 ? sp : (c < 0 ? sq : 0);
  }

  /// Real embeddings (sigma_1(x), sigma_2(x)).
  ///
  /// The larger embedding is computed directly and the smaller as N(x)/larger,
  /// which keeps full relative precision for elements with a tiny conjugate.
  template <class T = double>
  std::array<T, 2> embed() const {
    const T r = std::sqrt(static_cast<T>(d_));
    const T w1 = (d_ % 4 == 1) ? (1 + r) / 2 : r;
    const T w2 = (d_ % 4 == 1) ? (1 - r) / 2 : -r;
    const T a = a_.template to<T>(), b = b_.template to<T>();
    T x1 = a + b * w1, x2 = a + b * w2;
    const T nrm = norm().template to<T>();
    if (nrm != 0) {
      if (std::abs(x1) >= std::abs(x2)) {
        x2 = nrm / x1;
      } else {
        x1 = nrm / x2;
      }
    }
    return {x1, x2};
  }

  std::string str() const { return "(" + a_.str() + ", " + b_.str() + ")"; }
  friend std::ostream& operator<<(std::ostream& os, const FieldElement& x) { return os << x.str(); }

  static std::pair<Rational, Rational> omega_poly(std::int64_t d) {
    if (d % 4 == 1) return {Rational(1), Rational((1 - d) / 4)};
    return {Rational(0), Rational(-d)};
  }

 private:
  static void check_same(const FieldElement& x, const FieldElement& y) {
    if (x.d_ != y.d_) throw std::invalid_argument("FieldElement: mixing elements of different fields");
  }

  std::int64_t d_ = 5;
  Rational a_{0};
  Rational b_{0};
};

inline FieldElement RealQuadraticField::element(Rational a, Rational b) const { return {d_, a, b}; }
inline FieldElement RealQuadraticField::zero() const { return element(0, 0); }
inline FieldElement RealQuadraticField::one() const { return element(1, 0); }
inline FieldElement RealQuadraticField::omega() const { return element(0, 1); }
inline FieldElement RealQuadraticField::sqrt_disc() const {
  // d = 1 mod 4: sqrt d = 2w - 1;  otherwise sqrt(4d) = 2w
  return kind_ == OmegaKind::HalfInteger ? element(-1, 2) : element(0, 2);
}
inline FieldElement RealQuadraticField::codifferent_gen() const { return one() / sqrt_disc(); }
inline FieldElement RealQuadraticField::fundamental_unit() const {
  switch (d_) {
    case 2: return element(1, 1);    // 1 + sqrt 2
    case 3: return element(2, 1);    // 2 + sqrt 3
    case 5: return element(0, 1);    // (1 + sqrt 5)/2
    case 6: return element(5, 2);    // 5 + 2 sqrt 6
    case 7: return element(8, 3);    // 8 + 3 sqrt 7
    case 13: return element(1, 1);   // (3 + sqrt 13)/2
    default: break;
  }
  throw UnsupportedField("fundamental_unit: no table entry for d=" + std::to_string(d_));
}

// Free-function spellings of the basic invariants.
inline Rational trace(const FieldElement& x) { return x.trace(); }
inline Rational norm(const FieldElement& x) { return x.norm(); }
template <class T = double>
std::array<T, 2> embed(const FieldElement& x) {
  return x.embed<T>();
}

/// x >> 0. Exact: a quadratic element is totally positive iff trace and norm are positive.
inline bool is_totally_positive(const FieldElement& x) { return x.trace().sign() > 0 && x.norm().sign() > 0; }

inline bool is_unit(const FieldElement& x) {
  if (!x.is_integral()) return false;
  const Rational n = x.norm();
  return n == Rational(1) || n == Rational(-1);
}

/// Dual-lattice index nu = beta / sqrt(D), beta integral.
///
/// freq = (tr(nu*1), tr(nu*w)) are the integer frequencies the Fourier layer
/// works with.
class DualIndex {
 public:
  struct Frequency {
    std::int64_t r = 0;
    std::int64_t s = 0;
    friend bool operator==(const Frequency&, const Frequency&) = default;
  };

  DualIndex() = default;

  static DualIndex from_beta(const RealQuadraticField& f, const FieldElement& beta) {
    if (!beta.is_integral()) throw std::invalid_argument("DualIndex: beta must be integral, got " + beta.str());
    DualIndex v;
    v.beta_ = beta;
    v.nu_ = beta / f.sqrt_disc();
    v.freq_ = frequencies_of(f, v.nu_);
    return v;
  }

  static DualIndex from_element(const RealQuadraticField& f, const FieldElement& nu) {
    const FieldElement beta = nu * f.sqrt_disc();
    if (!beta.is_integral()) throw std::invalid_argument("DualIndex: " + nu.str() + " is not in the codifferent");
    return from_beta(f, beta);
  }

  /// The unique codifferent element with tr(nu) = r and tr(nu w) = s.
  static DualIndex from_frequencies(const RealQuadraticField& f, std::int64_t r, std::int64_t s) {
    // nu = x + y w:  tr(nu)   = 2x + t y
    //                tr(nu w) = t x + (t^2 - 2n) y
    const Rational t(f.omega_trace()), n(f.omega_norm());
    const Rational a11(2), a12 = t, a21 = t, a22 = t * t - Rational(2) * n;
    const Rational det = a11 * a22 - a12 * a21;
    const Rational x = (Rational(r) * a22 - a12 * Rational(s)) / det;
    const Rational y = (a11 * Rational(s) - a21 * Rational(r)) / det;
    return from_element(f, f.element(x, y));
  }

  const FieldElement& elem() const { return nu_; }
  const FieldElement& beta() const { return beta_; }
  Frequency freq() const { return freq_; }

  /// Recomputes the frequency pair and checks it against the stored one.
  bool consistent(const RealQuadraticField& f) const { return frequencies_of(f, nu_) == freq_; }

  friend bool operator==(const DualIndex& a, const DualIndex& b) { return a.nu_ == b.nu_; }

  static Frequency frequencies_of(const RealQuadraticField& f, const FieldElement& nu) {
    const Rational r = nu.trace();
    const Rational s = (nu * f.omega()).trace();
    if (!r.is_integer() || !s.is_integer()) throw std::invalid_argument("DualIndex: non-integral trace pairing for " + nu.str());
    return {r.num(), s.num()};
  }

 private:
  FieldElement nu_;
  FieldElement beta_;
  Frequency freq_;
};

/// Integral ideal with Z-basis {m00 + m01 w, m11 w} (upper-triangular Hermite normal form).
///
/// Normalization: m00 >= 1, m11 >= 1, 0 <= m01 < m11.
class IdealHNF {
 public:
  IdealHNF() = default;

  /// HNF of the Z-module spanned by integer coordinate vectors (x0, x1).
  static IdealHNF from_lattice(const RealQuadraticField& f, const std::vector<std::array<std::int64_t, 2>>& vecs) {
    std::array<std::int64_t, 2> pivot{0, 0};
    std::int64_t g2 = 0;
    for (const auto& v : vecs) {
      if (v[0] == 0) {
        g2 = std::gcd(g2, v[1]);
        continue;
      }
      if (pivot[0] == 0) {
        g2 = std::gcd(g2, pivot[1]);
        pivot = v;
        continue;
      }
      const auto [g, s, t] = detail::ext_gcd(pivot[0], v[0]);
      const std::int64_t p0 = pivot[0] / g, v0 = v[0] / g;
      const std::array<std::int64_t, 2> np{g, s * pivot[1] + t * v[1]};
      // v0*pivot - p0*v has zero first coordinate
      g2 = std::gcd(g2, v0 * pivot[1] - p0 * v[1]);
      pivot = np;
    }
    if (pivot[0] == 0 || g2 == 0) throw std::invalid_argument("IdealHNF: lattice is not of full rank");
    if (pivot[0] < 0) pivot = {-pivot[0], -pivot[1]};
    IdealHNF I;
    I.d_ = f.d();
    I.m00_ = pivot[0];
    I.m11_ = std::abs(g2);
    I.m01_ = detail::floor_mod(pivot[1], I.m11_);
    if (!I.closed_under_omega(f)) throw std::invalid_argument("IdealHNF: lattice is not an ideal");
    return I;
  }

  /// Principal ideal c O_F.
  static IdealHNF from_gen(const RealQuadraticField& f, const FieldElement& c) {
    if (c.is_zero()) throw std::invalid_argument("ideal_from_gen: zero generator");
    if (!c.is_integral()) throw std::invalid_argument("ideal_from_gen: generator must be integral");
    const FieldElement cw = c * f.omega();
    return from_lattice(f, {coords(c), coords(cw)});
  }

  /// Ideal generated by several integral elements.
  static IdealHNF from_gens(const RealQuadraticField& f, const std::vector<FieldElement>& gens) {
    std::vector<std::array<std::int64_t, 2>> vecs;
    for (const auto& g : gens) {
      if (!g.is_integral()) throw std::invalid_argument("IdealHNF: generators must be integral");
      vecs.push_back(coords(g));
      vecs.push_back(coords(g * f.omega()));
    }
    return from_lattice(f, vecs);
  }

  /// Ideal from explicit HNF entries; validated.
  static IdealHNF from_hnf(const RealQuadraticField& f, std::int64_t m00, std::int64_t m01, std::int64_t m11) {
    if (m00 < 1 || m11 < 1) throw std::invalid_argument("IdealHNF: diagonal entries must be positive");
    IdealHNF I = from_lattice(f, {{m00, m01}, {0, m11}});
    if (I.m00_ != m00 || I.m11_ != m11 || I.m01_ != m01) throw std::invalid_argument("IdealHNF: entries are not in normal form");
    return I;
  }

  static IdealHNF unit_ideal(const RealQuadraticField& f) { return from_gen(f, f.one()); }

  std::int64_t m00() const { return m00_; }
  std::int64_t m01() const { return m01_; }
  std::int64_t m11() const { return m11_; }
  /// [O_F : I]
  std::int64_t norm() const { return m00_ * m11_; }

  bool contains(const FieldElement& x) const {
    if (!x.is_integral()) return false;
    const std::int64_t x0 = x.a().num(), x1 = x.b().num();
    if (x0 % m00_ != 0) return false;
    const std::int64_t t = x0 / m00_;
    return detail::floor_mod(x1 - t * m01_, m11_) == 0;
  }

  /// Index of the residue class of an integral element in O_F / I, in [0, norm()).
  std::int64_t residue_index(std::int64_t e0, std::int64_t e1) const {
    const std::int64_t t = detail::floor_div(e0, m00_);
    const std::int64_t r0 = e0 - t * m00_;
    const std::int64_t r1 = detail::floor_mod(e1 - t * m01_, m11_);
    return r0 * m11_ + r1;
  }
  /// Canonical representative of residue class `index`.
  std::array<std::int64_t, 2> residue_rep(std::int64_t index) const { return {index / m11_, index % m11_}; }

  friend bool operator==(const IdealHNF& a, const IdealHNF& b) {
    return a.d_ == b.d_ && a.m00_ == b.m00_ && a.m01_ == b.m01_ && a.m11_ == b.m11_;
  }

  std::string str() const {
    return "[" + std::to_string(m00_) + ", " + std::to_string(m01_) + "; 0, " + std::to_string(m11_) + "]";
  }

  static std::array<std::int64_t, 2> coords(const FieldElement& x) { return {x.a().num(), x.b().num()}; }

 private:
  bool closed_under_omega(const RealQuadraticField& f) const {
    const FieldElement v1 = f.element(m00_, m01_) * f.omega();
    const FieldElement v2 = f.element(0, m11_) * f.omega();
    return contains(v1) && contains(v2);
  }

  std::int64_t d_ = 5;
  std::int64_t m00_ = 1;
  std::int64_t m01_ = 0;
  std::int64_t m11_ = 1;
};

inline IdealHNF ideal_from_gen(const RealQuadraticField& f, const FieldElement& c) { return IdealHNF::from_gen(f, c); }
inline bool ideal_contains(const IdealHNF& I, const FieldElement& x) { return I.contains(x); }
inline std::int64_t ideal_norm(const IdealHNF& I) { return I.norm(); }

/// gamma O_F + delta O_F == O_F, decided by the HNF of span{gamma, gamma w, delta, delta w}.
inline bool is_unimodular_pair(const RealQuadraticField& f, const FieldElement& gamma, const FieldElement& delta) {
  if (gamma.is_zero() && delta.is_zero()) throw std::invalid_argument("is_unimodular_pair: (0, 0) is not a bottom row");
  if (!gamma.is_integral() || !delta.is_integral()) return false;
  const IdealHNF I = IdealHNF::from_gens(f, {gamma, delta});
  return I.norm() == 1;
}

namespace detail {

// Integral q with |N(x/y - q)| < 1, searched around the rounded quotient.
inline FieldElement euclidean_quotient(const RealQuadraticField& f, const FieldElement& x, const FieldElement& y) {
  const FieldElement ratio = x / y;
  // nearest lattice point first; enough for most quotients in every supported field
  const FieldElement rounded = f.element((ratio.a() + Rational(1, 2)).floor(), (ratio.b() + Rational(1, 2)).floor());
  Rational rn = (ratio - rounded).norm();
  if (rn.sign() < 0) rn = -rn;
  if (rn < Rational(1)) return rounded;
  const std::int64_t s0 = ratio.a().floor(), t0 = ratio.b().floor();
  for (std::int64_t window = 2; window <= 8; window += 2) {
    std::optional<FieldElement> best;
    Rational best_norm(0);
    for (std::int64_t dt = -window + 1; dt <= window; ++dt) {
      for (std::int64_t ds = -window + 1; ds <= window; ++ds) {
        const FieldElement q = f.element(s0 + ds, t0 + dt);
        Rational n = (ratio - q).norm();
        if (n.sign() < 0) n = -n;
        if (!best || n < best_norm) {
          best = q;
          best_norm = n;
        }
      }
    }
    if (best && best_norm < Rational(1)) return *best;
  }
  throw UnsupportedField("complete_pair: no Euclidean quotient found; d=" + std::to_string(f.d()) + " is not norm-Euclidean");
}

}  // namespace detail

/// Integral (a, b) with a*delta - b*gamma = 1, from the norm-Euclidean extended GCD.
inline std::pair<FieldElement, FieldElement> complete_pair(const RealQuadraticField& f, const FieldElement& gamma,
                                                           const FieldElement& delta) {
  if (!f.euclidean()) throw UnsupportedField("complete_pair: field is not norm-Euclidean");
  if (!is_unimodular_pair(f, gamma, delta)) {
    throw std::invalid_argument("complete_pair: (" + gamma.str() + ", " + delta.str() + ") is not unimodular");
  }
  FieldElement r0 = delta, r1 = gamma;
  FieldElement s0 = f.one(), s1 = f.zero();
  FieldElement t0 = f.zero(), t1 = f.one();
  while (!r1.is_zero()) {
    const FieldElement q = detail::euclidean_quotient(f, r0, r1);
    std::tie(r0, r1) = std::pair{r1, r0 - q * r1};
    std::tie(s0, s1) = std::pair{s1, s0 - q * s1};
    std::tie(t0, t1) = std::pair{t1, t0 - q * t1};
  }
  // r0 = s0*delta + t0*gamma is a unit
  const FieldElement ginv = f.one() / r0;
  return {s0 * ginv, -(t0 * ginv)};
}

/// Totally positive codifferent elements with trace <= max_trace, ordered by (trace, s).
inline std::vector<DualIndex> totally_positive_dual_indices(const RealQuadraticField& f, std::int64_t max_trace) {
  std::vector<DualIndex> out;
  const double w1 = f.omega_embedding(0), w2 = f.omega_embedding(1);
  for (std::int64_t r = 1; r <= max_trace; ++r) {
    // s = tr(nu w) = nu1 w1 + nu2 w2 with nu1 + nu2 = r, nu_j > 0
    const double lo = std::min(r * w1, r * w2), hi = std::max(r * w1, r * w2);
    for (auto s = static_cast<std::int64_t>(std::floor(lo)) - 1; s <= static_cast<std::int64_t>(std::ceil(hi)) + 1; ++s) {
      const DualIndex nu = DualIndex::from_frequencies(f, r, s);
      if (is_totally_positive(nu.elem())) out.push_back(nu);
    }
  }
  return out;
}

}  // namespace hilbert
