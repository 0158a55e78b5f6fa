#pragma once

// Hilbert Poincare series over a real quadratic field.
//
//   P(z) = sum over M in G_inf \ G_0(I) of  mu(M,z)^(-k) * exp(2 pi i tr(nu * Mz))
//
// Cosets are parameterized by their bottom rows (gamma, delta): gamma in I,
// gamma O_F + delta O_F = O_F, taken up to sign (and, under UnitExtended, up to
// units). Every term is computed from the bottom row and the residue class of
// delta modulo gamma:
//
//   Mz = a/gamma - 1/(gamma (gamma z + delta)),   a = delta^(-1) mod gamma,
//
// so exp(2 pi i tr(nu a/gamma)) is an exact rational phase tabulated once per gamma.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "hilbert/qfield.hpp"
#include "hilbert/summation.hpp"

namespace hilbert {

using Complex = std::complex<double>;
/// Point (z_1, z_2) of H^2.
using HPoint = std::array<Complex, 2>;

struct Weight {
  int k1 = 4;
  int k2 = 4;

  bool parallel() const { return k1 == k2; }
  int min() const { return std::min(k1, k2); }
  int at(int j) const { return j == 0 ? k1 : k2; }

  void validate() const {
    if (k1 <= 2 || k2 <= 2) {
      throw std::invalid_argument("Weight: every component must exceed 2, got (" + std::to_string(k1) + "," + std::to_string(k2) + ")");
    }
    if ((k1 + k2) % 2 != 0) throw std::invalid_argument("Weight: k1 + k2 must be even");
  }
  friend bool operator==(const Weight&, const Weight&) = default;
};

/// Which subgroup the series is folded over.
///
/// TranslationsOnly: {+-1} x translations. Unit rows (0, eps^m) are separate
///   cosets and all unit multiples of a bottom row are summed; this is a
///   modular form.
/// UnitExtended: one canonical bottom row per unit orbit. The summand is not
///   invariant under diag(eps, eps^-1), so the result is periodic and
///   holomorphic but not modular.
enum class GammaInfConvention { TranslationsOnly, UnitExtended };

inline std::string to_string(GammaInfConvention c) {
  return c == GammaInfConvention::TranslationsOnly ? "translations" : "unit-extended";
}

struct PoincareSpec {
  RealQuadraticField field;
  Weight weight;
  DualIndex nu;
  IdealHNF level;
  GammaInfConvention convention = GammaInfConvention::TranslationsOnly;
  /// Fold (gamma, delta) ~ (-gamma, -delta). Unfolding doubles the series.
  bool fold_minus_identity = true;

  void validate() const {
    weight.validate();
    if (!nu.consistent(field)) throw std::invalid_argument("PoincareSpec: nu frequencies are inconsistent");
    if (!is_totally_positive(nu.elem())) throw std::invalid_argument("PoincareSpec: nu must be totally positive, got " + nu.elem().str());
    if (convention == GammaInfConvention::UnitExtended && field.fundamental_unit().norm() == Rational(-1)) {
      if (!weight.parallel() || weight.k1 % 2 != 0) {
        throw std::invalid_argument("PoincareSpec: unit-extended convention with a norm -1 unit needs parallel even weight");
      }
    }
  }
};

struct CosetRep {
  FieldElement gamma;
  FieldElement delta;
  FieldElement a;
  FieldElement b;
};

struct TruncationPolicy {
  /// Bound on max_j |gamma_j|.
  double gamma_height_max = 12.0;
  /// Terms with modulus below this are dropped (and accounted in the tail).
  double term_cutoff = 1e-12;
  /// Hard limit on examined (gamma, delta) candidates per evaluation.
  std::size_t max_terms = 50'000'000;
  /// Additive slack on the delta box radii, in embedding units.
  double delta_box_margin = 1e-9;
  /// Largest |m| for the unit rows (0, eps^m) under TranslationsOnly.
  int unit_cap = 16;

  void validate() const {
    if (!(gamma_height_max > 0) || !(term_cutoff > 0) || max_terms == 0 || !(delta_box_margin > 0) || unit_cap < 0) {
      throw std::invalid_argument("TruncationPolicy: all fields must be positive");
    }
  }
};

struct EvalResult {
  Complex value;
  double tail_estimate = 0;
  std::size_t terms_used = 0;
  double largest_dropped = 0;
};

/// Raised when an enumeration exceeds TruncationPolicy::max_terms.
class TruncationFailure : public std::runtime_error {
 public:
  TruncationFailure(const std::string& what, std::size_t partial) : std::runtime_error(what), partial_count(partial) {}
  std::size_t partial_count;
};

/// Element of SL_2(O_F).
struct Matrix2 {
  FieldElement a, b, c, d;
  FieldElement det() const { return a * d - b * c; }
};

inline constexpr double kMinImaginaryPart = 1e-3;

namespace detail {

inline void check_point(const HPoint& z) {
  for (const auto& zj : z) {
    if (!(zj.imag() >= kMinImaginaryPart) || !std::isfinite(zj.real())) {
      throw std::invalid_argument("Poincare: point must satisfy Im(z_j) >= 1e-3");
    }
  }
}

inline Complex ipow(Complex base, int e) {
  Complex result{1.0, 0.0};
  while (e > 0) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

// max over r >= r_min of -k log r - a / r^2 (the log of r^-k exp(-a/r^2)).
inline double log_peak(double r_min, int k, double a) {
  const double r_star = std::sqrt(2.0 * a / k);
  const double r = std::max(r_min, r_star);
  return -k * std::log(r) - a / (r * r);
}

// integral over t in R of (t^2 + r^2)^(-k/2) = C_k r^(1-k)
inline double line_integral_constant(int k) {
  return std::sqrt(std::numbers::pi) * std::exp(std::lgamma(0.5 * (k - 1)) - std::lgamma(0.5 * k));
}

}  // namespace detail

/// prod_j (gamma_j z_j + delta_j)^(k_j) for a determinant-one coset representative.
inline Complex automorphy_factor(const CosetRep& M, const HPoint& z, const Weight& k) {
  const auto g = M.gamma.embed(), d = M.delta.embed();
  return detail::ipow(g[0] * z[0] + d[0], k.k1) * detail::ipow(g[1] * z[1] + d[1], k.k2);
}

/// One summand mu(M,z)^(-k) exp(2 pi i tr(nu Mz)), computed from the full matrix.
inline Complex term(const CosetRep& M, const HPoint& z, const PoincareSpec& spec) {
  const auto a = M.a.embed(), b = M.b.embed(), g = M.gamma.embed(), d = M.delta.embed();
  const auto nu = spec.nu.elem().embed();
  Complex phase{0.0, 0.0};
  for (int j = 0; j < 2; ++j) {
    const Complex mz = (a[j] * z[j] + b[j]) / (g[j] * z[j] + d[j]);
    phase += nu[j] * mz;
  }
  return std::exp(Complex(0.0, 2.0 * std::numbers::pi) * phase) / automorphy_factor(M, z, spec.weight);
}

/// Truncated Poincare series with precomputed coset data.
///
/// The constructor enumerates the nonzero gamma in the level ideal inside the
/// height box and tabulates, for each, which residues of delta mod gamma give
/// unimodular rows together with the exact phase exp(2 pi i tr(nu a/gamma)).
/// Evaluation at a point only walks the delta boxes.
class PoincareSeries {
 public:
  PoincareSeries(PoincareSpec spec, TruncationPolicy policy) : spec_(std::move(spec)), policy_(policy) {
    spec_.validate();
    policy_.validate();
    const auto nu = spec_.nu.elem().embed();
    nu_ = {nu[0], nu[1]};
    omega_ = {spec_.field.omega_embedding(0), spec_.field.omega_embedding(1)};
    build_unit_rows();
    build_gamma_classes();
  }

  const PoincareSpec& spec() const { return spec_; }
  const TruncationPolicy& policy() const { return policy_; }
  std::size_t gamma_count() const { return gammas_.size(); }

  EvalResult evaluate(const HPoint& z) const {
    Accumulator acc;
    walk(z, acc);
    EvalResult r;
    r.value = acc.sum.value();
    r.terms_used = acc.kept;
    r.largest_dropped = acc.largest_dropped;
    r.tail_estimate = acc.tail();
    return r;
  }

  /// Heuristic estimate of the mass the truncation discards at z.
  double tail_bound(const HPoint& z) const { return evaluate(z).tail_estimate; }

  /// Coset representatives whose term at z survives the truncation, in summation order.
  std::vector<CosetRep> enumerate_cosets(const HPoint& z) const {
    Collector col{this, {}};
    walk(z, col);
    return std::move(col.reps);
  }

 private:
  struct Residue {
    bool unimodular = false;
    Complex twiddle{1.0, 0.0};
    std::int64_t a0 = 0, a1 = 0;  // canonical a = delta^-1 mod gamma
  };
  struct GammaClass {
    FieldElement gamma;
    std::array<double, 2> emb{};
    double height = 0;
    IdealHNF ideal;
    std::vector<Residue> residues;
  };
  struct UnitRow {
    int power = 0;
    FieldElement unit;  // exact only for small |power|; embeddings always valid
    bool exact = false;
    std::array<double, 2> emb{};
  };

  // What walk() reports for each examined candidate.
  struct Candidate {
    int gamma_index = -1;  // -1: a (0, u) unit row
    int unit_index = -1;
    std::int64_t e0 = 0, e1 = 0;  // delta coordinates
    const Residue* residue = nullptr;
    double log_modulus = 0;
  };

  struct Accumulator {
    ComplexCompensatedSum<double> sum;
    std::size_t kept = 0;
    double largest_dropped = 0;
    double dropped_mass = 0;
    double exterior_mass = 0;
    double shell_inner = 0, shell_outer = 0;
    double unit_remainder = 0;

    double tail() const {
      double gamma_tail = 0;
      if (shell_outer > 0) {
        const double rho = shell_inner > 0 ? std::min(shell_outer / shell_inner, 0.5) : 0.5;
        gamma_tail = shell_outer * rho / (1 - rho);
      }
      return gamma_tail + dropped_mass + exterior_mass + unit_remainder;
    }
  };

  struct Collector {
    const PoincareSeries* self;
    std::vector<CosetRep> reps;
  };

  void build_unit_rows() {
    const RealQuadraticField& f = spec_.field;
    const bool translations = spec_.convention == GammaInfConvention::TranslationsOnly;
    const int cap = translations ? policy_.unit_cap : 0;
    const auto eps = f.fundamental_unit().embed();
    std::vector<int> powers{0};
    for (int m = 1; m <= cap; ++m) {
      powers.push_back(m);
      powers.push_back(-m);
    }
    for (int m : powers) {
      UnitRow row;
      row.power = m;
      row.emb = {1.0, 1.0};
      for (int j = 0; j < 2; ++j) {
        const double base = m >= 0 ? eps[j] : 1.0 / eps[j];
        for (int i = 0; i < std::abs(m); ++i) row.emb[j] *= base;
      }
      if (std::abs(m) <= 6) {
        FieldElement u = f.one();
        const FieldElement step = m >= 0 ? f.fundamental_unit() : f.one() / f.fundamental_unit();
        for (int i = 0; i < std::abs(m); ++i) u = u * step;
        row.unit = u;
        row.exact = true;
      }
      units_.push_back(row);
      if (!spec_.fold_minus_identity) {
        UnitRow neg = row;
        neg.emb = {-row.emb[0], -row.emb[1]};
        if (row.exact) neg.unit = -row.unit;
        neg.power = m;
        units_.push_back(neg);
      }
    }
    if (translations) {
      const double b0 = f.fundamental_unit().embed()[0];
      unit_edge_ = {std::pow(b0, cap + 1), std::pow(b0, -(cap + 1))};
    }
  }

  bool canonical_in_unit_orbit(const FieldElement& g) const {
    // |g_1/g_2| in [1/eps_1, eps_1) and g_1 > 0
    const FieldElement eps = spec_.field.fundamental_unit();
    const FieldElement gb = g.conj();
    const FieldElement e2 = eps * eps;
    if ((e2 * gb * gb - g * g).embedding_sign(0) <= 0) return false;
    if ((e2 * g * g - gb * gb).embedding_sign(0) < 0) return false;
    return g.embedding_sign(0) > 0;
  }

  void build_gamma_classes() {
    const RealQuadraticField& f = spec_.field;
    const double H = policy_.gamma_height_max;
    const double dw = omega_[0] - omega_[1];
    const auto bmax = static_cast<std::int64_t>(std::floor(2.0 * H / dw));
    const bool translations = spec_.convention == GammaInfConvention::TranslationsOnly;
    for (std::int64_t b = -bmax; b <= bmax; ++b) {
      const double lo = std::max(-H - b * omega_[0], -H - b * omega_[1]);
      const double hi = std::min(H - b * omega_[0], H - b * omega_[1]);
      for (auto a = static_cast<std::int64_t>(std::ceil(lo)); a <= static_cast<std::int64_t>(std::floor(hi)); ++a) {
        if (a == 0 && b == 0) continue;
        const FieldElement g = f.element(a, b);
        if (translations) {
          if (spec_.fold_minus_identity && !(a > 0 || (a == 0 && b > 0))) continue;
        } else if (!canonical_in_unit_orbit(g)) {
          continue;
        }
        if (!spec_.level.contains(g)) continue;
        const auto e = g.embed();
        const double h = std::max(std::abs(e[0]), std::abs(e[1]));
        if (h > H) continue;
        GammaClass gc;
        gc.gamma = g;
        gc.emb = e;
        gc.height = h;
        gammas_.push_back(std::move(gc));
      }
    }
    std::sort(gammas_.begin(), gammas_.end(), [](const GammaClass& x, const GammaClass& y) {
      const auto nx = x.gamma.norm(), ny = y.gamma.norm();
      const auto ax = nx.sign() < 0 ? -nx : nx, ay = ny.sign() < 0 ? -ny : ny;
      if (ax != ay) return ax < ay;
      if (x.gamma.b() != y.gamma.b()) return x.gamma.b() < y.gamma.b();
      return x.gamma.a() < y.gamma.a();
    });
    for (auto& gc : gammas_) tabulate_residues(gc);
  }

  void tabulate_residues(GammaClass& gc) const {
    const RealQuadraticField& f = spec_.field;
    gc.ideal = IdealHNF::from_gen(f, gc.gamma);
    const std::int64_t n = gc.ideal.norm();
    gc.residues.assign(static_cast<std::size_t>(n), Residue{});
    std::vector<bool> done(static_cast<std::size_t>(n), false);
    for (std::int64_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      done[i] = true;
      const auto rep = gc.ideal.residue_rep(i);
      const FieldElement delta = f.element(rep[0], rep[1]);
      if (delta.is_zero() && n > 1) continue;
      if (!is_unimodular_pair(f, gc.gamma, delta)) continue;
      const auto ab = complete_pair(f, gc.gamma, delta);
      const std::int64_t ai = gc.ideal.residue_index(ab.first.a().num(), ab.first.b().num());
      set_residue(gc, i, ai);
      // inverse pairs: a^-1 = delta mod gamma
      if (!done[ai]) {
        done[ai] = true;
        set_residue(gc, ai, i);
      }
    }
  }

  void set_residue(GammaClass& gc, std::int64_t index, std::int64_t inverse_index) const {
    const RealQuadraticField& f = spec_.field;
    const auto arep = gc.ideal.residue_rep(inverse_index);
    Residue& r = gc.residues[static_cast<std::size_t>(index)];
    r.unimodular = true;
    r.a0 = arep[0];
    r.a1 = arep[1];
    const Rational phase = (spec_.nu.elem() * f.element(arep[0], arep[1]) / gc.gamma).trace().frac();
    const double angle = 2.0 * std::numbers::pi * phase.to<double>();
    r.twiddle = {std::cos(angle), std::sin(angle)};
  }

  template <class Sink>
  void walk(const HPoint& z, Sink& sink) const {
    detail::check_point(z);
    const double log_cut = std::log(policy_.term_cutoff);
    const double two_pi = 2.0 * std::numbers::pi;
    const Weight& k = spec_.weight;
    const std::array<double, 2> x{z[0].real(), z[1].real()}, y{z[0].imag(), z[1].imag()};
    const std::array<double, 2> decay{two_pi * nu_[0] * y[0], two_pi * nu_[1] * y[1]};
    std::size_t examined = 0;

    // gamma = 0: rows (0, u), M = diag(u^-1, u), Mz = u^-2 z
    for (std::size_t ui = 0; ui < units_.size(); ++ui) {
      const UnitRow& u = units_[ui];
      double logm = 0;
      for (int j = 0; j < 2; ++j) logm += -k.at(j) * std::log(std::abs(u.emb[j])) - decay[j] / (u.emb[j] * u.emb[j]);
      Candidate c;
      c.unit_index = static_cast<int>(ui);
      c.log_modulus = logm;
      emit(sink, c, z, log_cut);
    }
    if constexpr (std::is_same_v<Sink, Accumulator>) {
      if (spec_.convention == GammaInfConvention::TranslationsOnly) {
        // first rows beyond the cap, both directions
        for (double e1 : unit_edge_) {
          const double e2 = 1.0 / e1;
          const double lm = -k.k1 * std::log(e1) - k.k2 * std::log(e2) - decay[0] / (e1 * e1) - decay[1] / (e2 * e2);
          sink.unit_remainder += 2.0 * std::exp(lm);
        }
      }
    }

    const double margin = policy_.delta_box_margin;
    const double covol = spec_.field.covolume();
    const double H = policy_.gamma_height_max;
    for (std::size_t gi = 0; gi < gammas_.size(); ++gi) {
      const GammaClass& gc = gammas_[gi];
      const std::array<double, 2> rmin{std::abs(gc.emb[0]) * y[0], std::abs(gc.emb[1]) * y[1]};
      const std::array<double, 2> lpeak{detail::log_peak(rmin[0], k.k1, decay[0]), detail::log_peak(rmin[1], k.k2, decay[1])};
      double gamma_mass = 0;
      if (lpeak[0] + lpeak[1] < log_cut) {
        // every term of this gamma is below the cutoff
        const double bound = std::exp(lpeak[0] + lpeak[1]);
        if constexpr (std::is_same_v<Sink, Accumulator>) {
          const double s0 = std::max(rmin[0], std::sqrt(2.0 * decay[0] / k.k1));
          const double s1 = std::max(rmin[1], std::sqrt(2.0 * decay[1] / k.k2));
          const double mass = bound * (1.0 + 4.0 * s0 * s1 / covol);
          sink.largest_dropped = std::max(sink.largest_dropped, bound);
          sink.dropped_mass += mass;
          gamma_mass = mass;
          add_shell(sink, gc.height, H, gamma_mass);
        }
        continue;
      }
      // |delta_j + gamma_j x_j| <= R_j contains every term above the cutoff
      const std::array<double, 2> R{std::exp((lpeak[1] - log_cut) / k.k1) + margin,
                                    std::exp((lpeak[0] - log_cut) / k.k2) + margin};
      const std::array<double, 2> c{-gc.emb[0] * x[0], -gc.emb[1] * x[1]};
      const double dw = omega_[0] - omega_[1];
      const auto e1lo = static_cast<std::int64_t>(std::ceil((c[0] - R[0] - c[1] - R[1]) / dw));
      const auto e1hi = static_cast<std::int64_t>(std::floor((c[0] + R[0] - c[1] + R[1]) / dw));
      for (std::int64_t e1 = e1lo; e1 <= e1hi; ++e1) {
        const double lo = std::max(c[0] - R[0] - e1 * omega_[0], c[1] - R[1] - e1 * omega_[1]);
        const double hi = std::min(c[0] + R[0] - e1 * omega_[0], c[1] + R[1] - e1 * omega_[1]);
        for (auto e0 = static_cast<std::int64_t>(std::ceil(lo)); e0 <= static_cast<std::int64_t>(std::floor(hi)); ++e0) {
          if (++examined > policy_.max_terms) {
            throw TruncationFailure("Poincare: more than max_terms candidates examined", examined - 1);
          }
          const Residue& res = gc.residues[static_cast<std::size_t>(gc.ideal.residue_index(e0, e1))];
          if (!res.unimodular) continue;
          double logm = 0;
          for (int j = 0; j < 2; ++j) {
            const double re = gc.emb[j] * x[j] + (static_cast<double>(e0) + static_cast<double>(e1) * omega_[j]);
            const double im = gc.emb[j] * y[j];
            const double w2 = re * re + im * im;
            logm += -0.5 * k.at(j) * std::log(w2) - decay[j] / w2;
          }
          Candidate cand;
          cand.gamma_index = static_cast<int>(gi);
          cand.e0 = e0;
          cand.e1 = e1;
          cand.residue = &res;
          cand.log_modulus = logm;
          gamma_mass += emit(sink, cand, z, log_cut);
        }
      }
      if constexpr (std::is_same_v<Sink, Accumulator>) {
        // lattice points beyond the box: boundary value times a power-law profile
        const double ext = policy_.term_cutoff *
                           (2.0 * R[0] / (k.k1 - 1) * 2.0 * R[1] + 2.0 * R[1] / (k.k2 - 1) * 2.0 * R[0]) / covol;
        sink.exterior_mass += ext;
        gamma_mass += ext;
        add_shell(sink, gc.height, H, gamma_mass);
      }
    }
  }

  static void add_shell(Accumulator& acc, double h, double H, double mass) {
    if (h > 0.5 * H) {
      acc.shell_outer += mass;
    } else if (h > 0.25 * H) {
      acc.shell_inner += mass;
    }
  }

  // Returns the modulus contributed to the gamma's mass.
  double emit(Accumulator& acc, const Candidate& c, const HPoint& z, double log_cut) const {
    const double modulus = std::exp(c.log_modulus);
    if (c.log_modulus < log_cut) {
      acc.largest_dropped = std::max(acc.largest_dropped, modulus);
      acc.dropped_mass += modulus;
      return modulus;
    }
    acc.sum.add(candidate_value(c, z));
    ++acc.kept;
    return modulus;
  }

  double emit(Collector& col, const Candidate& c, const HPoint&, double log_cut) const {
    if (c.log_modulus < log_cut) return 0;
    col.reps.push_back(to_coset(c));
    return 0;
  }

  Complex candidate_value(const Candidate& c, const HPoint& z) const {
    const double two_pi = 2.0 * std::numbers::pi;
    const Weight& k = spec_.weight;
    if (c.gamma_index < 0) {
      const UnitRow& u = units_[static_cast<std::size_t>(c.unit_index)];
      double sign = 1;
      double angle = 0;
      for (int j = 0; j < 2; ++j) {
        if (u.emb[j] < 0 && (k.at(j) % 2 != 0)) sign = -sign;
        angle += two_pi * nu_[j] * z[j].real() / (u.emb[j] * u.emb[j]);
      }
      return std::polar(sign * std::exp(c.log_modulus), angle);
    }
    const GammaClass& gc = gammas_[static_cast<std::size_t>(c.gamma_index)];
    Complex rot{1.0, 0.0};
    double angle = 0;
    for (int j = 0; j < 2; ++j) {
      const double re = gc.emb[j] * z[j].real() + (static_cast<double>(c.e0) + static_cast<double>(c.e1) * omega_[j]);
      const double im = gc.emb[j] * z[j].imag();
      const double w2 = re * re + im * im;
      const double inv = 1.0 / std::sqrt(w2);
      // w^-k = |w|^-k * (conj(w)/|w|)^k
      rot *= detail::ipow(Complex(re * inv, -im * inv), k.at(j));
      // Re(tr(nu Mz)) beyond the tabulated phase: -nu_j Re(w_j) / (gamma_j |w_j|^2)
      angle -= two_pi * nu_[j] * re / (gc.emb[j] * w2);
    }
    return std::exp(c.log_modulus) * rot * c.residue->twiddle * Complex(std::cos(angle), std::sin(angle));
  }

  CosetRep to_coset(const Candidate& c) const {
    const RealQuadraticField& f = spec_.field;
    if (c.gamma_index < 0) {
      const UnitRow& u = units_[static_cast<std::size_t>(c.unit_index)];
      if (!u.exact) throw std::overflow_error("enumerate_cosets: unit row beyond exact range");
      return {f.zero(), u.unit, f.one() / u.unit, f.zero()};
    }
    const GammaClass& gc = gammas_[static_cast<std::size_t>(c.gamma_index)];
    const FieldElement delta = f.element(c.e0, c.e1);
    const FieldElement a = f.element(c.residue->a0, c.residue->a1);
    const FieldElement b = (a * delta - f.one()) / gc.gamma;
    return {gc.gamma, delta, a, b};
  }

  PoincareSpec spec_;
  TruncationPolicy policy_;
  std::array<double, 2> nu_{};
  std::array<double, 2> omega_{};
  std::vector<UnitRow> units_;
  std::array<double, 2> unit_edge_{};
  std::vector<GammaClass> gammas_;
};

inline EvalResult evaluate(const PoincareSpec& spec, const HPoint& z, const TruncationPolicy& policy) {
  return PoincareSeries(spec, policy).evaluate(z);
}

inline std::vector<CosetRep> enumerate_cosets(const PoincareSpec& spec, const HPoint& z, const TruncationPolicy& policy) {
  return PoincareSeries(spec, policy).enumerate_cosets(z);
}

inline double tail_bound(const PoincareSpec& spec, const HPoint& z, const TruncationPolicy& policy) {
  return PoincareSeries(spec, policy).tail_bound(z);
}

/// Componentwise action of M on H^2.
inline HPoint act(const Matrix2& M, const HPoint& z) {
  const auto a = M.a.embed(), b = M.b.embed(), c = M.c.embed(), d = M.d.embed();
  return {(a[0] * z[0] + b[0]) / (c[0] * z[0] + d[0]), (a[1] * z[1] + b[1]) / (c[1] * z[1] + d[1])};
}

/// |P(Mz) - mu(M,z)^k P(z)| / max(1, |P(z)|)  for M in Gamma_0(I).
inline double modularity_defect(const PoincareSeries& series, const HPoint& z, const Matrix2& M) {
  const PoincareSpec& spec = series.spec();
  if (M.det() != spec.field.one()) throw std::invalid_argument("modularity_defect: determinant must be 1");
  if (!M.c.is_zero() && !spec.level.contains(M.c)) throw std::invalid_argument("modularity_defect: lower-left entry not in the level");
  const auto c = M.c.embed(), d = M.d.embed();
  const Complex j = detail::ipow(c[0] * z[0] + d[0], spec.weight.k1) * detail::ipow(c[1] * z[1] + d[1], spec.weight.k2);
  const Complex pz = series.evaluate(z).value;
  const Complex pmz = series.evaluate(act(M, z)).value;
  return std::abs(pmz - j * pz) / std::max(1.0, std::abs(pz));
}

inline double modularity_defect(const PoincareSpec& spec, const HPoint& z, const Matrix2& M, const TruncationPolicy& policy) {
  return modularity_defect(PoincareSeries(spec, policy), z, M);
}

}  // namespace hilbert
