#pragma once

// Weight and level sweeps of Hilbert Poincare coefficients, and
// non-vanishing certificates built from a single coefficient.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hilbert/fourier.hpp"
#include "hilbert/poincare.hpp"
#include "hilbert/qfield.hpp"

namespace hilbert {

enum class SweepAxis { Weight, Level };

inline std::string to_string(SweepAxis a) { return a == SweepAxis::Weight ? "weight" : "level"; }

struct SweepRow {
  /// k for weight sweeps, N(I) for level sweeps.
  std::int64_t param = 0;
  std::string label;
  CoefficientEstimate p_nu;
  CoefficientEstimate p_mu;
  bool failed = false;
  std::string error;
  std::size_t partial_terms = 0;
};

struct SweepReport {
  SweepAxis axis = SweepAxis::Weight;
  std::vector<SweepRow> rows;
  /// The swept field of the snapshot holds the first row's value.
  PoincareSpec spec_snapshot;
  DualIndex mu;
  SamplingDomain domain;
  TruncationPolicy policy;

  bool any_failed() const {
    return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.failed; });
  }
};

/// Deviations from the limit value delta(nu, mu).
struct TrendAssessment {
  bool endpoint_improves_nu = false;
  bool endpoint_improves_mu = false;
  bool monotone_nu = false;
  bool monotone_mu = false;
  double last_dev_nu = 0;
  double last_dev_mu = 0;
  bool below_threshold = false;
  bool passed() const { return endpoint_improves_nu && endpoint_improves_mu && below_threshold; }
};

inline double deviation(const CoefficientEstimate& c, bool diagonal) { return std::abs(c.value - (diagonal ? 1.0 : 0.0)); }

inline TrendAssessment assess(const SweepReport& report, double threshold) {
  TrendAssessment t;
  if (report.rows.empty() || report.any_failed()) return t;
  const bool same = report.spec_snapshot.nu == report.mu;
  std::vector<double> dn, dm;
  for (const auto& r : report.rows) {
    dn.push_back(deviation(r.p_nu, true));
    dm.push_back(deviation(r.p_mu, same));
  }
  auto strictly_down = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (!(v[i] < v[i - 1])) return false;
    }
    return true;
  };
  t.endpoint_improves_nu = dn.size() == 1 || dn.back() < dn.front();
  t.endpoint_improves_mu = dm.size() == 1 || dm.back() < dm.front();
  t.monotone_nu = strictly_down(dn);
  t.monotone_mu = strictly_down(dm);
  t.last_dev_nu = dn.back();
  t.last_dev_mu = dm.back();
  t.below_threshold = dn.back() < threshold && dm.back() < threshold;
  return t;
}

namespace detail {

inline SweepRow sweep_row(const PoincareSpec& spec, const DualIndex& mu, const SamplingDomain& domain, const TruncationPolicy& policy,
                          std::int64_t param, std::string label) {
  SweepRow row;
  row.param = param;
  row.label = std::move(label);
  try {
    const PoincareEvaluand ev(spec, policy);
    const auto c = extract_many(ev, {spec.nu, mu}, domain);
    row.p_nu = c[0];
    row.p_mu = c[1];
  } catch (const TruncationFailure& e) {
    row.failed = true;
    row.error = e.what();
    row.partial_terms = e.partial_count;
  }
  return row;
}

}  // namespace detail

/// Rows for parallel weights (k, k), k ascending.
inline SweepReport sweep_weight(const RealQuadraticField& field, const DualIndex& nu, const DualIndex& mu, const IdealHNF& level,
                                const std::vector<int>& k_list, const SamplingDomain& domain, const TruncationPolicy& policy,
                                GammaInfConvention convention = GammaInfConvention::TranslationsOnly) {
  if (k_list.empty()) throw std::invalid_argument("sweep_weight: empty weight list");
  if (!std::is_sorted(k_list.begin(), k_list.end()) || std::adjacent_find(k_list.begin(), k_list.end()) != k_list.end()) {
    throw std::invalid_argument("sweep_weight: weights must be strictly ascending");
  }
  if (!is_totally_positive(mu.elem())) throw std::invalid_argument("sweep_weight: mu must be totally positive");
  SweepReport report;
  report.axis = SweepAxis::Weight;
  report.mu = mu;
  report.domain = domain;
  report.policy = policy;
  report.spec_snapshot = PoincareSpec{field, {k_list.front(), k_list.front()}, nu, level, convention};
  report.spec_snapshot.validate();
  for (int k : k_list) {
    PoincareSpec spec = report.spec_snapshot;
    spec.weight = {k, k};
    spec.validate();
    report.rows.push_back(detail::sweep_row(spec, mu, domain, policy, k, "(" + std::to_string(k) + "," + std::to_string(k) + ")"));
  }
  return report;
}

/// Rows for levels sorted by norm; param is N(I).
inline SweepReport sweep_level(const RealQuadraticField& field, const DualIndex& nu, const DualIndex& mu, const Weight& weight,
                               const std::vector<IdealHNF>& levels, const SamplingDomain& domain, const TruncationPolicy& policy,
                               GammaInfConvention convention = GammaInfConvention::TranslationsOnly) {
  if (levels.empty()) throw std::invalid_argument("sweep_level: empty level list");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i].norm() < levels[i - 1].norm()) throw std::invalid_argument("sweep_level: levels must be sorted by norm");
  }
  if (!is_totally_positive(mu.elem())) throw std::invalid_argument("sweep_level: mu must be totally positive");
  SweepReport report;
  report.axis = SweepAxis::Level;
  report.mu = mu;
  report.domain = domain;
  report.policy = policy;
  report.spec_snapshot = PoincareSpec{field, weight, nu, levels.front(), convention};
  report.spec_snapshot.validate();
  for (const auto& level : levels) {
    PoincareSpec spec = report.spec_snapshot;
    spec.level = level;
    report.rows.push_back(detail::sweep_row(spec, mu, domain, policy, level.norm(), level.str()));
  }
  return report;
}

enum class Verdict { NonzeroCertified, Inconclusive };

inline std::string to_string(Verdict v) { return v == Verdict::NonzeroCertified ? "NonzeroCertified" : "Inconclusive"; }

/// Heuristic: the error terms are estimates, not rigorous bounds.
struct Certificate {
  PoincareSpec spec;
  CoefficientEstimate coefficient;
  double total_error = 0;
  Verdict verdict = Verdict::Inconclusive;
  double safety_factor = 10;
};

inline Verdict certificate_verdict(Complex value, double total_error, double safety_factor) {
  return std::abs(value) > safety_factor * total_error ? Verdict::NonzeroCertified : Verdict::Inconclusive;
}

inline Certificate certify_nonvanishing(const PoincareSpec& spec, const SamplingDomain& domain, const TruncationPolicy& policy,
                                        double safety_factor) {
  if (!(safety_factor > 0)) throw std::invalid_argument("certify_nonvanishing: safety factor must be positive");
  Certificate cert;
  cert.spec = spec;
  cert.safety_factor = safety_factor;
  const PoincareEvaluand ev(spec, policy);
  cert.coefficient = extract_coefficient(ev, spec.nu, domain);
  cert.total_error = cert.coefficient.total_error();
  cert.verdict = certificate_verdict(cert.coefficient.value, cert.total_error, safety_factor);
  return cert;
}

/// %.17g, so a value round-trips through text.
inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string sweep_csv_header() { return "axis,param,re_p_nu,im_p_nu,err_p_nu,re_p_mu,im_p_mu,err_p_mu"; }

inline std::string sweep_csv_rows(const SweepReport& r) {
  std::ostringstream os;
  for (const auto& row : r.rows) {
    os << to_string(r.axis) << ',' << row.param;
    if (row.failed) {
      os << ",nan,nan,nan,nan,nan,nan\n";
      continue;
    }
    for (const auto* c : {&row.p_nu, &row.p_mu}) {
      os << ',' << fmt_double(c->value.real()) << ',' << fmt_double(c->value.imag()) << ',' << fmt_double(c->total_error());
    }
    os << '\n';
  }
  return os.str();
}

inline std::string sweep_csv(const SweepReport& r) { return sweep_csv_header() + "\n" + sweep_csv_rows(r); }

}  // namespace hilbert
