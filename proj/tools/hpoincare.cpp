// Command-line front end: field data, Hilbert sweeps and certificates, classical oracles.
//
// Exit codes: 0 all asserted properties hold, 1 an assertion failed,
// 2 bad configuration, 3 truncation failure (partial output written).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hilbert/classical.hpp"
#include "hilbert/config.hpp"
#include "hilbert/experiments.hpp"
#include "hilbert/fourier.hpp"
#include "hilbert/poincare.hpp"
#include "hilbert/qfield.hpp"

using namespace hilbert;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssert = 1;
constexpr int kExitConfig = 2;
constexpr int kExitTruncation = 3;

struct Common {
  std::string config_path;
  std::string out_path;
  bool json = false;
  std::vector<std::pair<std::string, std::string>> overrides;
};

// Every config key becomes a --flag; values are applied after the config file.
void add_config_flags(CLI::App* cmd, Common& c, const std::vector<std::string>& keys) {
  cmd->add_option("--config", c.config_path, "key=value config file (flags win)");
  cmd->add_option("--out", c.out_path, "write output here instead of stdout");
  cmd->add_flag("--json", c.json, "JSON output");
  for (const auto& key : keys) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    cmd->add_option_function<std::string>(flag, [&c, key](const std::string& v) { c.overrides.emplace_back(key, v); },
                                          "config key " + key);
  }
}

RunConfig load(const Common& c) {
  RunConfig cfg;
  if (!c.config_path.empty()) apply_config_file(cfg, c.config_path);
  for (const auto& [k, v] : c.overrides) cfg.set(k, v);
  if (c.json) cfg.format = OutputFormat::Json;
  cfg.validate();
  return cfg;
}

void emit(const Common& c, const std::string& text) {
  if (c.out_path.empty()) {
    std::cout << text << std::flush;
    return;
  }
  const std::filesystem::path target(c.out_path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    os << text;
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

ordered_json config_json(const RunConfig& cfg) {
  ordered_json j;
  for (const auto& [k, v] : cfg.entries()) j[k] = v;
  return j;
}

std::string coords(const FieldElement& x) { return x.str(); }

ordered_json estimate_json(const CoefficientEstimate& c) {
  return {{"mu_beta", coords(c.mu.beta())},
          {"re", c.value.real()},
          {"im", c.value.imag()},
          {"quad_error", c.quad_error},
          {"trunc_error", c.trunc_error}};
}

// ---- field-info ----

int cmd_field_info(std::int64_t d, std::int64_t max_trace, bool json) {
  const RealQuadraticField f = [&] {
    try {
      return RealQuadraticField::make(d);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();
  const FieldElement eps = f.fundamental_unit();
  const auto list = totally_positive_dual_indices(f, max_trace);
  const std::string omega = f.omega_kind() == RealQuadraticField::OmegaKind::HalfInteger ? "(1+sqrt d)/2" : "sqrt d";
  if (json) {
    ordered_json j;
    j["d"] = d;
    j["disc"] = f.discriminant();
    j["omega"] = omega;
    j["fundamental_unit"] = {{"coords", coords(eps)}, {"norm", eps.norm().str()}};
    j["codifferent_gen"] = coords(f.codifferent_gen());
    j["dual_indices"] = ordered_json::array();
    for (const auto& nu : list) {
      const auto e = nu.elem().embed();
      j["dual_indices"].push_back({{"beta", coords(nu.beta())},
                                   {"nu", coords(nu.elem())},
                                   {"freq", {nu.freq().r, nu.freq().s}},
                                   {"embedding", {e[0], e[1]}}});
    }
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }
  std::cout << "d = " << d << "\ndisc = " << f.discriminant() << "\nomega = " << omega << "\nfundamental unit = " << coords(eps)
            << " (norm " << eps.norm() << ")\ncodifferent generator 1/sqrt(D) = " << coords(f.codifferent_gen())
            << "\ntotally positive dual indices (beta/sqrt(D)) with trace <= " << max_trace << ":\n";
  for (const auto& nu : list) {
    const auto e = nu.elem().embed();
    std::printf("  beta=%s  nu=%s  (r,s)=(%lld,%lld)  embeddings=(%.12g, %.12g)\n", coords(nu.beta()).c_str(),
                coords(nu.elem()).c_str(), static_cast<long long>(nu.freq().r), static_cast<long long>(nu.freq().s), e[0], e[1]);
  }
  return kExitOk;
}

// ---- sweeps ----

int finish_sweep(const Common& c, const RunConfig& cfg, const SweepReport& report) {
  const TrendAssessment t = assess(report, cfg.threshold);
  if (cfg.format == OutputFormat::Json) {
    ordered_json j;
    j["config"] = config_json(cfg);
    j["axis"] = to_string(report.axis);
    j["rows"] = ordered_json::array();
    for (const auto& r : report.rows) {
      ordered_json row{{"param", r.param}, {"label", r.label}, {"failed", r.failed}};
      if (r.failed) {
        row["error"] = r.error;
        row["partial_terms"] = r.partial_terms;
      } else {
        row["p_nu"] = estimate_json(r.p_nu);
        row["p_mu"] = estimate_json(r.p_mu);
      }
      j["rows"].push_back(row);
    }
    j["assessment"] = {{"endpoint_improves_nu", t.endpoint_improves_nu}, {"endpoint_improves_mu", t.endpoint_improves_mu},
                       {"monotone_nu", t.monotone_nu},                   {"monotone_mu", t.monotone_mu},
                       {"last_dev_nu", t.last_dev_nu},                   {"last_dev_mu", t.last_dev_mu},
                       {"below_threshold", t.below_threshold}};
    emit(c, j.dump(2) + "\n");
  } else {
    emit(c, embedded_config(cfg) + sweep_csv(report));
  }
  std::fprintf(stderr, "endpoint improvement: nu %s, mu %s; strictly monotone: nu %s, mu %s; last deviations %.3g / %.3g (threshold %g)\n",
               t.endpoint_improves_nu ? "yes" : "no", t.endpoint_improves_mu ? "yes" : "no", t.monotone_nu ? "yes" : "no",
               t.monotone_mu ? "yes" : "no", t.last_dev_nu, t.last_dev_mu, cfg.threshold);
  if (report.any_failed()) return kExitTruncation;
  return t.passed() ? kExitOk : kExitAssert;
}

int cmd_sweep_weight(const Common& c) {
  const RunConfig cfg = load(c);
  const auto report = sweep_weight(cfg.field(), cfg.nu(), cfg.mu(), cfg.level_ideal(), cfg.ks, cfg.domain(), cfg.policy, cfg.convention);
  return finish_sweep(c, cfg, report);
}

int cmd_sweep_level(const Common& c) {
  const RunConfig cfg = load(c);
  const auto report = sweep_level(cfg.field(), cfg.nu(), cfg.mu(), cfg.weight, cfg.level_ideals(), cfg.domain(), cfg.policy, cfg.convention);
  return finish_sweep(c, cfg, report);
}

int cmd_certify(Common c, const std::string& k) {
  if (!k.empty()) c.overrides.emplace_back("weight", k + "," + k);
  const RunConfig cfg = load(c);
  const PoincareSpec spec{cfg.field(), cfg.weight, cfg.nu(), cfg.level_ideal(), cfg.convention};
  spec.validate();
  const Certificate cert = certify_nonvanishing(spec, cfg.domain(), cfg.policy, cfg.safety);
  const auto& v = cert.coefficient;
  if (cfg.format == OutputFormat::Json) {
    ordered_json j;
    j["config"] = config_json(cfg);
    j["coefficient"] = estimate_json(v);
    j["total_error"] = cert.total_error;
    j["safety_factor"] = cert.safety_factor;
    j["verdict"] = to_string(cert.verdict);
    j["note"] = "heuristic: error terms are estimates, not rigorous bounds";
    emit(c, j.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << embedded_config(cfg) << "nu_beta,re_value,im_value,quad_error,trunc_error,total_error,safety,verdict\n"
       << '"' << coords(spec.nu.beta()) << "\"," << fmt_double(v.value.real()) << ',' << fmt_double(v.value.imag()) << ','
       << fmt_double(v.quad_error) << ',' << fmt_double(v.trunc_error) << ',' << fmt_double(cert.total_error) << ','
       << fmt_double(cert.safety_factor) << ',' << to_string(cert.verdict) << '\n';
    emit(c, os.str());
  }
  return cert.verdict == Verdict::NonzeroCertified ? kExitOk : kExitAssert;
}

// ---- classical ----

std::string classical_header() { return "m,n,k,q,value,tail_bound,method\n"; }

std::string classical_row(const classical::ClassicalParams& p, double value, double tail, const char* method) {
  std::ostringstream os;
  os << p.m << ',' << p.n << ',' << p.k << ',' << p.q << ',' << fmt_double(value) << ',' << fmt_double(tail) << ',' << method << '\n';
  return os.str();
}

int cmd_classical(const Common& c, const std::string& what) {
  const RunConfig cfg = load(c);
  const classical::ClassicalParams p{cfg.m, cfg.n, cfg.k, cfg.q};
  std::ostringstream os;
  os << embedded_config(cfg);
  if (what == "petersson") {
    const auto r = classical::petersson_coefficient(p, cfg.cmax);
    os << classical_header() << classical_row(p, r.value, r.tail_bound, "petersson");
  } else if (what == "quadrature") {
    const classical::QuadraturePolicy qp{cfg.quad_y, cfg.quad_grid};
    const double v = classical::classical_poincare_coefficient_by_quadrature(p, qp);
    os << classical_header() << classical_row(p, v, classical::quadrature_error_estimate(p, qp), "quadrature");
  } else if (what == "kloosterman") {
    os << "m,n,c,value\n" << cfg.m << ',' << cfg.n << ',' << cfg.cmax << ',' << fmt_double(classical::kloosterman(cfg.m, cfg.n, cfg.cmax)) << '\n';
  } else if (what == "tau") {
    const auto tau = classical::delta_coefficients(static_cast<int>(cfg.n));
    os << "n,tau\n";
    for (std::size_t i = 0; i < tau.size(); ++i) os << i + 1 << ',' << tau[i] << '\n';
  } else if (what == "range-scan") {
    const auto rows = classical::nonvanishing_range_scan(cfg.k, cfg.m_max, cfg.cmax);
    os << "m,certified,value,tail_bound\n";
    for (const auto& r : rows) os << r.m << ',' << (r.certified ? 1 : 0) << ',' << fmt_double(r.value) << ',' << fmt_double(r.tail_bound) << '\n';
    std::fprintf(stderr, "largest certified prefix: m <= %lld\n", static_cast<long long>(classical::largest_certified_prefix(rows)));
  }
  emit(c, os.str());
  return kExitOk;
}

// ---- selftest ----

int cmd_selftest() {
  int failures = 0;
  auto check = [&](const char* name, bool ok) {
    std::printf("%s %s\n", ok ? "PASS" : "FAIL", name);
    failures += ok ? 0 : 1;
  };
  const auto f5 = RealQuadraticField::make(5);
  const auto f2 = RealQuadraticField::make(2);
  const auto f3 = RealQuadraticField::make(3);
  const auto w = f5.omega();
  check("d=5 basis", f5.discriminant() == 5 && f5.omega_kind() == RealQuadraticField::OmegaKind::HalfInteger);
  check("d=2 basis", f2.discriminant() == 8 && f2.omega_kind() == RealQuadraticField::OmegaKind::Root);
  bool rejected = false;
  try {
    RealQuadraticField::make(12);
  } catch (const std::invalid_argument&) {
    rejected = true;
  }
  check("d=12 rejected", rejected);
  const auto e = w.embed();
  check("embed omega", std::abs(e[0] - 1.6180339887498949) < 1e-15 && std::abs(e[1] + 0.6180339887498949) < 1e-15);
  check("trace/norm omega", w.trace() == Rational(1) && w.norm() == Rational(-1));
  check("trace/norm 1+sqrt2", f2.element(1, 1).trace() == Rational(2) && f2.element(1, 1).norm() == Rational(-1));
  check("total positivity", is_totally_positive(f5.element(2, 1)) && !is_totally_positive(w) && !is_totally_positive(f5.zero()));
  const auto g = f5.codifferent_gen();
  check("codifferent d=5", g.trace() == Rational(0) && (g * w).trace() == Rational(1));
  check("codifferent d=2", (f2.codifferent_gen() * f2.omega()).trace() == Rational(1));
  const auto I2 = IdealHNF::from_gen(f5, f5.element(2));
  check("ideal (2)", I2.norm() == 4 && I2.contains(f5.element(0, 2)) && !I2.contains(w));
  check("ideal (sqrt5)", IdealHNF::from_gen(f5, f5.sqrt_disc()).norm() == 5);
  check("unimodular pairs", is_unimodular_pair(f5, f5.zero(), f5.one()) && !is_unimodular_pair(f5, f5.element(2), f5.element(0, 2)) &&
                                is_unimodular_pair(f5, f5.element(2), w));
  const auto ab = complete_pair(f5, f5.element(2), w);
  check("complete_pair (2, w)", ab.first * w - ab.second * f5.element(2) == f5.one());
  check("fundamental units", f5.fundamental_unit() == w && f2.fundamental_unit() == f2.element(1, 1) &&
                                 f3.fundamental_unit() == f3.element(2, 1));
  const auto tp = totally_positive_dual_indices(f5, 1);
  check("trace-1 dual indices of Q(sqrt5)", tp.size() == 2);
  {
    const auto nu = DualIndex::from_element(f5, w / f5.sqrt_disc());
    FourierSum fs(f5);
    fs.add(nu, 1.0);
    const auto c = extract_coefficient(fs, nu, SamplingDomain{f5, {1.1, 1.0}, 16});
    check("synthetic Fourier recovery", std::abs(c.value - 1.0) < 1e-12);
  }
  check("S(1,1;2) = 1", std::abs(classical::kloosterman(1, 1, 2) - 1) < 1e-12);
  check("S(1,1;3) = -1", std::abs(classical::kloosterman(1, 1, 3) + 1) < 1e-12);
  const auto tau = classical::delta_coefficients(6);
  check("tau(2) = -24, tau(6) = tau(2) tau(3)", tau[1] == -24 && tau[5] == tau[1] * tau[2]);
  const double p1 = classical::petersson_coefficient({1, 1, 12, 1}, 200).value;
  const double p2 = classical::petersson_coefficient({1, 2, 12, 1}, 200).value;
  check("p(2)/p(1) = tau(2) at k=12", std::abs(p2 / p1 + 24) < 1e-4);
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? kExitOk : kExitAssert;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hilbert Poincare series over real quadratic fields"};
  app.require_subcommand(1);

  std::int64_t info_d = 5, info_trace = 1;
  bool info_json = false;
  auto* info = app.add_subcommand("field-info", "basis, unit, codifferent and small totally positive dual indices");
  info->add_option("--d", info_d, "squarefree d > 1");
  info->add_option("--max-trace", info_trace, "largest trace of listed dual indices");
  info->add_flag("--json", info_json, "JSON output");

  const std::vector<std::string> hilbert_keys{"d",           "ks",        "weight",           "levels",   "level",     "nu",
                                              "mu",          "grid",      "y",                "gamma_height_max", "term_cutoff",
                                              "max_terms",   "delta_box_margin", "unit_cap",  "convention", "safety", "threshold",
                                              "format"};
  const std::vector<std::string> classical_keys{"m", "n", "k", "q", "cmax", "m_max", "quad_y", "quad_grid", "format"};

  Common sw, sl, ce;
  auto* sweep_w = app.add_subcommand("sweep-weight", "coefficients at nu and mu over parallel weights");
  add_config_flags(sweep_w, sw, hilbert_keys);
  auto* sweep_l = app.add_subcommand("sweep-level", "coefficients at nu and mu over levels");
  add_config_flags(sweep_l, sl, hilbert_keys);
  std::string certify_k;
  auto* cert = app.add_subcommand("certify", "non-vanishing certificate from the nu-th coefficient");
  add_config_flags(cert, ce, hilbert_keys);
  cert->add_option("--k", certify_k, "parallel weight (k, k); overrides --weight");

  auto* cl = app.add_subcommand("classical", "F = Q oracles");
  cl->require_subcommand(1);
  std::vector<std::pair<std::string, Common>> classical_cmds;
  for (const char* name : {"petersson", "quadrature", "kloosterman", "tau", "range-scan"}) classical_cmds.emplace_back(name, Common{});
  const std::map<std::string, std::string> classical_help{
      {"petersson", "p_{m,k,q}(n) from the Kloosterman-Bessel series"},
      {"quadrature", "p_{m,k,q}(n) by sampling the coset sum"},
      {"kloosterman", "S(m, n; c) by brute force"},
      {"tau", "tau(1..n) from E4^3 - E6^2"},
      {"range-scan", "certify p_{m,k,1}(m) != 0 for m <= m_max"}};
  for (auto& [name, common] : classical_cmds) add_config_flags(cl->add_subcommand(name, classical_help.at(name)), common, classical_keys);

  auto* self = app.add_subcommand("selftest", "run the built-in example checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (info->parsed()) return cmd_field_info(info_d, info_trace, info_json);
    if (sweep_w->parsed()) return cmd_sweep_weight(sw);
    if (sweep_l->parsed()) return cmd_sweep_level(sl);
    if (cert->parsed()) return cmd_certify(ce, certify_k);
    if (self->parsed()) return cmd_selftest();
    for (auto& [name, common] : classical_cmds) {
      if (cl->get_subcommand(name)->parsed()) return cmd_classical(common, name);
    }
  } catch (const TruncationFailure& e) {
    std::fprintf(stderr, "truncation failure after %zu candidates: %s\n", e.partial_count, e.what());
    return kExitTruncation;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitAssert;
  }
  return kExitConfig;
}
