#pragma once

// Run configuration shared by the command-line tools.
//
// A config is a list of key=value lines. Tool outputs embed their config as
// "#@ key=value" lines; a file containing such lines is read through them only,
// so any CSV the tools produce can be fed back as --config.

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hilbert/experiments.hpp"
#include "hilbert/fourier.hpp"
#include "hilbert/poincare.hpp"
#include "hilbert/qfield.hpp"

namespace hilbert {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Level written either as a rational integer generator "n" or as HNF entries "m00/m01/m11".
struct LevelSpec {
  std::int64_t m00 = 1, m01 = 0, m11 = 1;
  bool principal_integer = true;
  std::int64_t generator = 1;

  IdealHNF ideal(const RealQuadraticField& f) const {
    if (principal_integer) return IdealHNF::from_gen(f, f.element(generator));
    return IdealHNF::from_hnf(f, m00, m01, m11);
  }
  std::string str() const {
    if (principal_integer) return std::to_string(generator);
    return std::to_string(m00) + "/" + std::to_string(m01) + "/" + std::to_string(m11);
  }
};

enum class OutputFormat { Csv, Json };

struct RunConfig {
  std::int64_t d = 5;
  std::vector<int> ks{6, 10, 14, 18};
  Weight weight{4, 4};
  std::vector<LevelSpec> levels;
  LevelSpec level;
  std::optional<std::array<std::int64_t, 2>> nu_beta;  // nu = (a + b w)/sqrt(D)
  std::optional<std::array<std::int64_t, 2>> mu_beta;
  int grid_n = 32;
  std::array<double, 2> y{1.1, 1.0};
  TruncationPolicy policy;
  GammaInfConvention convention = GammaInfConvention::TranslationsOnly;
  double safety = 10;
  double threshold = 0.05;
  OutputFormat format = OutputFormat::Csv;
  // classical
  std::int64_t m = 1, n = 1, q = 1;
  int k = 12;
  std::int64_t cmax = 1000;
  std::int64_t m_max = 10;
  double quad_y = 0.5;
  int quad_grid = 64;

  RunConfig() {
    for (std::int64_t g : {2, 3, 4, 7}) levels.push_back({1, 0, 1, true, g});
  }

  static const std::vector<std::string>& keys() {
    static const std::vector<std::string> k{"d",         "ks",        "weight", "levels",   "level",    "nu",         "mu",
                                            "grid",      "y",         "gamma_height_max",   "term_cutoff", "max_terms",
                                            "delta_box_margin",       "unit_cap", "convention", "safety", "threshold",
                                            "format",    "m",         "n",      "k",        "q",        "cmax",       "m_max",
                                            "quad_y",    "quad_grid"};
    return k;
  }

  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;

  std::vector<std::pair<std::string, std::string>> entries() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& key : keys()) out.emplace_back(key, get(key));
    return out;
  }

  /// Field and dual indices; throws ConfigError for anything a module would reject.
  RealQuadraticField field() const {
    try {
      return RealQuadraticField::make(d);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  DualIndex nu() const { return dual(nu_beta, 0); }
  DualIndex mu() const { return dual(mu_beta, 1); }
  SamplingDomain domain() const { return {field(), y, grid_n}; }
  std::vector<IdealHNF> level_ideals() const {
    std::vector<IdealHNF> out;
    for (const auto& l : levels) out.push_back(make_ideal(l));
    std::stable_sort(out.begin(), out.end(), [](const IdealHNF& a, const IdealHNF& b) { return a.norm() < b.norm(); });
    return out;
  }
  IdealHNF level_ideal() const { return make_ideal(level); }

  void validate() const {
    try {
      field();
      nu();
      mu();
      domain().validate();
      policy.validate();
      weight.validate();
      for (int kk : ks) Weight{kk, kk}.validate();
      level_ideals();
      level_ideal();
      if (!(safety > 0) || !(threshold > 0)) throw std::invalid_argument("safety and threshold must be positive");
      if (cmax < 1 || m_max < 0 || quad_grid < 4 || !(quad_y > 0)) throw std::invalid_argument("classical settings out of range");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }

 private:
  IdealHNF make_ideal(const LevelSpec& l) const {
    try {
      return l.ideal(field());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("level ") + l.str() + ": " + e.what());
    }
  }

  DualIndex dual(const std::optional<std::array<std::int64_t, 2>>& beta, std::size_t which) const {
    const RealQuadraticField f = field();
    if (beta) {
      const DualIndex v = DualIndex::from_beta(f, f.element((*beta)[0], (*beta)[1]));
      if (!is_totally_positive(v.elem())) throw ConfigError("dual index " + v.elem().str() + " is not totally positive");
      return v;
    }
    // default: totally positive indices of smallest trace, by tr(nu w) descending
    for (std::int64_t t = 1; t <= 8; ++t) {
      auto list = totally_positive_dual_indices(f, t);
      std::stable_sort(list.begin(), list.end(), [](const DualIndex& a, const DualIndex& b) {
        return a.freq().r != b.freq().r ? a.freq().r < b.freq().r : a.freq().s > b.freq().s;
      });
      if (list.size() > which) return list[which];
    }
    throw ConfigError("no default dual index available");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& s) {
  std::istringstream is(s);
  T v{};
  is >> v;
  if (is.fail() || !is.eof()) throw ConfigError("config: bad value '" + s + "' for " + key);
  return v;
}

inline LevelSpec parse_level(const std::string& key, const std::string& s) {
  const auto parts = split(s, '/');
  LevelSpec l;
  if (parts.size() == 1) {
    l.generator = parse_number<std::int64_t>(key, parts[0]);
    if (l.generator < 1) throw ConfigError("config: level generator must be positive");
    return l;
  }
  if (parts.size() != 3) throw ConfigError("config: level must be 'n' or 'm00/m01/m11', got '" + s + "'");
  l.principal_integer = false;
  l.m00 = parse_number<std::int64_t>(key, parts[0]);
  l.m01 = parse_number<std::int64_t>(key, parts[1]);
  l.m11 = parse_number<std::int64_t>(key, parts[2]);
  return l;
}

inline std::string join_doubles(const std::array<double, 2>& v) { return fmt_double(v[0]) + "," + fmt_double(v[1]); }

}  // namespace detail

inline void RunConfig::set(const std::string& key, const std::string& value) {
  using detail::parse_number;
  using detail::split;
  const std::string v = detail::trim(value);
  auto pair_of = [&](auto tag) {
    using T = decltype(tag);
    const auto p = split(v, ',');
    if (p.size() != 2) throw ConfigError("config: " + key + " needs two comma-separated values");
    return std::array<T, 2>{parse_number<T>(key, p[0]), parse_number<T>(key, p[1])};
  };
  if (key == "d") {
    d = parse_number<std::int64_t>(key, v);
  } else if (key == "ks") {
    ks.clear();
    for (const auto& s : split(v, ',')) ks.push_back(parse_number<int>(key, s));
  } else if (key == "weight") {
    const auto p = pair_of(int{});
    weight = {p[0], p[1]};
  } else if (key == "levels") {
    levels.clear();
    for (const auto& s : split(v, ',')) levels.push_back(detail::parse_level(key, s));
  } else if (key == "level") {
    level = detail::parse_level(key, v);
  } else if (key == "nu") {
    nu_beta = v == "auto" ? std::nullopt : std::optional(pair_of(std::int64_t{}));
  } else if (key == "mu") {
    mu_beta = v == "auto" ? std::nullopt : std::optional(pair_of(std::int64_t{}));
  } else if (key == "grid") {
    grid_n = parse_number<int>(key, v);
  } else if (key == "y") {
    y = pair_of(double{});
  } else if (key == "gamma_height_max") {
    policy.gamma_height_max = parse_number<double>(key, v);
  } else if (key == "term_cutoff") {
    policy.term_cutoff = parse_number<double>(key, v);
  } else if (key == "max_terms") {
    policy.max_terms = parse_number<std::size_t>(key, v);
  } else if (key == "delta_box_margin") {
    policy.delta_box_margin = parse_number<double>(key, v);
  } else if (key == "unit_cap") {
    policy.unit_cap = parse_number<int>(key, v);
  } else if (key == "convention") {
    if (v == "translations") {
      convention = GammaInfConvention::TranslationsOnly;
    } else if (v == "unit-extended") {
      convention = GammaInfConvention::UnitExtended;
    } else {
      throw ConfigError("config: convention must be 'translations' or 'unit-extended'");
    }
  } else if (key == "safety") {
    safety = parse_number<double>(key, v);
  } else if (key == "threshold") {
    threshold = parse_number<double>(key, v);
  } else if (key == "format") {
    if (v == "csv") {
      format = OutputFormat::Csv;
    } else if (v == "json") {
      format = OutputFormat::Json;
    } else {
      throw ConfigError("config: format must be csv or json");
    }
  } else if (key == "m") {
    m = parse_number<std::int64_t>(key, v);
  } else if (key == "n") {
    n = parse_number<std::int64_t>(key, v);
  } else if (key == "k") {
    k = parse_number<int>(key, v);
  } else if (key == "q") {
    q = parse_number<std::int64_t>(key, v);
  } else if (key == "cmax") {
    cmax = parse_number<std::int64_t>(key, v);
  } else if (key == "m_max") {
    m_max = parse_number<std::int64_t>(key, v);
  } else if (key == "quad_y") {
    quad_y = parse_number<double>(key, v);
  } else if (key == "quad_grid") {
    quad_grid = parse_number<int>(key, v);
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

inline std::string RunConfig::get(const std::string& key) const {
  auto join_ints = [](const auto& xs) {
    std::string s;
    for (const auto& x : xs) s += (s.empty() ? "" : ",") + std::to_string(x);
    return s;
  };
  auto beta_str = [](const auto& b) { return b ? std::to_string((*b)[0]) + "," + std::to_string((*b)[1]) : std::string("auto"); };
  if (key == "d") return std::to_string(d);
  if (key == "ks") return join_ints(ks);
  if (key == "weight") return std::to_string(weight.k1) + "," + std::to_string(weight.k2);
  if (key == "levels") {
    std::string s;
    for (const auto& l : levels) s += (s.empty() ? "" : ",") + l.str();
    return s;
  }
  if (key == "level") return level.str();
  if (key == "nu") return beta_str(nu_beta);
  if (key == "mu") return beta_str(mu_beta);
  if (key == "grid") return std::to_string(grid_n);
  if (key == "y") return detail::join_doubles(y);
  if (key == "gamma_height_max") return fmt_double(policy.gamma_height_max);
  if (key == "term_cutoff") return fmt_double(policy.term_cutoff);
  if (key == "max_terms") return std::to_string(policy.max_terms);
  if (key == "delta_box_margin") return fmt_double(policy.delta_box_margin);
  if (key == "unit_cap") return std::to_string(policy.unit_cap);
  if (key == "convention") return to_string(convention);
  if (key == "safety") return fmt_double(safety);
  if (key == "threshold") return fmt_double(threshold);
  if (key == "format") return format == OutputFormat::Csv ? "csv" : "json";
  if (key == "m") return std::to_string(m);
  if (key == "n") return std::to_string(n);
  if (key == "k") return std::to_string(k);
  if (key == "q") return std::to_string(q);
  if (key == "cmax") return std::to_string(cmax);
  if (key == "m_max") return std::to_string(m_max);
  if (key == "quad_y") return fmt_double(quad_y);
  if (key == "quad_grid") return std::to_string(quad_grid);
  throw ConfigError("config: unknown key '" + key + "'");
}

/// Applies key=value lines (or only the "#@ " lines, if any are present).
inline void apply_config_text(RunConfig& cfg, const std::string& text) {
  std::vector<std::string> lines;
  {
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) lines.push_back(line);
  }
  bool embedded = false;
  for (const auto& l : lines) embedded = embedded || l.rfind("#@ ", 0) == 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i];
    if (embedded) {
      if (line.rfind("#@ ", 0) != 0) continue;
      line = line.substr(3);
    }
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(i + 1) + ": expected key=value");
    cfg.set(detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

inline void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str());
}

/// "#@ key=value" lines for embedding in text outputs.
inline std::string embedded_config(const RunConfig& cfg) {
  std::string s;
  for (const auto& [k, v] : cfg.entries()) s += "#@ " + k + "=" + v + "\n";
  return s;
}

}  // namespace hilbert
