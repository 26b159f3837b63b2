#pragma once

// Structured config parsing: JSON files with strict key validation, defaults,
// command-line overrides of the form [--]section.key=value, and parse-time
// commensurability checks so bad grids are rejected before any assembly.

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlifem/expr.hpp"
#include "nlifem/report.hpp"

namespace nlifem {

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                           const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw config_error("config: unknown key \"" + (where.empty() ? it.key() : where + "." + it.key()) + "\"");
}

template <class T>
T fetch(const json& obj, const std::string& key, const T& fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw config_error("config: bad value for key \"" + key + "\"");
  }
}

inline Example parse_custom_example(const json& js) {
  reject_unknown(js, {"a", "b", "interfaces", "kernels", "delta", "multiples", "exact"},
                 "custom");
  Example ex;
  ex.id = "custom";
  ex.a = fetch<double>(js, "a", 0.0);
  ex.b = fetch<double>(js, "b", 1.0);
  ex.interfaces = fetch<std::vector<double>>(js, "interfaces", {});
  require(!ex.interfaces.empty(), "config: custom.interfaces must be non-empty");
  auto kn = fetch<std::vector<std::string>>(js, "kernels", {});
  require(kn.size() == ex.interfaces.size() + 1,
          "config: custom.kernels must list one kernel per field");
  for (const std::string& name : kn)
    ex.profiles.push_back(make_kernel(name, 1.0).profile.kind);
  ex.default_delta = fetch<std::vector<double>>(js, "delta", {});
  ex.default_multiples = fetch<std::vector<int>>(js, "multiples", {});
  require(js.contains("exact"), "config: custom.exact is required");
  const json& exact = js.at("exact");
  require(exact.is_array() && exact.size() == kn.size(),
          "config: custom.exact must list one branch set per field");
  for (const auto& field_js : exact) {
    require(field_js.is_array() && !field_js.empty(),
            "config: custom.exact entries must be arrays of pieces");
    ScalarField u;
    for (const auto& pj : field_js) {
      reject_unknown(pj, {"lo", "hi", "f"}, "custom.exact[]");
      require(pj.contains("lo") && pj.contains("hi") && pj.contains("f"),
              "config: custom exact pieces need lo, hi, f");
      u.pieces.push_back(compile_expression(pj.at("f").get<std::string>(),
                                            pj.at("lo").get<double>(),
                                            pj.at("hi").get<double>()));
    }
    ex.exact.push_back(std::move(u));
  }
  return ex;
}

}  // namespace detail

// splits "--section.key=value" (leading dashes optional) and applies it onto
// the config json; values parse as JSON when possible, else as strings
inline void apply_override(nlohmann::json& root, const std::string& token) {
  std::string t = token;
  while (!t.empty() && t[0] == '-') t.erase(t.begin());
  auto eq = t.find('=');
  require(eq != std::string::npos && eq > 0,
          "config: override \"" + token + "\" is not key=value");
  std::string path = t.substr(0, eq), value = t.substr(eq + 1);
  nlohmann::json v;
  try {
    v = nlohmann::json::parse(value);
  } catch (const nlohmann::json::exception&) {
    v = value;
  }
  nlohmann::json* node = &root;
  size_t pos = 0;
  while (true) {
    auto dot = path.find('.', pos);
    std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
    require(!key.empty(), "config: empty key in override \"" + token + "\"");
    if (dot == std::string::npos) {
      (*node)[key] = v;
      break;
    }
    node = &(*node)[key];
    pos = dot + 1;
  }
}

inline StudyConfig parse_config_json(const nlohmann::json& js) {
  using detail::fetch;
  detail::reject_unknown(
      js,
      {"example", "kind", "k", "levels", "delta", "multiples", "coupling",
       "corrected_bc", "halvings", "delta1", "delta_ratio", "seeds", "rng_seed",
       "quadrature", "output", "custom"},
      "");
  StudyConfig cfg;
  cfg.example = fetch<std::string>(js, "example", cfg.example);
  cfg.kind = parse_study_kind(fetch<std::string>(js, "kind", "fixed_delta"));
  cfg.k = fetch<int>(js, "k", cfg.k);
  require(cfg.k == 0 || (cfg.k >= 1 && cfg.k <= 8), "config: k out of range [1,8]");
  cfg.levels = fetch<std::vector<int>>(js, "levels", {});
  cfg.delta = fetch<std::vector<double>>(js, "delta", {});
  cfg.multiples = fetch<std::vector<int>>(js, "multiples", {});
  std::string coup = fetch<std::string>(js, "coupling", "identified");
  if (coup == "identified") {
    cfg.coupling = Coupling::identified;
  } else if (coup == "decoupled") {
    cfg.coupling = Coupling::decoupled;
  } else {
    throw config_error("config: coupling must be identified|decoupled");
  }
  cfg.corrected_bc = fetch<bool>(js, "corrected_bc", cfg.corrected_bc);
  cfg.halvings = fetch<int>(js, "halvings", cfg.halvings);
  cfg.delta1 = fetch<double>(js, "delta1", cfg.delta1);
  cfg.delta_ratio = fetch<double>(js, "delta_ratio", cfg.delta_ratio);
  cfg.seeds = fetch<int>(js, "seeds", cfg.seeds);
  cfg.rng_seed = fetch<unsigned>(js, "rng_seed", cfg.rng_seed);
  if (js.contains("quadrature")) {
    const auto& q = js.at("quadrature");
    detail::reject_unknown(q, {"stiffness"}, "quadrature");
    cfg.quad_stiffness = fetch<int>(q, "stiffness", 0);
  }
  if (js.contains("output")) {
    const auto& o = js.at("output");
    detail::reject_unknown(o, {"csv", "svg"}, "output");
    cfg.csv_path = fetch<std::string>(o, "csv", "");
    cfg.svg_path = fetch<std::string>(o, "svg", "");
  }
  if (cfg.example == "custom") {
    require(js.contains("custom"), "config: example \"custom\" needs a custom section");
    cfg.custom = detail::parse_custom_example(js.at("custom"));
    cfg.custom_sig = js.at("custom").dump();
  } else if (js.contains("custom")) {
    throw config_error("config: custom section given but example != \"custom\"");
  }

  // structural validation before any compute
  Example ex = resolve_example(cfg);
  if (!cfg.delta.empty())
    require(int(cfg.delta.size()) == ex.n_fields(),
            "config: delta must list one horizon per field");
  if (!cfg.multiples.empty())
    require(int(cfg.multiples.size()) == ex.n_fields(),
            "config: multiples must list one factor per field");
  if (!cfg.levels.empty()) {
    for (size_t i = 1; i < cfg.levels.size(); ++i)
      require(cfg.levels[i] > cfg.levels[i - 1], "config: levels must be strictly increasing");
    require(cfg.levels.front() >= 0 && cfg.levels.back() <= 16,
            "config: levels out of range [0,16]");
  }
  if (cfg.kind == StudyKind::fixed_delta || cfg.kind == StudyKind::coupled) {
    std::vector<int> levels =
        cfg.levels.empty()
            ? detail::default_levels(ex, cfg.kind == StudyKind::coupled)
            : cfg.levels;
    double hmin = std::ldexp(1.0, -levels.back());
    double span = ex.b - ex.a;
    double n = span / hmin;
    require(std::fabs(n - std::round(n)) <= 1e-9 * n,
            "config: (b - a) not an integer multiple of the finest h");
    if (cfg.kind == StudyKind::fixed_delta) {
      const std::vector<double>& ds = cfg.delta.empty() ? ex.default_delta : cfg.delta;
      for (double d : ds) {
        double m = d / hmin;
        require(std::fabs(m - std::round(m)) <= 1e-9 * std::max(1.0, m),
                "config: horizon not commensurate with the finest h");
      }
    }
  }
  return cfg;
}

inline StudyConfig parse_config(const std::string& path,
                                const std::vector<std::string>& overrides = {}) {
  std::ifstream in(path);
  require(bool(in), "config: cannot open " + path);
  nlohmann::json js;
  try {
    js = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error("config: " + path + ": " + e.what());
  }
  require(js.is_object(), "config: top level must be an object");
  for (const std::string& t : overrides) apply_override(js, t);
  return parse_config_json(js);
}

}  // namespace nlifem
