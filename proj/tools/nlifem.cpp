// Command-line front end: single solves, convergence studies, the local-limit
// and flux-consistency sweeps, maximum-principle checks, and canned table
// reproductions.  Reports go to CSV/SVG with a JSON run manifest; exit code is
// 0 on pass, 1 on numerical failure, 2 on configuration errors.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlifem.hpp"

namespace {

using nlifem::StudyConfig;
using nlifem::StudyReport;
using json = nlohmann::json;

json load_config_json(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  nlifem::require(bool(in), "config: cannot open " + path);
  try {
    json js = json::parse(in);
    nlifem::require(js.is_object(), "config: top level must be an object");
    return js;
  } catch (const json::parse_error& e) {
    throw nlifem::config_error("config: " + path + ": " + e.what());
  }
}

StudyConfig build_config(const std::string& config_path,
                         const std::vector<std::string>& overrides) {
  json js = load_config_json(config_path);
  for (const std::string& t : overrides) nlifem::apply_override(js, t);
  return nlifem::parse_config_json(js);
}

void collect_extras(const CLI::App* cmd, std::vector<std::string>& overrides) {
  for (const std::string& t : cmd->remaining()) {
    nlifem::require(t.rfind("--", 0) == 0 && t.find('=') != std::string::npos,
                    "unrecognized argument \"" + t +
                        "\" (expected --section.key=value override)");
    overrides.push_back(t);
  }
}

void write_manifest(nlifem::RunManifest& man, const std::string& csv_path) {
  std::string path = csv_path + ".manifest.json";
  std::ofstream out(path);
  nlifem::require(bool(out), "manifest: cannot write " + path);
  out << man.to_json().dump(2) << "\n";
}

int emit_report(const StudyReport& rep, const std::string& csv_path,
                const std::string& svg_path) {
  if (!csv_path.empty()) {
    nlifem::RunManifest man = nlifem::write_report(rep, csv_path, svg_path);
    write_manifest(man, csv_path);
    std::cout << "wrote " << csv_path;
    if (!svg_path.empty()) std::cout << " and " << svg_path;
    std::cout << "\n";
  } else {
    std::cout << nlifem::csv_string(rep);
  }
  for (const std::string& n : rep.notes) std::cout << "note: " << n << "\n";
  if (std::isfinite(rep.observed_order))
    std::cout << "observed order: " << rep.observed_order << "\n";
  std::cout << (rep.pass ? "PASS" : "FAIL") << "\n";
  return rep.pass ? 0 : 1;
}

int cmd_solve(const std::string& config_path, std::vector<std::string> overrides,
              const std::string& h_text, const std::string& dump_path) {
  if (!h_text.empty()) {
    double h = nlifem::parse_resolution(h_text);
    nlifem::require(h > 0.0, "solve: h must be positive");
    double lvl = -std::log2(h);
    nlifem::require(std::fabs(lvl - std::round(lvl)) < 1e-9,
                    "solve: h must be a power of two");
    overrides.push_back("levels=[" + std::to_string(int(std::round(lvl))) + "]");
  }
  overrides.push_back("kind=fixed_delta");
  StudyConfig cfg = build_config(config_path, overrides);
  if (cfg.k == 0) cfg.k = 1;
  nlifem::require(cfg.levels.size() == 1, "solve: exactly one level required (--h)");

  nlifem::Example ex = nlifem::resolve_example(cfg);
  if (cfg.delta.empty()) cfg.delta = ex.default_delta;
  nlifem::RegionMap rm = ex.regions(cfg.delta);
  nlifem::ProblemData data = nlifem::manufacture_data(ex.exact, rm);
  double h = std::ldexp(1.0, -cfg.levels[0]);
  nlifem::SolveInfo info;
  nlifem::Solution sol = nlifem::solve_problem(rm, h, cfg.k, cfg.coupling, data,
                                               cfg.quad_stiffness, &info);
  if (!dump_path.empty()) {
    nlifem::Mesh mesh = nlifem::build_mesh(rm, h);
    nlifem::DofMap dm = nlifem::build_dof_map(mesh, cfg.k, cfg.coupling);
    int p = 0;
    for (int f = 0; f < rm.n_fields(); ++f)
      p = std::max(p, rm.kernel(f).profile.degree());
    const nlifem::GaussRule& rule = nlifem::gauss_rule(
        cfg.quad_stiffness > 0 ? cfg.quad_stiffness : nlifem::stiffness_order(cfg.k, p));
    Eigen::MatrixXd A = nlifem::assemble_domain(dm, rule);
    A += nlifem::assemble_interface(dm, rule);
    nlifem::dump_matrix(A, dump_path);
    std::cout << "wrote " << dump_path << "\n";
  }
  nlifem::ErrorRecord rec = nlifem::measure_errors(sol, ex.exact);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "h=%.5e unknowns=%d err_energy=%.5e err_energy_omega=%.5e "
                "err_l2=%.5e err_max=%.5e\n",
                h, info.n_reduced, rec.energy, rec.energy_omega, rec.l2, rec.max);
  std::cout << buf;
  return 0;
}

int cmd_reproduce(const std::string& table, const std::string& config_path,
                  std::vector<std::string> overrides, std::string csv_path,
                  const std::string& svg_path) {
  struct TableSpec {
    const char* example;
    const char* kind;
  };
  TableSpec spec;
  if (table == "table1") spec = {"ex1", "fixed_delta"};
  else if (table == "table2") spec = {"ex1", "coupled"};
  else if (table == "table3") spec = {"ex2", "fixed_delta"};
  else if (table == "table4") spec = {"ex2", "coupled"};
  else if (table == "table5") spec = {"ex3", "fixed_delta"};
  else if (table == "table6") spec = {"ex3", "coupled"};
  else throw nlifem::config_error("reproduce: unknown table \"" + table +
                                  "\" (expected table1..table6)");

  json js = load_config_json(config_path);
  js["example"] = spec.example;
  js["kind"] = spec.kind;
  for (const std::string& t : overrides) nlifem::apply_override(js, t);

  if (csv_path.empty()) csv_path = table + ".csv";
  std::string body;
  nlifem::RunManifest man;
  man.timestamp = nlifem::iso_timestamp();
  char hash[24];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(nlifem::fnv1a64(js.dump())));
  man.config_hash = hash;

  std::vector<StudyReport> reps;
  for (int k = 1; k <= 3; ++k) {
    json jk = js;
    jk["k"] = k;
    StudyConfig cfg = nlifem::parse_config_json(jk);
    StudyReport rep = nlifem::run_study(cfg);
    body += "# k=" + std::to_string(k) + "\n" + nlifem::csv_string(rep);
    nlifem::manifest_add(man, rep);
    reps.push_back(std::move(rep));
  }
  {
    std::ofstream out(csv_path, std::ios::binary);
    nlifem::require(bool(out), "reproduce: cannot write " + csv_path);
    out << body;
  }
  man.outputs.push_back(csv_path);
  if (!svg_path.empty()) {
    std::string stem = svg_path, ext;
    auto dot = svg_path.rfind('.');
    if (dot != std::string::npos) {
      stem = svg_path.substr(0, dot);
      ext = svg_path.substr(dot);
    }
    for (const StudyReport& rep : reps) {
      std::string path = stem + "_k" + std::to_string(rep.cfg.k) + ext;
      std::ofstream out(path, std::ios::binary);
      nlifem::require(bool(out), "reproduce: cannot write " + path);
      out << nlifem::svg_string(rep);
      man.outputs.push_back(path);
    }
  }
  write_manifest(man, csv_path);
  std::cout << "wrote " << csv_path << "\n";
  for (const StudyReport& rep : reps) {
    std::cout << "k=" << rep.cfg.k << ": " << (rep.pass ? "PASS" : "FAIL");
    if (std::isfinite(rep.observed_order))
      std::cout << " (observed order " << rep.observed_order << ")";
    std::cout << "\n";
    for (const std::string& n : rep.notes) std::cout << "  note: " << n << "\n";
  }
  std::cout << (man.all_pass ? "PASS" : "FAIL") << "\n";
  return man.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(nlifem::tool_version()) +
               " — nonlocal interface FEM studies (set NLIFEM_THREADS to cap workers)"};
  app.require_subcommand(1);

  std::string config_path, csv_path, svg_path, h_text, dump_path, table;
  std::vector<std::string> ov;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--csv", csv_path, "CSV output path (default: stdout)");
    cmd->add_option("--svg", svg_path, "SVG output path");
    cmd->allow_extras();
    return cmd;
  };
  auto opt = [&](CLI::App* cmd, const char* flag, const char* key,
                 const char* help) {
    cmd->add_option_function<std::string>(
        flag, [&ov, key](const std::string& v) { ov.push_back(std::string(key) + "=" + v); },
        help);
  };

  CLI::App* solve = add_common(app.add_subcommand("solve", "single solve, prints the error record"));
  opt(solve, "--example", "example", "ex1|ex2|ex3|custom");
  opt(solve, "--k", "k", "polynomial degree");
  opt(solve, "--delta", "delta", "horizons, e.g. [0.25,0.5]");
  opt(solve, "--coupling", "coupling", "identified|decoupled");
  solve->add_option("--h", h_text, "mesh size, e.g. 2^-4 or 0.0625");
  solve->add_option("--dump-matrix", dump_path, "write the assembled matrix (coordinate format)");

  CLI::App* conv = add_common(app.add_subcommand("convergence", "h-refinement study"));
  opt(conv, "--example", "example", "ex1|ex2|ex3|custom");
  opt(conv, "--kind", "kind", "fixed_delta|coupled");
  opt(conv, "--k", "k", "polynomial degree");
  opt(conv, "--levels", "levels", "levels, e.g. [2,3,4,5]");
  opt(conv, "--delta", "delta", "fixed horizons");
  opt(conv, "--multiples", "multiples", "coupled horizon multiples of h");
  opt(conv, "--coupling", "coupling", "identified|decoupled");

  CLI::App* loc = add_common(app.add_subcommand("local-limit", "delta -> 0 limit study"));
  opt(loc, "--k", "k", "polynomial degree (>= 3)");
  opt(loc, "--halvings", "halvings", "number of delta halvings");
  opt(loc, "--delta1", "delta1", "starting horizon");
  opt(loc, "--ratio", "delta_ratio", "delta2/delta1");
  bool uncorrected = false;
  loc->add_flag("--uncorrected", uncorrected, "plain constant collar data");

  CLI::App* flux = add_common(app.add_subcommand("flux-check", "flux-operator consistency sweep"));
  opt(flux, "--example", "example", "ex1|ex2|ex3|custom");
  opt(flux, "--halvings", "halvings", "number of delta halvings");
  opt(flux, "--delta1", "delta1", "starting horizon");
  opt(flux, "--ratio", "delta_ratio", "delta2/delta1");

  CLI::App* maxp = add_common(app.add_subcommand("max-principle", "randomized compliance check"));
  opt(maxp, "--example", "example", "ex1|ex2|ex3|custom");
  opt(maxp, "--k", "k", "polynomial degree");
  opt(maxp, "--seeds", "seeds", "number of random problems");
  opt(maxp, "--rng-seed", "rng_seed", "base RNG seed");

  CLI::App* repro = add_common(app.add_subcommand("reproduce", "rerun a canned table config"));
  repro->add_option("table", table, "table1..table6")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) {
      collect_extras(solve, ov);
      return cmd_solve(config_path, ov, h_text, dump_path);
    }
    if (conv->parsed()) {
      collect_extras(conv, ov);
      StudyConfig cfg = build_config(config_path, ov);
      nlifem::require(cfg.kind == nlifem::StudyKind::fixed_delta ||
                          cfg.kind == nlifem::StudyKind::coupled,
                      "convergence: kind must be fixed_delta or coupled");
      return emit_report(nlifem::run_study(cfg), csv_path, svg_path);
    }
    if (loc->parsed()) {
      collect_extras(loc, ov);
      if (uncorrected) ov.push_back("corrected_bc=false");
      ov.push_back("kind=local_limit");
      StudyConfig cfg = build_config(config_path, ov);
      return emit_report(nlifem::run_local_limit(cfg), csv_path, svg_path);
    }
    if (flux->parsed()) {
      collect_extras(flux, ov);
      ov.push_back("kind=flux_consistency");
      StudyConfig cfg = build_config(config_path, ov);
      return emit_report(nlifem::run_flux_consistency(cfg), csv_path, svg_path);
    }
    if (maxp->parsed()) {
      collect_extras(maxp, ov);
      ov.push_back("kind=max_principle");
      StudyConfig cfg = build_config(config_path, ov);
      return emit_report(nlifem::run_max_principle(cfg), csv_path, svg_path);
    }
    if (repro->parsed()) {
      collect_extras(repro, ov);
      return cmd_reproduce(table, config_path, ov, csv_path, svg_path);
    }
  } catch (const nlifem::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
