// Acceptance gate: runs the table reproductions, the operator consistency
// sweeps, and the property suite; prints exactly one PASS/FAIL line per
// criterion and exits with the number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "nlifem/assembly.hpp"
#include "nlifem/examples.hpp"
#include "nlifem/norms.hpp"
#include "nlifem/studies.hpp"

using namespace nlifem;

namespace {

int g_failed = 0;

double now_s() {
  using clk = std::chrono::steady_clock;
  return std::chrono::duration<double>(clk::now().time_since_epoch()).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

void report(int n, bool ok, const std::string& detail) {
  if (!ok) ++g_failed;
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", n, detail.c_str());
  std::fflush(stdout);
}

bool band(double r, double target, double tol = 0.3) {
  return std::isfinite(r) && std::fabs(r - target) <= tol;
}

bool within_factor(double v, double target, double factor = 5.0) {
  return std::isfinite(v) && v >= target / factor && v <= target * factor;
}

StudyConfig table_config(const std::string& example, StudyKind kind, int k) {
  StudyConfig cfg;
  cfg.example = example;
  cfg.kind = kind;
  cfg.k = k;
  return cfg;  // levels/delta/multiples resolve to the canned table setup
}

// fixed-horizon tables: both norms at order k+1, judged at the two finest rows
bool check_fixed(const std::string& example, std::string& detail) {
  bool ok = true;
  for (int k = 1; k <= 3; ++k) {
    StudyReport rep = run_study(table_config(example, StudyKind::fixed_delta, k));
    size_t n = rep.rows.size();
    const StudyRow& r1 = rep.rows[n - 2];
    const StudyRow& r2 = rep.rows[n - 1];
    bool okk = band(r1.rate_l2, k + 1.0) && band(r2.rate_l2, k + 1.0) &&
               band(r1.rate_energy, k + 1.0) && band(r2.rate_energy, k + 1.0);
    ok = ok && okk;
    detail += fmt("k=%d E[%.2f,%.2f] L2[%.2f,%.2f] ", k, r1.rate_energy,
                  r2.rate_energy, r1.rate_l2, r2.rate_l2);
  }
  return ok;
}

// coupled-horizon tables: energy at order k, L2 at order k+1, finest row
bool check_coupled(const std::string& example, std::string& detail) {
  bool ok = true;
  for (int k = 1; k <= 3; ++k) {
    StudyReport rep = run_study(table_config(example, StudyKind::coupled, k));
    const StudyRow& last = rep.rows.back();
    bool okk = band(last.rate_energy, double(k)) && band(last.rate_l2, k + 1.0);
    ok = ok && okk;
    detail += fmt("k=%d E%.2f L2%.2f ", k, last.rate_energy, last.rate_l2);
  }
  return ok;
}

void criterion_1() {
  double t0 = now_s();
  bool ok = true;
  std::string detail = "fixed horizons ex1: ";
  double anchor_e = 0.0, anchor_l2 = 0.0;
  for (int k = 1; k <= 3; ++k) {
    StudyReport rep = run_study(table_config("ex1", StudyKind::fixed_delta, k));
    size_t n = rep.rows.size();
    const StudyRow& r1 = rep.rows[n - 2];
    const StudyRow& r2 = rep.rows[n - 1];
    ok = ok && band(r1.rate_l2, k + 1.0) && band(r2.rate_l2, k + 1.0) &&
         band(r1.rate_energy, k + 1.0) && band(r2.rate_energy, k + 1.0);
    detail += fmt("k=%d E[%.2f,%.2f] L2[%.2f,%.2f] ", k, r1.rate_energy,
                  r2.rate_energy, r1.rate_l2, r2.rate_l2);
    if (k == 1) {
      anchor_e = r2.err_energy;
      anchor_l2 = r2.err_l2;
    }
  }
  bool anchors = within_factor(anchor_e, 2.82e-4) && within_factor(anchor_l2, 7.94e-5);
  ok = ok && anchors;
  detail += fmt("anchors E=%.2e L2=%.2e%s ", anchor_e, anchor_l2,
                anchors ? "" : " (outside x5)");
  double el = now_s() - t0;
  ok = ok && el <= 120.0;
  report(1, ok, detail + fmt("(%.1fs/120s)", el));
}

void criterion_2() {
  std::string detail = "coupled horizons ex1 (2h,4h): ";
  bool ok = check_coupled("ex1", detail);
  report(2, ok, detail);
}

void criterion_3() {
  std::string detail = "ex2 fixed: ";
  bool ok = check_fixed("ex2", detail);
  detail += "| coupled: ";
  ok = check_coupled("ex2", detail) && ok;
  report(3, ok, detail);
}

void criterion_4() {
  std::string detail = "ex3 fixed: ";
  bool ok = check_fixed("ex3", detail);
  detail += "| coupled: ";
  ok = check_coupled("ex3", detail) && ok;
  report(4, ok, detail);
}

void criterion_5() {
  double t0 = now_s();
  StudyConfig cfg;
  cfg.kind = StudyKind::flux_consistency;
  cfg.halvings = 4;
  cfg.delta1 = 0.25;
  cfg.delta_ratio = 2.0;
  StudyReport rep = run_study(cfg);
  double el = now_s() - t0;
  bool ok = band(rep.observed_order, 2.0) && el <= 10.0;
  report(5, ok,
         fmt("flux functional vs local jump: order %.3f (target 2.0+-0.3, %.1fs/10s)",
             rep.observed_order, el));
}

void criterion_6() {
  double t0 = now_s();
  StudyConfig cfg;
  cfg.kind = StudyKind::local_limit;
  cfg.halvings = 4;
  cfg.delta1 = 0.25;
  cfg.k = 3;
  StudyReport corr = run_study(cfg);
  cfg.corrected_bc = false;
  StudyReport plain = run_study(cfg);
  double el = now_s() - t0;
  bool ok = band(corr.observed_order, 2.0) && plain.observed_order < 1.5 &&
            el <= 60.0;
  report(6, ok,
         fmt("local limit: corrected order %.3f (target 2.0+-0.3), uncorrected "
             "%.3f (< 1.5), %.1fs/60s",
             corr.observed_order, plain.observed_order, el));
}

// --- criterion 7: property suite ------------------------------------------

struct Assembled {
  DofMap dm;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  ProblemData data;
};

Assembled assemble_ex1(double h, int k) {
  const Example& ex = get_example("ex1");
  RegionMap rm = ex.regions({0.25, 0.5});
  Mesh mesh = build_mesh(rm, h);
  DofMap dm = build_dof_map(mesh, k, Coupling::identified);
  const GaussRule& rule = gauss_rule(stiffness_order(k, 2));
  Assembled out{dm, assemble_domain(dm, rule) + assemble_interface(dm, rule),
                Eigen::VectorXd(), manufacture_data(ex.exact, rm)};
  out.b = assemble_load(dm, out.data, gauss_rule(10));
  return out;
}

bool prop_symmetry(std::string& log) {
  Assembled as = assemble_ex1(0.0625, 2);
  double d = (as.A - as.A.transpose()).lpNorm<Eigen::Infinity>();
  if (d < 1e-12) return true;
  log += fmt("[symmetry %.1e] ", d);
  return false;
}

bool prop_spd(std::string& log) {
  int checked = 0;
  for (const char* id : {"ex1", "ex2", "ex3"}) {
    const Example& ex = get_example(id);
    for (StudyKind kind : {StudyKind::fixed_delta, StudyKind::coupled}) {
      bool coupled = kind == StudyKind::coupled;
      for (int k = 1; k <= 3; ++k) {
        for (int lvl : detail::default_levels(ex, coupled)) {
          double h = std::ldexp(1.0, -lvl);
          std::vector<double> deltas;
          if (coupled)
            for (int m : ex.default_multiples) deltas.push_back(m * h);
          else
            deltas = ex.default_delta;
          RegionMap rm = ex.regions(deltas);
          Mesh mesh = build_mesh(rm, h);
          DofMap dm = build_dof_map(mesh, k, Coupling::identified);
          const GaussRule& rule = gauss_rule(stiffness_order(k, 2));
          Eigen::MatrixXd A = assemble_domain(dm, rule) + assemble_interface(dm, rule);
          ProblemData data = manufacture_data(ex.exact, rm);
          Eigen::VectorXd b = assemble_load(dm, data, gauss_rule(10));
          ReducedSystem rs = apply_constraints(A, b, dm, data);
          Eigen::LLT<Eigen::MatrixXd> llt(rs.A);
          if (llt.info() != Eigen::Success) {
            log += fmt("[spd %s %s k=%d lvl=%d] ", id,
                       coupled ? "coupled" : "fixed", k, lvl);
            return false;
          }
          ++checked;
        }
      }
    }
  }
  log += fmt("(spd %d levels) ", checked);
  return true;
}

bool prop_constants(std::string& log) {
  const Example& ex = get_example("ex1");
  RegionMap rm = ex.regions({0.25, 0.5});
  ProblemData data;
  for (int i = 0; i < 2; ++i) {
    data.f.push_back(ScalarField::constant(0.0));
    data.g.push_back(ScalarField::constant(3.7));
  }
  data.phi.push_back(ScalarField::constant(0.0));
  data.psi1.push_back(ScalarField::constant(0.0));
  data.psi2.push_back(ScalarField::constant(0.0));
  Solution sol = solve_problem(rm, 0.125, 1, Coupling::identified, data);
  double worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    auto [lo, hi] = rm.span(i);
    for (int s = 0; s <= 200; ++s) {
      double x = lo + (hi - lo) * s / 200.0;
      int side = (s == 0) ? +1 : (s == 200) ? -1 : 0;
      worst = std::max(worst, std::fabs(sol.eval(i, x, side) - 3.7));
    }
  }
  if (worst <= 1e-12 * 3.7) return true;
  log += fmt("[constants %.1e] ", worst);
  return false;
}

bool prop_energy_identity(std::string& log) {
  Assembled as = assemble_ex1(0.0625, 2);
  std::mt19937 rng(7231);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd v(as.dm.n_dofs());
    for (int i = 0; i < v.size(); ++i) v[i] = U(rng);
    double quad = v.dot(as.A * v);
    double nrm = delta_norm_sq(as.dm, v);
    if (std::fabs(quad - nrm) > 1e-10 * std::max(1.0, std::fabs(quad))) {
      log += fmt("[energy-id %.1e vs %.1e] ", quad, nrm);
      return false;
    }
  }
  return true;
}

bool prop_brute_force(std::string& log) {
  // adaptive double integration of the bilinear form on a 4-element mesh over
  // (0,1/2) with a constant kernel, delta = h = 1/4; entries are exact rationals
  const double kBrute[5][5] = {
      {1.00, -0.75, -0.25, 0.00, 0.00},
      {-0.75, 2.00, -1.00, -0.25, 0.00},
      {-0.25, -1.00, 2.50, -1.00, -0.25},
      {0.00, -0.25, -1.00, 2.00, -0.75},
      {0.00, 0.00, -0.25, -0.75, 1.00},
  };
  RegionMap rm = build_regions(0.0, 0.5, {}, {make_kernel("constant", 0.25)});
  Mesh mesh = build_mesh(rm, 0.25);
  DofMap dm = build_dof_map(mesh, 1, Coupling::identified);
  Eigen::MatrixXd A = assemble_domain(dm, gauss_rule(stiffness_order(1, 0)));
  std::vector<int> perm(5, -1);
  for (int d = 0; d < 5; ++d)
    perm[int(std::round((dm.dofs[d].x + 0.25) / 0.25))] = d;
  double worst = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      worst = std::max(worst, std::fabs(A(perm[i], perm[j]) - kBrute[i][j]));
  if (worst <= 1e-8) return true;
  log += fmt("[brute-force %.1e] ", worst);
  return false;
}

bool prop_flux_decomposition(std::string& log) {
  const Example& ex = get_example("ex1");
  double alpha = ex.interfaces[0];
  ScalarField uL = detail::smooth_branch(ex.exact[0], 0.5 * alpha);
  ScalarField uR = detail::smooth_branch(ex.exact[1], 0.5 * (alpha + ex.b));
  ScalarField one = ScalarField::constant(1.0);
  KernelSpec kL = make_kernel(ex.profiles[0], {}, 0.25);
  KernelSpec kR = make_kernel(ex.profiles[1], {}, 0.5);
  InterfaceZones z = detail::make_zone(alpha, 0, 1, 0.25, 0.5);
  double fn = flux_functional(uL, uR, kL, kR, z, one);
  double dec = flux_decomposition(uL, uR, kL, kR, z, one).sum();
  if (std::fabs(fn - dec) <= 1e-10 * std::max(1.0, std::fabs(fn))) return true;
  log += fmt("[flux-decomp %.1e] ", std::fabs(fn - dec));
  return false;
}

bool prop_moment_identity(std::string& log) {
  const double alpha = 0.4;
  ScalarField q = ScalarField::smooth(
      [alpha](double x) { return (x - alpha) * (x - alpha); },
      [alpha](double x) { return 2.0 * (x - alpha); },
      [](double) { return 2.0; });
  for (const char* name : {"constant", "triangular", "parabolic"}) {
    KernelSpec kern = make_kernel(name, 0.25);
    double lhs = apply_nonlocal(q, kern, alpha - 0.25, alpha + 0.25, alpha);
    if (std::fabs(lhs + 2.0 * kern.sigma) > 1e-10 * 2.0 * kern.sigma) {
      log += fmt("[moment %s %.1e] ", name, std::fabs(lhs + 2.0 * kern.sigma));
      return false;
    }
  }
  return true;
}

bool prop_max_principle(std::string& log) {
  StudyConfig cfg;
  cfg.kind = StudyKind::max_principle;
  cfg.seeds = 20;
  StudyReport rep = run_study(cfg);
  double worst = 0.0;
  for (const StudyRow& row : rep.rows) worst = std::max(worst, row.err_max);
  if (rep.pass && worst <= 1e-9) return true;
  log += fmt("[max-principle violation %.1e] ", worst);
  return false;
}

bool prop_poincare(std::string& log) {
  const Example& ex = get_example("ex1");
  RegionMap rm = ex.regions({0.25, 0.5});
  Assembled as = assemble_ex1(0.0625, 2);
  double cp = poincare_constant(rm);
  std::mt19937 rng(40923);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  ConstraintSet cons = build_constraints(as.dm, as.data);
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd vr(cons.n_reduced);
    for (int i = 0; i < vr.size(); ++i) vr[i] = U(rng);
    Eigen::VectorXd v = prolong_homogeneous(as.dm, vr);
    double l2 = std::sqrt(l2_norm_sq(as.dm, v));
    double en = std::sqrt(delta_norm_sq(as.dm, v));
    if (l2 > cp * en + 1e-10) {
      log += fmt("[poincare %.6f > %.6f*%.6f] ", l2, cp, en);
      return false;
    }
  }
  return true;
}

void criterion_7() {
  std::string log;
  bool ok = true;
  ok = prop_symmetry(log) && ok;
  ok = prop_spd(log) && ok;
  ok = prop_constants(log) && ok;
  ok = prop_energy_identity(log) && ok;
  ok = prop_brute_force(log) && ok;
  ok = prop_flux_decomposition(log) && ok;
  ok = prop_moment_identity(log) && ok;
  ok = prop_max_principle(log) && ok;
  ok = prop_poincare(log) && ok;
  report(7, ok,
         "properties: symmetry, SPD, constants, energy identity, brute-force "
         "oracle, flux decomposition, moment identity, max principle, Poincare " +
             log);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  return g_failed;
}
