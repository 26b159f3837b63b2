#pragma once

// Error measurement in the energy (delta) norm, L2 and max norms, plus
// observed convergence rates.  The delta norm mirrors the bilinear form
// exactly: domain pairs over Omega_i u I_i^D with weight 1/2 and the three
// interface pair terms per zone, with the squared difference of a scalar
// function in place of the basis products.

#include <cmath>
#include <limits>
#include <vector>

#include "nlifem/assembly.hpp"

namespace nlifem {

// squared delta-norm split into per-subdomain and per-interface parts
struct DeltaComponents {
  std::vector<double> domain;  // per field
  std::vector<double> gamma;   // per interface
  double total() const {
    double s = 0.0;
    for (double v : domain) s += v;
    for (double v : gamma) s += v;
    return s;
  }
};

namespace detail {

inline const GaussRule& norm_rule() { return gauss_rule(10); }

// sum of w * iint (f(x)-f(y))^2 gamma over the delta-norm pair structure
template <class F>
double delta_quadratic(const DofMap& dm, F&& fn, const GaussRule& rule,
                       bool include_collars, std::vector<double> breaks,
                       DeltaComponents* comp = nullptr) {
  const RegionMap& rm = dm.regions();
  const Mesh& mesh = dm.mesh;
  for (double al : rm.interfaces) breaks.push_back(al);
  DeltaComponents local;
  local.domain.assign(rm.n_fields(), 0.0);
  local.gamma.assign(rm.n_interfaces(), 0.0);

  auto pair_term = [&](int field, double alo, double ahi, double blo,
                       double bhi, double w, double& slot) {
    if (ahi <= alo || bhi <= blo) return;
    const KernelSpec& kern = rm.kernel(field);
    auto panels = decompose_pair(alo, ahi, blo, bhi, kern.delta, breaks);
    double acc = 0.0;
    for_each_pair_point(panels, rule, [&](double x, double y, double wq) {
      double g = kern.eval(x, y);
      if (g == 0.0) return;
      double d = fn(field, x, 0) - fn(field, y, 0);
      acc += wq * g * d * d;
    });
    slot += w * acc;
  };

  for (int f = 0; f < rm.n_fields(); ++f) {
    auto [dlo, dhi] = include_collars ? rm.dirichlet_domain(f) : rm.omega(f);
    double delta = rm.delta(f);
    const auto& elems = dm.field_elems[f];
    std::vector<std::pair<double, double>> clip;
    for (int e : elems)
      clip.push_back({std::max(mesh.elems[e].lo, dlo), std::min(mesh.elems[e].hi, dhi)});
    for (size_t i = 0; i < elems.size(); ++i) {
      if (clip[i].second <= clip[i].first) continue;
      for (size_t j = i; j < elems.size(); ++j) {
        if (clip[j].second <= clip[j].first) continue;
        if (clip[j].first - clip[i].second >= delta) break;
        pair_term(f, clip[i].first, clip[i].second, clip[j].first,
                  clip[j].second, 0.5 * (i == j ? 1.0 : 2.0), local.domain[f]);
      }
    }
  }

  for (int m = 0; m < rm.n_interfaces(); ++m) {
    const auto& z = rm.zones[m];
    pair_term(z.left_field, z.ijr_lo, z.ijr_hi, z.ijl_lo, z.ijl_hi, 0.5,
              local.gamma[m]);
    pair_term(z.right_field, z.ijr_lo, z.ijr_hi, z.ijl_lo, z.ijl_hi, 0.5,
              local.gamma[m]);
    if (z.has_oj)
      pair_term(z.right_field, z.ijr_lo, z.ijr_hi, z.oj_lo, z.oj_hi, 1.0,
                local.gamma[m]);
  }
  double total = local.total();
  if (comp) *comp = std::move(local);
  return total;
}

// sum_i int_{Omega_i} f_i^2
template <class F>
double l2_quadratic(const DofMap& dm, F&& fn, const GaussRule& rule,
                    std::vector<double> breaks,
                    std::vector<double>* per_field = nullptr) {
  const RegionMap& rm = dm.regions();
  const Mesh& mesh = dm.mesh;
  for (double al : rm.interfaces) breaks.push_back(al);
  if (per_field) per_field->assign(rm.n_fields(), 0.0);
  double total = 0.0;
  for (int f = 0; f < rm.n_fields(); ++f) {
    auto [olo, ohi] = rm.omega(f);
    double acc = 0.0;
    for (int e : dm.field_elems[f]) {
      double clo = std::max(mesh.elems[e].lo, olo);
      double chi = std::min(mesh.elems[e].hi, ohi);
      if (chi - clo <= 1e-12 * mesh.h) continue;
      for_each_interval_point(clo, chi, breaks, rule, [&](double x, double wq) {
        double v = fn(f, x, 0);
        acc += wq * v * v;
      });
    }
    total += acc;
    if (per_field) (*per_field)[f] += acc;
  }
  return total;
}

}  // namespace detail

struct ErrorRecord {
  double energy = 0.0;        // delta norm over Omega_i u I_i^D plus interface terms
  double energy_omega = 0.0;  // collar contributions excluded
  double l2 = 0.0;
  double max = 0.0;
  DeltaComponents energy_parts;  // squared breakdown of the inclusive norm
  std::vector<double> field_l2_sq;
};

inline ErrorRecord measure_errors(const Solution& sol,
                                  const std::vector<ScalarField>& exact) {
  const DofMap& dm = sol.dm;
  const RegionMap& rm = dm.regions();
  const GaussRule& rule = detail::norm_rule();

  std::vector<double> breaks;
  for (const auto& u : exact)
    for (double b : u.breakpoints()) breaks.push_back(b);

  auto err = [&](int field, double x, int side) {
    return sol.eval(field, x, side) - exact[field].eval(x, side);
  };

  ErrorRecord rec;
  rec.energy = std::sqrt(detail::delta_quadratic(dm, err, rule, true, breaks,
                                                 &rec.energy_parts));
  rec.energy_omega = std::sqrt(detail::delta_quadratic(dm, err, rule, false, breaks));
  rec.l2 = std::sqrt(detail::l2_quadratic(dm, err, rule, breaks, &rec.field_l2_sq));

  // max over Omega_i sampled at 16 points per element, endpoints side-steered
  double mx = 0.0;
  int ns = 15;
  for (int f = 0; f < rm.n_fields(); ++f) {
    auto [olo, ohi] = rm.omega(f);
    for (int e : dm.field_elems[f]) {
      double clo = std::max(dm.mesh.elems[e].lo, olo);
      double chi = std::min(dm.mesh.elems[e].hi, ohi);
      if (chi - clo <= 1e-12 * dm.mesh.h) continue;
      for (int s = 0; s <= ns; ++s) {
        double x = clo + (chi - clo) * s / ns;
        int side = (s == 0) ? +1 : (s == ns) ? -1 : 0;
        mx = std::max(mx, std::fabs(err(f, x, side)));
      }
    }
  }
  rec.max = mx;
  return rec;
}

// discrete delta norm squared of a coefficient vector (used by identity checks)
inline double delta_norm_sq(const DofMap& dm, const Eigen::VectorXd& coeffs,
                            DeltaComponents* comp = nullptr) {
  Solution s;
  s.dm = dm;
  s.coeffs = coeffs;
  auto fn = [&](int field, double x, int side) { return s.eval(field, x, side); };
  return detail::delta_quadratic(dm, fn, detail::norm_rule(), true, {}, comp);
}

inline double l2_norm_sq(const DofMap& dm, const Eigen::VectorXd& coeffs) {
  Solution s;
  s.dm = dm;
  s.coeffs = coeffs;
  auto fn = [&](int field, double x, int side) { return s.eval(field, x, side); };
  return detail::l2_quadratic(dm, fn, detail::norm_rule(), {});
}

// observed order between successive levels with h halved
inline double rate(double err_coarse, double err_fine) {
  if (!(err_coarse > 0.0) || !(err_fine > 0.0))
    return std::numeric_limits<double>::quiet_NaN();
  return std::log2(err_coarse / err_fine);
}

// sharp Poincare-type constant: ||v||_L2 <= C ||v||_delta with
// C = sqrt(sum_i |Omega_i|^2 / (2 sigma_i))
inline double poincare_constant(const RegionMap& rm) {
  double s = 0.0;
  for (int i = 0; i < rm.n_fields(); ++i) {
    auto [lo, hi] = rm.omega(i);
    double L = hi - lo;
    s += L * L / (2.0 * rm.sigma(i));
  }
  return std::sqrt(s);
}

}  // namespace nlifem
