#pragma once

// Region decomposition for the multi-interface problem: subdomains Omega_i,
// Dirichlet collars I_1^D and I_n^D, and per-interface zones
//   I^J_left  = (alpha, alpha + delta_L)   (left field's reach past alpha)
//   I^J_right = (alpha - delta_R, alpha)   (right field's reach below alpha)
//   Gamma     = (alpha - delta_R, alpha + delta_L)
//   Omega^J   = (alpha + delta_L, alpha + delta_R)   when delta_L < delta_R

#include <string>
#include <utility>
#include <vector>

#include "nlifem/common.hpp"
#include "nlifem/kernel.hpp"

namespace nlifem {

struct Subdomain {
  double lo = 0.0, hi = 0.0;
  KernelSpec kernel;
};

struct InterfaceZones {
  double alpha = 0.0;
  int left_field = 0, right_field = 0;
  double ijl_lo = 0.0, ijl_hi = 0.0;  // I^J of the left field
  double ijr_lo = 0.0, ijr_hi = 0.0;  // I^J of the right field
  double gamma_lo = 0.0, gamma_hi = 0.0;
  double oj_lo = 0.0, oj_hi = 0.0;  // extended zone, valid iff has_oj
  bool has_oj = false;

  // outermost reach of all zones of this interface
  double extent_lo() const { return gamma_lo; }
  double extent_hi() const { return has_oj ? oj_hi : gamma_hi; }
};

struct RegionMap {
  double a = 0.0, b = 0.0;
  std::vector<double> interfaces;
  std::vector<Subdomain> subdomains;
  std::vector<InterfaceZones> zones;
  // true when zones of distinct interfaces overlap (identification then
  // chains across interfaces; handled, but surfaced as a report warning)
  bool zones_overlap = false;

  int n_fields() const { return int(subdomains.size()); }
  int n_interfaces() const { return int(interfaces.size()); }
  double delta(int i) const { return subdomains[i].kernel.delta; }
  double sigma(int i) const { return subdomains[i].kernel.sigma; }
  const KernelSpec& kernel(int i) const { return subdomains[i].kernel; }

  std::pair<double, double> omega(int i) const {
    return {subdomains[i].lo, subdomains[i].hi};
  }

  // Omega_i together with its Dirichlet collar (only the first and last
  // fields own one); a single interval in all cases
  std::pair<double, double> dirichlet_domain(int i) const {
    double lo = (i == 0) ? a - delta(0) : subdomains[i].lo;
    double hi = (i == n_fields() - 1) ? b + delta(i) : subdomains[i].hi;
    return {lo, hi};
  }

  // full active span Omega_i with all interaction zones attached
  std::pair<double, double> span(int i) const {
    return {subdomains[i].lo - delta(i), subdomains[i].hi + delta(i)};
  }

  std::pair<double, double> left_collar() const { return {a - delta(0), a}; }
  std::pair<double, double> right_collar() const {
    return {b, b + delta(n_fields() - 1)};
  }
};

inline RegionMap build_regions(double a, double b,
                               const std::vector<double>& interfaces,
                               const std::vector<KernelSpec>& kernels) {
  require(b > a, "regions: need b > a");
  require(kernels.size() == interfaces.size() + 1,
          "regions: need one kernel per subdomain (interfaces + 1)");
  RegionMap rm;
  rm.a = a;
  rm.b = b;
  rm.interfaces = interfaces;

  double prev = a;
  for (size_t m = 0; m < interfaces.size(); ++m) {
    require(interfaces[m] > prev, "regions: interfaces must be ordered inside (a,b)");
    prev = interfaces[m];
  }
  require(interfaces.empty() || interfaces.back() < b,
          "regions: interface outside (a,b)");

  int n = int(kernels.size());
  for (int i = 0; i < n; ++i) {
    Subdomain s;
    s.lo = (i == 0) ? a : interfaces[i - 1];
    s.hi = (i == n - 1) ? b : interfaces[i];
    s.kernel = kernels[i];
    rm.subdomains.push_back(s);
  }

  for (size_t m = 0; m < interfaces.size(); ++m) {
    InterfaceZones z;
    z.alpha = interfaces[m];
    z.left_field = int(m);
    z.right_field = int(m) + 1;
    double dl = kernels[m].delta, dr = kernels[m + 1].delta;
    z.ijl_lo = z.alpha;
    z.ijl_hi = z.alpha + dl;
    z.ijr_lo = z.alpha - dr;
    z.ijr_hi = z.alpha;
    z.gamma_lo = z.ijr_lo;
    z.gamma_hi = z.ijl_hi;
    z.has_oj = dl < dr;
    if (z.has_oj) {
      z.oj_lo = z.alpha + dl;
      z.oj_hi = z.alpha + dr;
    }
    rm.zones.push_back(z);
  }

  // Gamma (where test functions act) must lie strictly inside (a,b); the
  // overflow zone only carries solution values, so it may reach into the right
  // collar but never past the meshed span
  double mesh_lo = a - kernels.front().delta;
  double mesh_hi = b + kernels.back().delta;
  for (auto& z : rm.zones) {
    require(z.gamma_lo > a && z.gamma_hi < b,
            "regions: interaction zone of alpha=" + std::to_string(z.alpha) +
                " exits the domain interior");
    require(z.extent_lo() >= mesh_lo - kGeomTol && z.extent_hi() <= mesh_hi + kGeomTol,
            "regions: zone of alpha=" + std::to_string(z.alpha) +
                " reaches beyond the meshed span");
    auto spl = rm.span(z.left_field);
    auto spr = rm.span(z.right_field);
    require(z.gamma_lo >= spl.first - kGeomTol && z.gamma_hi <= spr.second + kGeomTol,
            "regions: zone of alpha=" + std::to_string(z.alpha) +
                " reaches beyond an adjacent subdomain span");
  }
  for (size_t m = 0; m + 1 < rm.zones.size(); ++m) {
    if (rm.zones[m].extent_hi() >= rm.zones[m + 1].extent_lo()) rm.zones_overlap = true;
  }
  return rm;
}

}  // namespace nlifem
