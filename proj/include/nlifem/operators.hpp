#pragma once

// Pointwise nonlocal operator L_i, the interface flux operator F, their local
// counterparts, and manufactured-data generation from exact solution pairs.
//
// F is realized in the form the weak formulation is consistent with: every
// cross term pairs a field with its own kernel,
//   x in I_R^J:  F(x) = int_{Omega^J} [u_R(x)-u_R(y)] g_R dy
//                     + 1/2 int_{I_L^J} ([u_R(x)-u_R(y)] g_R - [u_L(x)-u_L(y)] g_L) dy
//   x in I_L^J:  F(x) = 1/2 int_{I_R^J} ([u_L(x)-u_L(y)] g_L - [u_R(x)-u_R(y)] g_R) dy
// For pairs with u_L = u_R on Gamma (zero jump) this coincides identically
// with the kernel-difference form; for independent smooth pairs it is the
// variant that converges at second order to the local flux jump.
// On Omega^J the reported value is int_{I_R^J} [u_R(x)-u_R(y)] g_R dy; it is
// generated for diagnostics but never assembled.

#include <cmath>
#include <vector>

#include "nlifem/common.hpp"
#include "nlifem/field.hpp"
#include "nlifem/kernel.hpp"
#include "nlifem/quadrature.hpp"
#include "nlifem/regions.hpp"

namespace nlifem {

namespace detail {
inline const GaussRule& inner_rule() { return gauss_rule(16); }

// int_{(ylo,yhi)} [u(x,side) - u(y)] gamma(x,y) dy with panel splits at the
// kernel edges, the kink y = x and the field's own breakpoints
inline double ball_integral(const ScalarField& u, const KernelSpec& k, double x,
                            int xside, double ylo, double yhi) {
  double c = std::max(ylo, x - k.delta);
  double d = std::min(yhi, x + k.delta);
  if (c >= d) return 0.0;
  double ux = u.eval(x, xside);
  std::vector<double> cuts = u.breakpoints();
  cuts.push_back(x);
  return integrate_interval(
      c, d, cuts,
      [&](double y) { return (ux - u.eval(y)) * k.eval(x, y); }, inner_rule());
}
}  // namespace detail

// L_i u(x) = int_region [u(x) - u(y)] gamma_delta(x,y) dy
inline double apply_nonlocal(const ScalarField& u, const KernelSpec& k,
                             double region_lo, double region_hi, double x,
                             int xside = 0) {
  return detail::ball_integral(u, k, x, xside, region_lo, region_hi);
}

inline double apply_local(const ScalarField& u, double sigma, double x,
                          int xside = 0) {
  return -sigma * u.deriv2(x, xside);
}

inline double local_flux_jump(double du1, double du2, double sigma1, double sigma2) {
  return sigma1 * du1 - sigma2 * du2;
}

// Flux operator of one interface; x must lie in Gamma or Omega^J of zone z.
inline double flux_at(const ScalarField& uL, const ScalarField& uR,
                      const KernelSpec& kL, const KernelSpec& kR,
                      const InterfaceZones& z, double x) {
  double tol = kGeomTol * std::max(1.0, std::fabs(z.alpha));
  if (x > z.ijr_lo - tol && x < z.alpha) {
    // x in I_R^J, below alpha
    double v = 0.0;
    if (z.has_oj)
      v += detail::ball_integral(uR, kR, x, -1, z.oj_lo, z.oj_hi);
    v += 0.5 * detail::ball_integral(uR, kR, x, -1, z.ijl_lo, z.ijl_hi);
    v -= 0.5 * detail::ball_integral(uL, kL, x, -1, z.ijl_lo, z.ijl_hi);
    return v;
  }
  if (x > z.alpha && x < z.ijl_hi + tol) {
    // x in I_L^J, above alpha
    double v = 0.5 * detail::ball_integral(uL, kL, x, +1, z.ijr_lo, z.ijr_hi);
    v -= 0.5 * detail::ball_integral(uR, kR, x, +1, z.ijr_lo, z.ijr_hi);
    return v;
  }
  if (z.has_oj && x >= z.oj_lo - tol && x < z.oj_hi + tol) {
    return detail::ball_integral(uR, kR, x, 0, z.ijr_lo, z.ijr_hi);
  }
  throw config_error("flux_at: x outside Gamma and Omega^J of this interface");
}

namespace detail {
inline std::vector<double> zone_breaks(const InterfaceZones& z,
                                       const ScalarField& uL,
                                       const ScalarField& uR, double dL,
                                       double dR) {
  std::vector<double> cuts = {z.alpha,          z.ijr_lo,         z.ijl_hi,
                              z.alpha - dL,     z.alpha + dR,     z.ijr_lo + dL,
                              z.ijr_lo + dR,    z.ijl_hi - dL,    z.ijl_hi - dR};
  if (z.has_oj) {
    cuts.push_back(z.oj_lo);
    cuts.push_back(z.oj_hi);
    cuts.push_back(z.oj_lo - dR);
    cuts.push_back(z.oj_hi - dR);
  }
  for (double c : uL.breakpoints()) {
    cuts.push_back(c);
    cuts.push_back(c - dL);
    cuts.push_back(c + dL);
    cuts.push_back(c - dR);
    cuts.push_back(c + dR);
  }
  for (double c : uR.breakpoints()) {
    cuts.push_back(c);
    cuts.push_back(c - dL);
    cuts.push_back(c + dL);
    cuts.push_back(c - dR);
    cuts.push_back(c + dR);
  }
  return sorted_unique(std::move(cuts), kGeomTol);
}
}  // namespace detail

// (F, v) over Gamma = int_{I_R^J} F v + int_{I_L^J} F v by nested quadrature
inline double flux_functional(const ScalarField& uL, const ScalarField& uR,
                              const KernelSpec& kL, const KernelSpec& kR,
                              const InterfaceZones& z, const ScalarField& v) {
  auto cuts = detail::zone_breaks(z, uL, uR, kL.delta, kR.delta);
  const GaussRule& rule = detail::inner_rule();
  auto integrand = [&](double x) {
    return flux_at(uL, uR, kL, kR, z, x) * v.eval(x);
  };
  double a = integrate_interval(z.ijr_lo, z.ijr_hi, cuts, integrand, rule);
  double b = integrate_interval(z.ijl_lo, z.ijl_hi, cuts, integrand, rule);
  return a + b;
}

// Same functional split into the five cross-zone double integrals; the two
// evaluation routes must agree to roundoff.
struct FluxDecomposition {
  double i1 = 0, i2 = 0, i3 = 0, i4 = 0, i5 = 0;
  double sum() const { return i1 + i2 + i3 + i4 + i5; }
};

inline FluxDecomposition flux_decomposition(const ScalarField& uL,
                                            const ScalarField& uR,
                                            const KernelSpec& kL,
                                            const KernelSpec& kR,
                                            const InterfaceZones& z,
                                            const ScalarField& v) {
  auto cuts = detail::zone_breaks(z, uL, uR, kL.delta, kR.delta);
  const GaussRule& rule = detail::inner_rule();
  auto outer = [&](double lo, double hi, const std::function<double(double)>& fn) {
    return integrate_interval(lo, hi, cuts, fn, rule);
  };
  FluxDecomposition d;
  if (z.has_oj) {
    d.i1 = outer(z.ijr_lo, z.ijr_hi, [&](double x) {
      return detail::ball_integral(uR, kR, x, -1, z.oj_lo, z.oj_hi) * v.eval(x, -1);
    });
  }
  d.i2 = outer(z.ijr_lo, z.ijr_hi, [&](double x) {
    return 0.5 * detail::ball_integral(uR, kR, x, -1, z.ijl_lo, z.ijl_hi) *
           v.eval(x, -1);
  });
  d.i3 = outer(z.ijr_lo, z.ijr_hi, [&](double x) {
    return -0.5 * detail::ball_integral(uL, kL, x, -1, z.ijl_lo, z.ijl_hi) *
           v.eval(x, -1);
  });
  d.i4 = outer(z.ijl_lo, z.ijl_hi, [&](double x) {
    return 0.5 * detail::ball_integral(uL, kL, x, +1, z.ijr_lo, z.ijr_hi) *
           v.eval(x, +1);
  });
  d.i5 = outer(z.ijl_lo, z.ijl_hi, [&](double x) {
    return -0.5 * detail::ball_integral(uR, kR, x, +1, z.ijr_lo, z.ijr_hi) *
           v.eval(x, +1);
  });
  return d;
}

struct ProblemData {
  std::vector<ScalarField> f;     // per field, on Omega_i
  std::vector<ScalarField> g;     // per field; only first/last are used
  std::vector<ScalarField> phi;   // per interface, on Gamma_m
  std::vector<ScalarField> psi1;  // per interface, on I_R^J (tests the left field)
  std::vector<ScalarField> psi2;  // per interface, on I_L^J (tests the right field)
};

// Builds (f, g, phi, psi) from exact per-field solutions: f_i by the nonlocal
// operator over the field's span, g_i as restrictions, phi as differences,
// psi branches from the flux operator. f and psi evaluate lazily.
inline ProblemData manufacture_data(const std::vector<ScalarField>& exact,
                                    const RegionMap& rm) {
  require(int(exact.size()) == rm.n_fields(),
          "manufacture_data: one exact field per subdomain required");
  ProblemData data;
  int nf = rm.n_fields();
  for (int i = 0; i < nf; ++i) {
    const ScalarField& u = exact[i];
    const KernelSpec k = rm.kernel(i);
    auto [slo, shi] = rm.span(i);
    auto [olo, ohi] = rm.omega(i);
    std::vector<double> cuts;
    for (double c : u.breakpoints()) {
      cuts.push_back(c);
      cuts.push_back(c - k.delta);
      cuts.push_back(c + k.delta);
    }
    cuts.push_back(olo);
    cuts.push_back(ohi);
    cuts = sorted_unique(std::move(cuts), kGeomTol);
    ScalarField f;
    double lo = -1e300;
    for (size_t c = 0; c <= cuts.size(); ++c) {
      double hi = (c < cuts.size()) ? cuts[c] : 1e300;
      ScalarField::Piece p;
      p.lo = lo;
      p.hi = hi;
      p.f = [u, k, slo, shi, lo, hi](double x) {
        double tol = 1e-12 * std::max(1.0, std::fabs(x));
        int side = 0;
        if (std::fabs(x - lo) <= tol) side = +1;
        else if (std::fabs(x - hi) <= tol) side = -1;
        return apply_nonlocal(u, k, slo, shi, x, side);
      };
      f.pieces.push_back(std::move(p));
      lo = hi;
    }
    data.f.push_back(std::move(f));
    data.g.push_back(u);
  }
  for (int m = 0; m < rm.n_interfaces(); ++m) {
    const InterfaceZones& z = rm.zones[m];
    const ScalarField uL = exact[z.left_field];
    const ScalarField uR = exact[z.right_field];
    const KernelSpec kL = rm.kernel(z.left_field);
    const KernelSpec kR = rm.kernel(z.right_field);
    data.phi.push_back(field_difference(uL, uR));
    auto cuts = detail::zone_breaks(z, uL, uR, kL.delta, kR.delta);
    auto make_psi = [&](double zone_lo, double zone_hi) {
      ScalarField psi;
      std::vector<double> local_cuts;
      for (double c : cuts)
        if (c > zone_lo + kGeomTol && c < zone_hi - kGeomTol) local_cuts.push_back(c);
      double lo = zone_lo;
      for (size_t c = 0; c <= local_cuts.size(); ++c) {
        double hi = (c < local_cuts.size()) ? local_cuts[c] : zone_hi;
        ScalarField::Piece p;
        p.lo = lo;
        p.hi = hi;
        p.f = [uL, uR, kL, kR, z](double x) {
          return flux_at(uL, uR, kL, kR, z, x);
        };
        psi.pieces.push_back(std::move(p));
        lo = hi;
      }
      return psi;
    };
    data.psi1.push_back(make_psi(z.ijr_lo, z.ijr_hi));
    data.psi2.push_back(make_psi(z.ijl_lo, z.ijl_hi));
  }
  return data;
}

}  // namespace nlifem
