#pragma once

// Built-in exact-solution examples and their local counterparts. Each example
// fixes the domain, the interface locations, one kernel profile per field and
// a default set of horizons; the exact branch formulas come with analytic
// first and second derivatives so that energy norms and local-limit data can
// be formed without finite differencing.

#include <cmath>
#include <string>
#include <vector>

#include "nlifem/common.hpp"
#include "nlifem/field.hpp"
#include "nlifem/kernel.hpp"
#include "nlifem/regions.hpp"

namespace nlifem {

struct Example {
  std::string id;
  double a = 0, b = 1;
  std::vector<double> interfaces;
  std::vector<KernelProfile::Kind> profiles;  // per field
  std::vector<double> default_delta;          // per field
  std::vector<int> default_multiples;         // per field, coupled studies
  std::vector<ScalarField> exact;             // per field

  int n_fields() const { return int(profiles.size()); }

  RegionMap regions(const std::vector<double>& deltas) const {
    require(deltas.size() == profiles.size(),
            "example: one delta per subdomain required");
    std::vector<KernelSpec> ks;
    for (size_t i = 0; i < profiles.size(); ++i)
      ks.push_back(make_kernel(profiles[i], {}, deltas[i]));
    return build_regions(a, b, interfaces, ks);
  }
};

// Data for the delta -> 0 study: the solution of -sigma_i u'' = f0_i with the
// matching interface jump data.
struct LocalCounterpart {
  std::vector<ScalarField> u0;  // per field, smooth branches
  std::vector<ScalarField> f0;  // per field, -sigma u0''
  std::vector<double> sigma;
  double alpha;
  double psi0;  // sigma_1 u01'(alpha) - sigma_2 u02'(alpha)
};

namespace detail {

inline ScalarField::Piece piece(double lo, double hi, Fn f, Fn df, Fn d2f) {
  ScalarField::Piece p;
  p.lo = lo;
  p.hi = hi;
  p.f = std::move(f);
  p.df = std::move(df);
  p.d2f = std::move(d2f);
  return p;
}

inline ScalarField::Piece const_piece(double lo, double hi, double c) {
  return piece(
      lo, hi, [c](double) { return c; }, [](double) { return 0.0; },
      [](double) { return 0.0; });
}

constexpr double kInf = 1e300;

}  // namespace detail

inline Example example_ex1() {
  using detail::const_piece;
  using detail::piece;
  double alpha = M_PI / 6.0;
  Example ex;
  ex.id = "ex1";
  ex.a = 0.0;
  ex.b = 1.0;
  ex.interfaces = {alpha};
  ex.profiles = {KernelProfile::Kind::Triangular, KernelProfile::Kind::Triangular};
  ex.default_delta = {0.25, 0.5};
  ex.default_multiples = {2, 4};

  auto sinp = piece(
      0.0, alpha, [](double x) { return std::sin(x); },
      [](double x) { return std::cos(x); },
      [](double x) { return -std::sin(x); });
  auto upper = [](double lo, double hi) {
    return piece(
        lo, hi, [](double x) { return 1.5 - 2.0 * std::sin(x); },
        [](double x) { return -2.0 * std::cos(x); },
        [](double x) { return 2.0 * std::sin(x); });
  };

  ScalarField u1;
  u1.pieces = {const_piece(-detail::kInf, 0.0, 0.0), sinp,
               upper(alpha, detail::kInf)};

  ScalarField u2;
  auto sinp2 = sinp;
  sinp2.lo = -detail::kInf;
  u2.pieces = {sinp2, upper(alpha, 1.0),
               const_piece(1.0, detail::kInf, 1.5 - 2.0 * std::sin(1.0))};

  ex.exact = {u1, u2};
  return ex;
}

inline Example example_ex2() {
  using detail::const_piece;
  using detail::piece;
  double alpha = M_PI / 2.0;
  Example ex;
  ex.id = "ex2";
  ex.a = 1.0;
  ex.b = 2.0;
  ex.interfaces = {alpha};
  ex.profiles = {KernelProfile::Kind::Constant, KernelProfile::Kind::Constant};
  ex.default_delta = {0.25, 0.5};
  ex.default_multiples = {2, 4};

  auto expp = [](double lo, double hi) {
    return piece(
        lo, hi, [](double x) { return std::exp(x); },
        [](double x) { return std::exp(x); },
        [](double x) { return std::exp(x); });
  };
  auto cosp = [](double lo, double hi) {
    return piece(
        lo, hi, [](double x) { return std::cos(x); },
        [](double x) { return -std::sin(x); },
        [](double x) { return -std::cos(x); });
  };

  ScalarField u1;
  u1.pieces = {const_piece(-detail::kInf, 1.0, std::exp(1.0)), expp(1.0, alpha),
               cosp(alpha, detail::kInf)};

  ScalarField u2;
  u2.pieces = {expp(-detail::kInf, alpha), cosp(alpha, 2.0),
               const_piece(2.0, detail::kInf, std::cos(2.0))};

  ex.exact = {u1, u2};
  return ex;
}

inline Example example_ex3() {
  using detail::const_piece;
  using detail::piece;
  double a1 = M_PI / 4.0, a2 = 2.0 * M_PI / 5.0;
  Example ex;
  ex.id = "ex3";
  ex.a = 0.0;
  ex.b = 2.0;
  ex.interfaces = {a1, a2};
  ex.profiles = {KernelProfile::Kind::Parabolic, KernelProfile::Kind::Parabolic,
                 KernelProfile::Kind::Parabolic};
  ex.default_delta = {0.125, 0.25, 0.5};
  ex.default_multiples = {1, 2, 3};

  auto cosp = [](double lo, double hi) {
    return piece(
        lo, hi, [](double x) { return 0.5 * std::cos(M_PI * x); },
        [](double x) { return -0.5 * M_PI * std::sin(M_PI * x); },
        [](double x) { return -0.5 * M_PI * M_PI * std::cos(M_PI * x); });
  };
  auto sinp = [](double lo, double hi) {
    return piece(
        lo, hi, [](double x) { return 1.0 - std::sin(M_PI * x); },
        [](double x) { return -M_PI * std::cos(M_PI * x); },
        [](double x) { return M_PI * M_PI * std::sin(M_PI * x); });
  };
  auto quadp = [](double lo, double hi) {
    return piece(
        lo, hi, [](double x) { return x * (1.0 - x) + 1.0; },
        [](double x) { return 1.0 - 2.0 * x; }, [](double) { return -2.0; });
  };

  ScalarField u1;
  u1.pieces = {const_piece(-detail::kInf, 0.0, 0.5), cosp(0.0, a1),
               sinp(a1, detail::kInf)};

  ScalarField u2;
  u2.pieces = {cosp(-detail::kInf, a1), sinp(a1, a2), quadp(a2, detail::kInf)};

  ScalarField u3;
  u3.pieces = {sinp(-detail::kInf, a2), quadp(a2, 2.0),
               const_piece(2.0, detail::kInf, -1.0)};

  ex.exact = {u1, u2, u3};
  return ex;
}

inline const Example& get_example(const std::string& id) {
  static const Example e1 = example_ex1();
  static const Example e2 = example_ex2();
  static const Example e3 = example_ex3();
  if (id == "ex1") return e1;
  if (id == "ex2") return e2;
  if (id == "ex3") return e3;
  throw config_error("unknown example id '" + id + "' (expected ex1|ex2|ex3)");
}

// Local interface problem matching ex1: -u''/2 = f0 on each side, continuous
// solution, flux jump psi0 at alpha.
inline LocalCounterpart local_counterpart_ex1() {
  using detail::piece;
  double alpha = M_PI / 6.0;
  LocalCounterpart lc;
  lc.alpha = alpha;
  lc.sigma = {0.5, 0.5};

  ScalarField u01;
  u01.pieces = {piece(
      -detail::kInf, detail::kInf, [](double x) { return std::sin(x); },
      [](double x) { return std::cos(x); },
      [](double x) { return -std::sin(x); })};

  ScalarField u02;
  u02.pieces = {piece(
      -detail::kInf, detail::kInf,
      [](double x) { return 1.5 - 2.0 * std::sin(x); },
      [](double x) { return -2.0 * std::cos(x); },
      [](double x) { return 2.0 * std::sin(x); })};

  lc.u0 = {u01, u02};
  lc.f0 = {ScalarField::smooth([](double x) { return 0.5 * std::sin(x); }),
           ScalarField::smooth([](double x) { return -std::sin(x); })};
  lc.psi0 = lc.sigma[0] * std::cos(alpha) - lc.sigma[1] * (-2.0 * std::cos(alpha));
  return lc;
}

inline LocalCounterpart local_counterpart(const std::string& id) {
  if (id == "ex1") return local_counterpart_ex1();
  throw config_error("no local counterpart with derivative handles for '" + id + "'");
}

}  // namespace nlifem
