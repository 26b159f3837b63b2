#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nlifem/examples.hpp"
#include "nlifem/operators.hpp"

using namespace nlifem;
using Catch::Approx;

namespace {

const double kAlpha = M_PI / 6.0;

// adaptive-quadrature references, computed independently from the defining
// integrals with explicit splits at every kink
const double kF1Ex1 = 0.15964505739757251;    // L_1 u_1 at x = 0.3, ex1
const double kF2Ex1 = -0.64324517643211099;   // L_2 u_2 at x = 0.8, ex1
const double kPsi1Ex1 = 0.728337239234635;    // F(alpha - 0.1), exact ex1 pair
const double kPsi2Ex1 = -0.88955830010509418; // F(alpha + 0.1), exact ex1 pair
const double kFluxLo = 2.9940467585300916;    // F(alpha - 0.1), smooth pair
const double kFluxHi = 2.6826994871201029;    // F(alpha + 0.1), smooth pair
const double kFluxFnl = 1.2909522493515997;   // (F, 1) over Gamma, smooth pair
const double kF1Ex2 = 62.355070934701033;     // L_1 u_1 at x = 1.45, ex2

ScalarField smooth(double (*f)(double), double (*df)(double), double (*d2f)(double)) {
  ScalarField u;
  ScalarField::Piece p;
  p.lo = -1e300;
  p.hi = 1e300;
  p.f = f;
  p.df = df;
  p.d2f = d2f;
  u.pieces = {p};
  return u;
}

double sin_(double x) { return std::sin(x); }
double cos_(double x) { return std::cos(x); }
double msin_(double x) { return -std::sin(x); }
double up_(double x) { return 1.5 - 2.0 * std::sin(x); }
double dup_(double x) { return -2.0 * std::cos(x); }
double d2up_(double x) { return 2.0 * std::sin(x); }

}  // namespace

TEST_CASE("pointwise nonlocal operator on manufactured fields", "[operators]") {
  const Example& ex = get_example("ex1");
  auto rm = ex.regions({0.25, 0.5});

  double f1 = apply_nonlocal(ex.exact[0], rm.kernel(0), rm.span(0).first,
                             rm.span(0).second, 0.3);
  CHECK(f1 == Approx(kF1Ex1).epsilon(1e-10));

  double f2 = apply_nonlocal(ex.exact[1], rm.kernel(1), rm.span(1).first,
                             rm.span(1).second, 0.8);
  CHECK(f2 == Approx(kF2Ex1).epsilon(1e-10));

  SECTION("constants are annihilated") {
    CHECK(apply_nonlocal(ScalarField::constant(4.2), rm.kernel(0), -0.25, 0.9, 0.3) ==
          Approx(0.0).margin(1e-12));
  }

  SECTION("midpoint-rule cross check, ex2") {
    const Example& e2 = get_example("ex2");
    auto rm2 = e2.regions({0.25, 0.5});
    double v = apply_nonlocal(e2.exact[0], rm2.kernel(0), rm2.span(0).first,
                              rm2.span(0).second, 1.45);
    CHECK(v == Approx(kF1Ex2).epsilon(1e-10));

    const int n = 400000;
    double lo = 1.45 - 0.25, hi = 1.45 + 0.25, acc = 0.0;
    for (int i = 0; i < n; ++i) {
      double y = lo + (hi - lo) * (i + 0.5) / n;
      acc += (e2.exact[0].eval(1.45) - e2.exact[0].eval(y)) *
             rm2.kernel(0).eval(1.45, y);
    }
    acc *= (hi - lo) / n;
    CHECK(v == Approx(acc).epsilon(1e-6));
  }
}

TEST_CASE("second-moment identity of the quadratic", "[operators]") {
  // L applied to (x-alpha)^2 at x = alpha over the full ball equals -2 sigma
  for (auto kind : {std::string("constant"), std::string("triangular"),
                    std::string("parabolic")}) {
    for (double d : {0.25, 0.4}) {
      auto k = make_kernel(kind, d);
      ScalarField u;
      ScalarField::Piece p;
      p.lo = -1e300;
      p.hi = 1e300;
      p.f = [](double x) { return (x - kAlpha) * (x - kAlpha); };
      p.df = [](double x) { return 2.0 * (x - kAlpha); };
      p.d2f = [](double) { return 2.0; };
      u.pieces = {p};
      double v = apply_nonlocal(u, k, kAlpha - d, kAlpha + d, kAlpha);
      CHECK(v == Approx(-2.0 * k.sigma).epsilon(1e-10));
      CHECK(apply_local(u, k.sigma, kAlpha) == Approx(-2.0 * k.sigma).margin(1e-14));
    }
  }
}

TEST_CASE("interface flux operator", "[operators]") {
  auto rm = get_example("ex1").regions({0.25, 0.5});
  const auto& z = rm.zones[0];
  auto uL = smooth(sin_, cos_, msin_);
  auto uR = smooth(up_, dup_, d2up_);

  CHECK(flux_at(uL, uR, rm.kernel(0), rm.kernel(1), z, kAlpha - 0.1) ==
        Approx(kFluxLo).epsilon(1e-10));
  CHECK(flux_at(uL, uR, rm.kernel(0), rm.kernel(1), z, kAlpha + 0.1) ==
        Approx(kFluxHi).epsilon(1e-10));
  CHECK_THROWS_AS(flux_at(uL, uR, rm.kernel(0), rm.kernel(1), z, kAlpha + 0.7),
                  config_error);

  ScalarField one = ScalarField::constant(1.0);
  double fnl = flux_functional(uL, uR, rm.kernel(0), rm.kernel(1), z, one);
  CHECK(fnl == Approx(kFluxFnl).margin(5e-8));

  CHECK(local_flux_jump(uL.deriv(kAlpha), uR.deriv(kAlpha), 0.5, 0.5) ==
        Approx(1.5 * std::cos(kAlpha)).margin(1e-14));

  SECTION("the five-integral decomposition matches the nested route") {
    for (auto deltas : {std::pair{0.25, 0.5}, std::pair{0.125, 0.5}}) {
      auto rmd = get_example("ex1").regions({deltas.first, deltas.second});
      const auto& zd = rmd.zones[0];
      double a = flux_functional(uL, uR, rmd.kernel(0), rmd.kernel(1), zd, one);
      auto dec = flux_decomposition(uL, uR, rmd.kernel(0), rmd.kernel(1), zd, one);
      CHECK(dec.sum() == Approx(a).epsilon(1e-10));
    }
  }

  SECTION("functional converges to the local flux jump at second order") {
    double jump = local_flux_jump(uL.deriv(kAlpha), uR.deriv(kAlpha), 0.5, 0.5);
    double prev = 0.0;
    std::vector<double> errs;
    for (int l = 0; l < 3; ++l) {
      double d1 = 0.25 / (1 << l);
      auto rmd = get_example("ex1").regions({d1, 2.0 * d1});
      double v = flux_functional(uL, uR, rmd.kernel(0), rmd.kernel(1),
                                 rmd.zones[0], one);
      // normalize by the same functional of a reference linear pair
      ScalarField lin1 = smooth([](double x) { return x; },
                                [](double) { return 1.0; },
                                [](double) { return 0.0; });
      ScalarField lin2 = smooth([](double x) { return 2.0 * x; },
                                [](double) { return 2.0; },
                                [](double) { return 0.0; });
      double cal = flux_functional(lin1, lin2, rmd.kernel(0), rmd.kernel(1),
                                   rmd.zones[0], one) /
                   local_flux_jump(1.0, 2.0, 0.5, 0.5);
      errs.push_back(std::fabs(v / cal - jump));
      (void)prev;
    }
    double order = std::log2(errs[0] / errs[1]);
    double order2 = std::log2(errs[1] / errs[2]);
    CHECK(order == Approx(2.0).margin(0.6));
    CHECK(order2 == Approx(2.0).margin(0.4));
  }
}

TEST_CASE("manufactured problem data", "[operators]") {
  const Example& ex = get_example("ex1");
  auto rm = ex.regions({0.25, 0.5});
  ProblemData data = manufacture_data(ex.exact, rm);
  REQUIRE(data.f.size() == 2);
  REQUIRE(data.psi1.size() == 1);

  CHECK(data.f[0].eval(0.3) == Approx(kF1Ex1).epsilon(1e-10));
  CHECK(data.f[1].eval(0.8) == Approx(kF2Ex1).epsilon(1e-10));
  CHECK(data.psi1[0].eval(kAlpha - 0.1) == Approx(kPsi1Ex1).epsilon(1e-10));
  CHECK(data.psi2[0].eval(kAlpha + 0.1) == Approx(kPsi2Ex1).epsilon(1e-10));

  // volume constraints restrict the exact branches
  CHECK(data.g[0].eval(-0.1) == Approx(0.0).margin(1e-15));
  CHECK(data.g[1].eval(1.2) == Approx(1.5 - 2.0 * std::sin(1.0)).margin(1e-15));

  // both examples here are jump-free
  CHECK(data.phi[0].eval(kAlpha - 0.01) == Approx(0.0).margin(1e-14));
  CHECK(data.phi[0].eval(kAlpha + 0.01) == Approx(0.0).margin(1e-14));

  const Example& e2 = get_example("ex2");
  auto rm2 = e2.regions({0.25, 0.5});
  ProblemData d2 = manufacture_data(e2.exact, rm2);
  CHECK(d2.f[0].eval(1.45) == Approx(kF1Ex2).epsilon(1e-10));

  SECTION("field count must match") {
    CHECK_THROWS_AS(manufacture_data({ex.exact[0]}, rm), config_error);
  }
}

TEST_CASE("local counterpart data", "[operators]") {
  auto lc = local_counterpart("ex1");
  CHECK(lc.alpha == Approx(kAlpha).margin(0.0));
  CHECK(lc.sigma[0] == 0.5);
  CHECK(lc.psi0 == Approx(1.5 * std::cos(kAlpha)).margin(1e-14));
  // -sigma u0'' = f0
  CHECK(lc.f0[0].eval(0.4) == Approx(0.5 * std::sin(0.4)).margin(1e-14));
  CHECK(lc.f0[1].eval(0.8) == Approx(-std::sin(0.8)).margin(1e-14));
  CHECK(lc.u0[0].eval(0.2) == Approx(std::sin(0.2)).margin(1e-15));
  CHECK_THROWS_AS(local_counterpart("ex2"), config_error);
}
