#pragma once

// Piecewise-smooth scalar fields with side-aware evaluation at breakpoints.
// Houses exact solutions, collar data, jumps, flux data and test functions.
// Evaluation outside the covered range extrapolates the nearest piece's
// formula (used only within one element width of zone ends).

#include <cmath>
#include <functional>
#include <vector>

#include "nlifem/common.hpp"

namespace nlifem {

using Fn = std::function<double(double)>;

struct ScalarField {
  struct Piece {
    double lo = 0.0, hi = 0.0;
    Fn f, df, d2f;
  };
  std::vector<Piece> pieces;

  bool has_derivatives() const {
    for (auto& p : pieces)
      if (!p.df || !p.d2f) return false;
    return !pieces.empty();
  }

  // interior piece boundaries; quadrature splits panels here
  std::vector<double> breakpoints() const {
    std::vector<double> out;
    for (size_t i = 0; i + 1 < pieces.size(); ++i) out.push_back(pieces[i].hi);
    return out;
  }

  // side < 0: limit from below when x sits on a piece boundary; side > 0:
  // from above; side 0: the piece whose half-open [lo, hi) interval holds x
  int piece_index(double x, int side) const {
    require(!pieces.empty(), "field: empty");
    double tol = 1e-12 * std::max(1.0, std::fabs(x));
    int n = int(pieces.size());
    for (int i = 0; i < n; ++i) {
      const Piece& p = pieces[i];
      if (i + 1 < n && std::fabs(x - p.hi) <= tol)
        return (side < 0) ? i : i + 1;
      if (x < p.hi - tol) return i;
    }
    return n - 1;
  }

  double eval(double x, int side = 0) const {
    return pieces[piece_index(x, side)].f(x);
  }
  // value at x of the piece the anchor selects (side-resolved there); unlike
  // eval, the piece's formula is followed beyond its own interval, giving the
  // smooth extension of the anchored branch
  double eval_branch(double anchor, int side, double x) const {
    return pieces[piece_index(anchor, side)].f(x);
  }
  double deriv(double x, int side = 0) const {
    const Piece& p = pieces[piece_index(x, side)];
    require(bool(p.df), "field: missing first-derivative handle");
    return p.df(x);
  }
  double deriv2(double x, int side = 0) const {
    const Piece& p = pieces[piece_index(x, side)];
    require(bool(p.d2f), "field: missing second-derivative handle");
    return p.d2f(x);
  }

  static ScalarField smooth(Fn f, Fn df = nullptr, Fn d2f = nullptr) {
    ScalarField s;
    s.pieces.push_back({-1e300, 1e300, std::move(f), std::move(df), std::move(d2f)});
    return s;
  }

  static ScalarField constant(double c) {
    return smooth([c](double) { return c; }, [](double) { return 0.0; },
                  [](double) { return 0.0; });
  }

  static ScalarField piecewise(std::vector<Piece> ps) {
    ScalarField s;
    s.pieces = std::move(ps);
    require(!s.pieces.empty(), "field: needs at least one piece");
    for (size_t i = 0; i + 1 < s.pieces.size(); ++i)
      require(s.pieces[i].hi <= s.pieces[i + 1].lo + kGeomTol &&
                  s.pieces[i].hi >= s.pieces[i + 1].lo - kGeomTol,
              "field: pieces must be contiguous");
    return s;
  }
};

// difference g - f with merged breakpoints (used for jump data); each merged
// piece binds the operand pieces' own formulas, so eval_branch can follow a
// piece beyond its interval
inline ScalarField field_difference(ScalarField f, ScalarField g) {
  std::vector<double> cuts;
  for (double c : f.breakpoints()) cuts.push_back(c);
  for (double c : g.breakpoints()) cuts.push_back(c);
  cuts = sorted_unique(std::move(cuts), kGeomTol);
  ScalarField out;
  double lo = -1e300;
  for (size_t i = 0; i <= cuts.size(); ++i) {
    double hi = (i < cuts.size()) ? cuts[i] : 1e300;
    double xr = cuts.empty() ? 0.0
                : (i == 0)   ? cuts.front() - 1.0
                : (i == cuts.size()) ? cuts.back() + 1.0
                                     : 0.5 * (cuts[i - 1] + cuts[i]);
    const ScalarField::Piece& pf = f.pieces[f.piece_index(xr, 0)];
    const ScalarField::Piece& pg = g.pieces[g.piece_index(xr, 0)];
    ScalarField::Piece p;
    p.lo = lo;
    p.hi = hi;
    p.f = [ff = pf.f, gf = pg.f](double x) { return gf(x) - ff(x); };
    if (pf.df && pg.df)
      p.df = [fd = pf.df, gd = pg.df](double x) { return gd(x) - fd(x); };
    if (pf.d2f && pg.d2f)
      p.d2f = [fd = pf.d2f, gd = pg.d2f](double x) { return gd(x) - fd(x); };
    out.pieces.push_back(std::move(p));
    lo = hi;
  }
  return out;
}

}  // namespace nlifem
