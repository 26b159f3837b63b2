#pragma once

// Panelized Gauss quadrature for 1D intervals and for element-pair double
// integrals clipped to the kernel-support band |x-y| <= delta. Panels are
// split along axis cuts first, then by the band edges y = x +- delta and the
// kink line y = x, so every panel is a convex polygon on which the integrand
// is smooth.

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include "nlifem/common.hpp"

namespace nlifem {

struct GaussRule {
  int n = 0;
  std::vector<double> nodes;    // on [-1,1]
  std::vector<double> weights;  // sum to 2
};

namespace detail {
inline GaussRule compute_gauss_rule(int n) {
  GaussRule r;
  r.n = n;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n with Chebyshev-like initial guess
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      if (n == 1) p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      double pn = (n == 1) ? x : p1;
      double pm = (n == 1) ? 1.0 : p0;
      pp = n * (x * pn - pm) / (x * x - 1.0);
      double dx = pn / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    r.nodes[n - 1 - i] = x;
    r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return r;
}
}  // namespace detail

inline const GaussRule& gauss_rule(int n) {
  require(n >= 1 && n <= 64, "gauss_rule: order out of range");
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, detail::compute_gauss_rule(n)).first;
  return it->second;
}

inline double integrate_interval(double lo, double hi,
                                 const std::vector<double>& breakpoints,
                                 const std::function<double(double)>& f,
                                 const GaussRule& rule) {
  if (hi <= lo) return 0.0;
  double tol = 1e-13 * std::max(1.0, std::fabs(lo) + std::fabs(hi));
  std::vector<double> edges = split_interval(lo, hi, breakpoints, tol);
  double total = 0.0;
  for (size_t s = 0; s + 1 < edges.size(); ++s) {
    double c = 0.5 * (edges[s] + edges[s + 1]);
    double hw = 0.5 * (edges[s + 1] - edges[s]);
    double acc = 0.0;
    for (int q = 0; q < rule.n; ++q) acc += rule.weights[q] * f(c + hw * rule.nodes[q]);
    total += hw * acc;
  }
  return total;
}

struct Panel2D {
  std::array<std::array<double, 2>, 8> verts{};
  int n = 0;

  double area() const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      int j = (i + 1) % n;
      s += verts[i][0] * verts[j][1] - verts[j][0] * verts[i][1];
    }
    return 0.5 * std::fabs(s);
  }
  double centroid_x() const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += verts[i][0];
    return s / n;
  }
  double centroid_y() const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += verts[i][1];
    return s / n;
  }
};

namespace detail {

// clip convex polygon by half-plane a*x + b*y <= c (Sutherland-Hodgman)
inline Panel2D clip_halfplane(const Panel2D& poly, double a, double b, double c,
                              double tol) {
  Panel2D out;
  if (poly.n == 0) return out;
  auto side = [&](const std::array<double, 2>& p) { return a * p[0] + b * p[1] - c; };
  for (int i = 0; i < poly.n; ++i) {
    const auto& p = poly.verts[i];
    const auto& q = poly.verts[(i + 1) % poly.n];
    double sp = side(p), sq = side(q);
    if (sp <= tol) {
      out.verts[out.n++] = p;
      if (sq > tol && sp < -tol) {
        double t = sp / (sp - sq);
        out.verts[out.n++] = {p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])};
      }
    } else if (sq < -tol) {
      double t = sp / (sp - sq);
      out.verts[out.n++] = {p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])};
    }
  }
  return out;
}

}  // namespace detail

inline std::vector<Panel2D> decompose_pair(double a0, double a1, double b0, double b1,
                                           double delta,
                                           const std::vector<double>& extra_cuts = {}) {
  std::vector<Panel2D> panels;
  if (a1 <= a0 || b1 <= b0) return panels;
  double gap = std::max(0.0, std::max(b0 - a1, a0 - b1));
  if (gap >= delta) return panels;
  double scale = std::max({1.0, std::fabs(a0), std::fabs(a1), std::fabs(b0), std::fabs(b1)});
  double tol = 1e-13 * scale;
  double area_tol = 1e-14 * std::max(1.0, (a1 - a0) * (b1 - b0));

  std::vector<double> xs = split_interval(a0, a1, extra_cuts, tol);
  std::vector<double> ys = split_interval(b0, b1, extra_cuts, tol);

  for (size_t ix = 0; ix + 1 < xs.size(); ++ix) {
    for (size_t iy = 0; iy + 1 < ys.size(); ++iy) {
      Panel2D rect;
      rect.n = 4;
      rect.verts[0] = {xs[ix], ys[iy]};
      rect.verts[1] = {xs[ix + 1], ys[iy]};
      rect.verts[2] = {xs[ix + 1], ys[iy + 1]};
      rect.verts[3] = {xs[ix], ys[iy + 1]};
      // band: -delta <= y - x <= delta
      Panel2D band = detail::clip_halfplane(rect, -1.0, 1.0, delta, tol);
      band = detail::clip_halfplane(band, 1.0, -1.0, delta, tol);
      if (band.n < 3) continue;
      // split along the kink y = x
      Panel2D below = detail::clip_halfplane(band, -1.0, 1.0, 0.0, tol);
      Panel2D above = detail::clip_halfplane(band, 1.0, -1.0, 0.0, tol);
      if (below.n >= 3 && below.area() > area_tol) panels.push_back(below);
      if (above.n >= 3 && above.area() > area_tol) panels.push_back(above);
    }
  }
  return panels;
}

// Collapsed tensor Gauss on each fan triangle of each panel.
// Exact for polynomial integrands of total degree d when 2n-1 >= d+1.
inline double integrate_pair(const std::vector<Panel2D>& panels,
                             const std::function<double(double, double)>& f,
                             const GaussRule& rule) {
  double total = 0.0;
  for (const auto& p : panels) {
    for (int t = 1; t + 1 < p.n; ++t) {
      const auto& v0 = p.verts[0];
      const auto& v1 = p.verts[t];
      const auto& v2 = p.verts[t + 1];
      double ax = v1[0] - v0[0], ay = v1[1] - v0[1];
      double bx = v2[0] - v1[0], by = v2[1] - v1[1];
      double det2 = ax * by - ay * bx;  // 2*area signed
      if (det2 == 0.0) continue;
      double acc = 0.0;
      for (int i = 0; i < rule.n; ++i) {
        double s = 0.5 * (rule.nodes[i] + 1.0);
        double ws = rule.weights[i];
        for (int j = 0; j < rule.n; ++j) {
          double tt = 0.5 * (rule.nodes[j] + 1.0);
          double x = v0[0] + s * (ax + tt * bx);
          double y = v0[1] + s * (ay + tt * by);
          acc += ws * rule.weights[j] * s * f(x, y);
        }
      }
      total += acc * std::fabs(det2) * 0.25;
    }
  }
  return total;
}

// Quadrature-point walk matching integrate_pair's panel/triangle traversal;
// fn(x, y, w) receives the full global weight.
template <class F>
inline void for_each_pair_point(const std::vector<Panel2D>& panels,
                                const GaussRule& rule, F&& fn) {
  for (const auto& p : panels) {
    for (int t = 1; t + 1 < p.n; ++t) {
      const auto& v0 = p.verts[0];
      const auto& v1 = p.verts[t];
      const auto& v2 = p.verts[t + 1];
      double ax = v1[0] - v0[0], ay = v1[1] - v0[1];
      double bx = v2[0] - v1[0], by = v2[1] - v1[1];
      double det2 = ax * by - ay * bx;
      if (det2 == 0.0) continue;
      double jac = std::fabs(det2) * 0.25;
      for (int i = 0; i < rule.n; ++i) {
        double s = 0.5 * (rule.nodes[i] + 1.0);
        double ws = rule.weights[i];
        for (int j = 0; j < rule.n; ++j) {
          double tt = 0.5 * (rule.nodes[j] + 1.0);
          double x = v0[0] + s * (ax + tt * bx);
          double y = v0[1] + s * (ay + tt * by);
          fn(x, y, ws * rule.weights[j] * s * jac);
        }
      }
    }
  }
}

// 1D counterpart: fn(x, w) over the panelized interval.
template <class F>
inline void for_each_interval_point(double lo, double hi,
                                    const std::vector<double>& breakpoints,
                                    const GaussRule& rule, F&& fn) {
  if (hi <= lo) return;
  double tol = 1e-13 * std::max(1.0, std::fabs(lo) + std::fabs(hi));
  std::vector<double> edges = split_interval(lo, hi, breakpoints, tol);
  for (size_t s = 0; s + 1 < edges.size(); ++s) {
    double c = 0.5 * (edges[s] + edges[s + 1]);
    double hw = 0.5 * (edges[s + 1] - edges[s]);
    for (int q = 0; q < rule.n; ++q)
      fn(c + hw * rule.nodes[q], hw * rule.weights[q]);
  }
}

// Default order making stiffness entries exact for degree-k shapes and a
// polynomial kernel profile of degree p.
inline int stiffness_order(int k, int kernel_degree) {
  return (2 * k + kernel_degree + 5) / 2;
}

}  // namespace nlifem
