#pragma once

// Uniform background grid over (a - delta_1, b + delta_n) with element
// classification against the region map. Interfaces must fall strictly
// inside an element: meshes with alpha on (or within 1e-12 h of) a node are
// rejected.

#include <cmath>
#include <string>
#include <vector>

#include "nlifem/common.hpp"
#include "nlifem/regions.hpp"

namespace nlifem {

struct Element {
  int idx = 0;
  double lo = 0.0, hi = 0.0;
  std::uint32_t field_mask = 0;  // bit i: active for field i
  std::uint32_t gamma_mask = 0;  // bit m: positive overlap with Gamma_m
  std::uint32_t ijl_mask = 0;    // bit m: overlaps I^J_left of interface m
  std::uint32_t ijr_mask = 0;
  std::uint32_t oj_mask = 0;
  int cut_interface = -1;  // m when alpha_m lies in the interior

  bool is_cut() const { return cut_interface >= 0; }
};

struct Mesh {
  RegionMap regions;
  double h = 0.0;
  double x0 = 0.0;  // first node, a - delta_1
  int n_elems = 0;
  std::vector<Element> elems;

  double node(int i) const { return x0 + i * h; }
  int n_nodes() const { return n_elems + 1; }

  int elem_index_at(double x) const {
    int i = int(std::floor((x - x0) / h));
    return std::min(std::max(i, 0), n_elems - 1);
  }
};

namespace detail {
inline bool near_integer(double v, double tol) {
  return std::fabs(v - std::round(v)) <= tol;
}
}  // namespace detail

inline Mesh build_mesh(const RegionMap& rm, double h) {
  require(h > 0.0, "mesh: h must be positive");
  require(detail::near_integer((rm.b - rm.a) / h, 1e-9),
          "mesh: (b-a)/h must be an integer");
  for (int i = 0; i < rm.n_fields(); ++i) {
    require(detail::near_integer(rm.delta(i) / h, 1e-9),
            "mesh: delta_" + std::to_string(i + 1) + "/h must be an integer");
  }

  Mesh m;
  m.regions = rm;
  m.h = h;
  m.x0 = rm.a - rm.delta(0);
  double x_end = rm.b + rm.delta(rm.n_fields() - 1);
  m.n_elems = int(std::round((x_end - m.x0) / h));

  for (size_t mi = 0; mi < rm.interfaces.size(); ++mi) {
    double r = (rm.interfaces[mi] - m.x0) / h;
    require(std::fabs(r - std::round(r)) * h > 1e-12 * h,
            "mesh: interface alpha_" + std::to_string(mi + 1) +
                " coincides with a grid node; perturb alpha or h");
  }

  double otol = 1e-12 * h;
  m.elems.resize(m.n_elems);
  for (int e = 0; e < m.n_elems; ++e) {
    Element& el = m.elems[e];
    el.idx = e;
    el.lo = m.node(e);
    el.hi = m.node(e + 1);
    for (int i = 0; i < rm.n_fields(); ++i) {
      auto [slo, shi] = rm.span(i);
      if (overlap_len(el.lo, el.hi, slo, shi) > otol) el.field_mask |= (1u << i);
    }
    for (size_t mi = 0; mi < rm.zones.size(); ++mi) {
      const auto& z = rm.zones[mi];
      std::uint32_t bit = 1u << mi;
      if (overlap_len(el.lo, el.hi, z.gamma_lo, z.gamma_hi) > otol) el.gamma_mask |= bit;
      if (overlap_len(el.lo, el.hi, z.ijl_lo, z.ijl_hi) > otol) el.ijl_mask |= bit;
      if (overlap_len(el.lo, el.hi, z.ijr_lo, z.ijr_hi) > otol) el.ijr_mask |= bit;
      if (z.has_oj && overlap_len(el.lo, el.hi, z.oj_lo, z.oj_hi) > otol)
        el.oj_mask |= bit;
      if (z.alpha > el.lo + otol && z.alpha < el.hi - otol) el.cut_interface = int(mi);
    }
  }

  for (size_t mi = 0; mi < rm.zones.size(); ++mi) {
    int count = 0;
    for (auto& el : m.elems)
      if (el.cut_interface == int(mi)) ++count;
    require(count == 1, "mesh: expected exactly one cut element per interface");
  }
  return m;
}

}  // namespace nlifem
