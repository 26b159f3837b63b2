#pragma once

// Per-field continuous Lagrange-P^k spaces on the active elements of the
// background grid, broken at each interface by branch duplication on the cut
// element (virtual nodes). Co-located DOFs of adjacent fields on elements
// meeting Gamma_m form identification classes; class structure is geometric,
// jump-lift values are attached later from problem data.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "nlifem/common.hpp"
#include "nlifem/mesh.hpp"

namespace nlifem {

enum class Coupling { identified, decoupled };

// Lagrange shape r on [0,1] with equispaced nodes j/k
inline double lagrange_shape(int k, int r, double t) {
  double v = 1.0;
  for (int j = 0; j <= k; ++j) {
    if (j == r) continue;
    v *= (t * k - j) / double(r - j);
  }
  return v;
}

inline double lagrange_shape_deriv(int k, int r, double t) {
  double sum = 0.0;
  for (int m = 0; m <= k; ++m) {
    if (m == r) continue;
    double prod = 1.0;
    for (int j = 0; j <= k; ++j) {
      if (j == r || j == m) continue;
      prod *= (t * k - j) / double(r - j);
    }
    sum += prod * k / double(r - m);
  }
  return sum;
}

struct DofInfo {
  int field = 0;
  double x = 0.0;
  int branch = -1;  // -1 unrestricted node, 0 left of the cut, 1 right
};

struct ElemDofs {
  bool cut = false;          // cut for this field (field adjacent to the interface)
  int cut_interface = -1;
  std::vector<int> ids;      // k+1 entries, or 2(k+1) when cut (left then right)
};

// co-location edge: dof_b (higher field) co-located with dof_a; the jump lift
// is phi of `iface`, taken from the piece `anchor`/`side` selects and followed
// to x. On a cut element the anchor is the cut point and the side is the
// branch, so a branch node across the cut still picks up its own branch's
// phi extension; elsewhere anchor = x and the lookup is positional.
struct IdentEdge {
  int a = 0, b = 0;
  double x = 0.0;
  int iface = 0;
  int side = 0;  // -1 below the anchor, +1 above
  double anchor = 0.0;
};

struct DofMap {
  Mesh mesh;
  int k = 1;
  Coupling coupling = Coupling::identified;

  std::vector<DofInfo> dofs;
  std::vector<std::vector<int>> field_elems;       // per field, ascending
  std::vector<std::map<int, ElemDofs>> elem_dofs;  // per field: elem -> dofs
  std::vector<char> dirichlet;                     // per dof
  std::vector<IdentEdge> edges;

  // identification classes (geometric): class id -> member dofs; singletons
  // for uncoupled dofs are implicit
  std::vector<int> class_of;                 // per dof
  std::vector<std::vector<int>> classes;     // members, ascending
  std::vector<std::vector<int>> class_edges; // edge indices per class
  std::vector<char> class_pinned;            // contains a Dirichlet dof
  std::vector<int> red_index;                // per dof: reduced unknown, -1 pinned
  int n_reduced = 0;

  int n_dofs() const { return int(dofs.size()); }
  const RegionMap& regions() const { return mesh.regions; }
};

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }
  void unite(int i, int j) {
    int ri = find(i), rj = find(j);
    if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
  }
};

}  // namespace detail

inline DofMap build_dof_map(const Mesh& mesh, int k, Coupling coupling) {
  require(k >= 1 && k <= 8, "dofmap: degree k out of range");
  const RegionMap& rm = mesh.regions;
  // without identification a middle field carries a constant nullspace (no
  // Dirichlet collar of its own), so decoupled mode is two-field only
  require(coupling == Coupling::identified || rm.n_interfaces() <= 1,
          "dofmap: decoupled mode supports a single interface only");
  DofMap dm;
  dm.mesh = mesh;
  dm.k = k;
  dm.coupling = coupling;
  int nf = rm.n_fields();
  dm.field_elems.resize(nf);
  dm.elem_dofs.resize(nf);

  auto new_dof = [&](int field, double x, int branch) {
    dm.dofs.push_back({field, x, branch});
    return int(dm.dofs.size()) - 1;
  };

  for (int f = 0; f < nf; ++f) {
    int prev_elem = -2, prev_last = -1;
    for (const auto& el : mesh.elems) {
      if (!(el.field_mask & (1u << f))) continue;
      require(prev_elem < 0 || el.idx == prev_elem + 1,
              "dofmap: active elements of a field must be contiguous");
      bool cut_for_field = false;
      if (el.is_cut()) {
        const auto& z = rm.zones[el.cut_interface];
        cut_for_field = (z.left_field == f || z.right_field == f);
      }
      ElemDofs ed;
      ed.cut = cut_for_field;
      ed.cut_interface = cut_for_field ? el.cut_interface : -1;
      double step = mesh.h / k;
      if (!cut_for_field) {
        ed.ids.resize(k + 1);
        ed.ids[0] = (prev_elem == el.idx - 1) ? prev_last : new_dof(f, el.lo, -1);
        for (int r = 1; r <= k; ++r) ed.ids[r] = new_dof(f, el.lo + r * step, -1);
        prev_last = ed.ids[k];
      } else {
        ed.ids.resize(2 * (k + 1));
        ed.ids[0] = (prev_elem == el.idx - 1) ? prev_last : new_dof(f, el.lo, -1);
        for (int r = 1; r <= k; ++r) ed.ids[r] = new_dof(f, el.lo + r * step, 0);
        for (int r = 0; r < k; ++r)
          ed.ids[k + 1 + r] = new_dof(f, el.lo + r * step, 1);
        ed.ids[2 * k + 1] = new_dof(f, el.hi, -1);
        prev_last = ed.ids[2 * k + 1];
      }
      dm.field_elems[f].push_back(el.idx);
      dm.elem_dofs[f].emplace(el.idx, std::move(ed));
      prev_elem = el.idx;
    }
  }

  // Dirichlet sets: nodes in the closed collars
  dm.dirichlet.assign(dm.n_dofs(), 0);
  double ntol = 1e-12 * mesh.h;
  for (int d = 0; d < dm.n_dofs(); ++d) {
    const auto& info = dm.dofs[d];
    if (info.field == 0 && info.x <= rm.a + ntol) dm.dirichlet[d] = 1;
    if (info.field == nf - 1 && info.x >= rm.b - ntol) dm.dirichlet[d] = 1;
  }

  // identification edges across each interface zone
  if (coupling == Coupling::identified) {
    std::set<std::pair<int, int>> seen;
    for (size_t m = 0; m < rm.zones.size(); ++m) {
      const auto& z = rm.zones[m];
      for (const auto& el : mesh.elems) {
        if (!(el.gamma_mask & (1u << m))) continue;
        auto itL = dm.elem_dofs[z.left_field].find(el.idx);
        auto itR = dm.elem_dofs[z.right_field].find(el.idx);
        require(itL != dm.elem_dofs[z.left_field].end() &&
                    itR != dm.elem_dofs[z.right_field].end(),
                "dofmap: Gamma element inactive in an adjacent field");
        const ElemDofs& edL = itL->second;
        const ElemDofs& edR = itR->second;
        // entries (dof, node index r, side): side -1/+1 relative to the
        // element's cut point when cut, else relative to z.alpha; 0 = spans both
        auto entries = [&](const ElemDofs& ed) {
          std::vector<std::array<int, 3>> out;
          if (!ed.cut) {
            for (int r = 0; r <= k; ++r) out.push_back({ed.ids[r], r, 0});
          } else {
            for (int r = 0; r <= k; ++r) out.push_back({ed.ids[r], r, -1});
            for (int r = 0; r <= k; ++r) out.push_back({ed.ids[k + 1 + r], r, +1});
          }
          return out;
        };
        auto entL = entries(edL);
        auto entR = entries(edR);
        for (auto& ea : entL) {
          for (auto& eb : entR) {
            if (ea[1] != eb[1]) continue;  // node index must match
            int sa = ea[2], sb = eb[2];
            if (sa != 0 && sb != 0 && sa != sb) continue;
            int side = (sa != 0) ? sa : sb;
            double x = dm.dofs[ea[0]].x;
            require(std::fabs(x - dm.dofs[eb[0]].x) <= ntol,
                    "dofmap: identification pair not co-located");
            if (side == 0) side = (x < z.alpha) ? -1 : +1;
            double anchor =
                (sa != 0 || sb != 0) ? rm.zones[el.cut_interface].alpha : x;
            if (!seen.emplace(ea[0], eb[0]).second) continue;
            dm.edges.push_back({ea[0], eb[0], x, int(m), side, anchor});
          }
        }
      }
    }
  }

  // classes via union-find over edges
  detail::UnionFind uf(dm.n_dofs());
  for (auto& e : dm.edges) uf.unite(e.a, e.b);
  dm.class_of.assign(dm.n_dofs(), -1);
  std::map<int, int> root_to_class;
  for (int d = 0; d < dm.n_dofs(); ++d) {
    int r = uf.find(d);
    auto it = root_to_class.find(r);
    if (it == root_to_class.end()) {
      it = root_to_class.emplace(r, int(dm.classes.size())).first;
      dm.classes.emplace_back();
    }
    dm.class_of[d] = it->second;
    dm.classes[it->second].push_back(d);
  }
  dm.class_edges.resize(dm.classes.size());
  for (size_t ei = 0; ei < dm.edges.size(); ++ei)
    dm.class_edges[dm.class_of[dm.edges[ei].a]].push_back(int(ei));
  dm.class_pinned.assign(dm.classes.size(), 0);
  for (int d = 0; d < dm.n_dofs(); ++d)
    if (dm.dirichlet[d]) dm.class_pinned[dm.class_of[d]] = 1;

  dm.red_index.assign(dm.n_dofs(), -1);
  dm.n_reduced = 0;
  for (size_t c = 0; c < dm.classes.size(); ++c) {
    if (dm.class_pinned[c]) continue;
    int idx = dm.n_reduced++;
    for (int d : dm.classes[c]) dm.red_index[d] = idx;
  }
  return dm;
}

// Global basis evaluation, branch-aware on cut elements. Returns 0 when the
// dof has no support at x; x must lie in the field's active region.
inline double eval_basis(const DofMap& dm, int field, int dof, double x) {
  const Mesh& mesh = dm.mesh;
  int e = mesh.elem_index_at(x);
  double ntol = 1e-12 * mesh.h;
  auto value_on = [&](int elem, bool& active) -> double {
    auto it = dm.elem_dofs[field].find(elem);
    if (it == dm.elem_dofs[field].end()) {
      active = false;
      return 0.0;
    }
    active = true;
    const ElemDofs& ed = it->second;
    const Element& el = mesh.elems[elem];
    int n = int(ed.ids.size());
    for (int pos = 0; pos < n; ++pos) {
      if (ed.ids[pos] != dof) continue;
      if (ed.cut) {
        double alpha = mesh.regions.zones[ed.cut_interface].alpha;
        bool left = pos <= dm.k;
        if (left && x > alpha) return 0.0;
        if (!left && x < alpha) return 0.0;
        int r = pos % (dm.k + 1);
        return lagrange_shape(dm.k, r, (x - el.lo) / mesh.h);
      }
      return lagrange_shape(dm.k, pos, (x - el.lo) / mesh.h);
    }
    return 0.0;
  };
  bool active = false;
  double v = value_on(e, active);
  if (!active && e > 0 && std::fabs(x - mesh.elems[e].lo) <= ntol)
    v = value_on(e - 1, active);
  require(active, "eval_basis: x outside the field's active region");
  return v;
}

}  // namespace nlifem
