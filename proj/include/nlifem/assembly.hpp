#pragma once

// Stiffness assembly A = A_domain + A_interface, load vector, constraint
// elimination (Dirichlet collars + Gamma identification with jump lifts),
// dense Cholesky solve and branch-aware solution evaluation.
//
// The bilinear form never couples fields; all cross-field coupling enters
// through the identification classes, applied here as u_full = P u_red + lift
// with symmetric reduction P^T A P.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <thread>
#include <vector>

#include "nlifem/dofmap.hpp"
#include "nlifem/operators.hpp"
#include "nlifem/quadrature.hpp"

namespace nlifem {

namespace detail {

// values of every local dof of (field, elem) at x, zero for the dead branch
inline void elem_shape_values(const DofMap& dm, int field, int elem, double x,
                              std::vector<double>& out) {
  const ElemDofs& ed = dm.elem_dofs[field].at(elem);
  const Element& el = dm.mesh.elems[elem];
  double t = (x - el.lo) / dm.mesh.h;
  int n = int(ed.ids.size());
  out.assign(n, 0.0);
  if (!ed.cut) {
    for (int r = 0; r < n; ++r) out[r] = lagrange_shape(dm.k, r, t);
    return;
  }
  double alpha = dm.regions().zones[ed.cut_interface].alpha;
  if (x < alpha)
    for (int r = 0; r <= dm.k; ++r) out[r] = lagrange_shape(dm.k, r, t);
  else
    for (int r = 0; r <= dm.k; ++r) out[dm.k + 1 + r] = lagrange_shape(dm.k, r, t);
}

// w * iint_{Ka x Kb} (u(x)-u(y))(v(x)-v(y)) gamma dy dx over one field's
// element pair, scattered into A
inline void add_pair_block(Eigen::MatrixXd& A, const DofMap& dm, int field,
                           int ea, double alo, double ahi, int eb, double blo,
                           double bhi, const KernelSpec& kern, double w,
                           const GaussRule& rule,
                           const std::vector<double>& cuts) {
  if (ahi <= alo || bhi <= blo) return;
  auto panels = decompose_pair(alo, ahi, blo, bhi, kern.delta, cuts);
  if (panels.empty()) return;
  const ElemDofs& eda = dm.elem_dofs[field].at(ea);
  const ElemDofs& edb = dm.elem_dofs[field].at(eb);
  int na = int(eda.ids.size()), nb = int(edb.ids.size());
  std::vector<int> gd, la, lb;
  for (int i = 0; i < na; ++i) {
    gd.push_back(eda.ids[i]);
    la.push_back(i);
    lb.push_back(-1);
  }
  for (int j = 0; j < nb; ++j) {
    auto it = std::find(gd.begin(), gd.end(), edb.ids[j]);
    if (it == gd.end()) {
      gd.push_back(edb.ids[j]);
      la.push_back(-1);
      lb.push_back(j);
    } else {
      lb[it - gd.begin()] = j;
    }
  }
  int nu = int(gd.size());
  Eigen::MatrixXd loc = Eigen::MatrixXd::Zero(nu, nu);
  std::vector<double> va(na), vb(nb), du(nu);
  for_each_pair_point(panels, rule, [&](double x, double y, double wq) {
    double g = kern.eval(x, y);
    if (g == 0.0) return;
    elem_shape_values(dm, field, ea, x, va);
    elem_shape_values(dm, field, eb, y, vb);
    for (int u = 0; u < nu; ++u)
      du[u] = (la[u] >= 0 ? va[la[u]] : 0.0) - (lb[u] >= 0 ? vb[lb[u]] : 0.0);
    double c = w * wq * g;
    for (int u = 0; u < nu; ++u) {
      double cu = c * du[u];
      for (int v = 0; v < nu; ++v) loc(u, v) += cu * du[v];
    }
  });
  for (int u = 0; u < nu; ++u)
    for (int v = 0; v < nu; ++v) A(gd[u], gd[v]) += loc(u, v);
}

}  // namespace detail

// (1/2) sum_i iint_{(Omega_i u I_i^D)^2} (u_i(x)-u_i(y))(v_i(x)-v_i(y)) gamma_i
// Outer-row work items are split across NLIFEM_THREADS workers, each with its
// own accumulator; the merge order is fixed, so results are run-to-run stable.
inline Eigen::MatrixXd assemble_domain(const DofMap& dm, const GaussRule& rule) {
  const RegionMap& rm = dm.regions();
  const Mesh& mesh = dm.mesh;
  const std::vector<double>& cuts = rm.interfaces;

  struct Row {
    int field;
    size_t i;
  };
  std::vector<Row> rows;
  std::vector<std::vector<std::pair<double, double>>> clips(rm.n_fields());
  for (int f = 0; f < rm.n_fields(); ++f) {
    auto [dlo, dhi] = rm.dirichlet_domain(f);
    for (int e : dm.field_elems[f])
      clips[f].push_back({std::max(mesh.elems[e].lo, dlo), std::min(mesh.elems[e].hi, dhi)});
    for (size_t i = 0; i < dm.field_elems[f].size(); ++i)
      if (clips[f][i].second > clips[f][i].first) rows.push_back({f, i});
  }

  auto run_rows = [&](Eigen::MatrixXd& A, size_t r0, size_t r1) {
    for (size_t r = r0; r < r1; ++r) {
      int f = rows[r].field;
      size_t i = rows[r].i;
      const KernelSpec& kern = rm.kernel(f);
      const auto& elems = dm.field_elems[f];
      const auto& clip = clips[f];
      for (size_t j = i; j < elems.size(); ++j) {
        if (clip[j].second <= clip[j].first) continue;
        if (clip[j].first - clip[i].second >= kern.delta) break;
        double w = 0.5 * (i == j ? 1.0 : 2.0);
        detail::add_pair_block(A, dm, f, elems[i], clip[i].first, clip[i].second,
                               elems[j], clip[j].first, clip[j].second, kern, w,
                               rule, cuts);
      }
    }
  };

  int nt = std::min<int>(thread_count(), std::max<size_t>(rows.size(), 1));
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dm.n_dofs(), dm.n_dofs());
  if (nt <= 1) {
    run_rows(A, 0, rows.size());
  } else {
    std::vector<Eigen::MatrixXd> part(nt, A);
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) {
      size_t r0 = rows.size() * t / nt, r1 = rows.size() * (t + 1) / nt;
      pool.emplace_back([&, t, r0, r1] { run_rows(part[t], r0, r1); });
    }
    for (auto& th : pool) th.join();
    for (const auto& p : part) A += p;
  }
  return A;
}

// Interface terms per zone: (1/2) over I_R^J x I_L^J for each adjacent field
// with its own kernel, plus the full-weight I_R^J x Omega^J term for the
// wider-horizon field.
inline Eigen::MatrixXd assemble_interface(const DofMap& dm, const GaussRule& rule) {
  const RegionMap& rm = dm.regions();
  const Mesh& mesh = dm.mesh;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dm.n_dofs(), dm.n_dofs());
  const std::vector<double>& cuts = rm.interfaces;

  auto elems_over = [&](int field, double lo, double hi) {
    std::vector<std::pair<int, std::pair<double, double>>> out;
    for (int e : dm.field_elems[field]) {
      double clo = std::max(mesh.elems[e].lo, lo);
      double chi = std::min(mesh.elems[e].hi, hi);
      if (chi - clo > 1e-12 * mesh.h) out.push_back({e, {clo, chi}});
    }
    return out;
  };

  for (const auto& z : rm.zones) {
    struct Term {
      int field;
      double ylo, yhi, weight;
    };
    std::vector<Term> terms = {
        {z.left_field, z.ijl_lo, z.ijl_hi, 0.5},
        {z.right_field, z.ijl_lo, z.ijl_hi, 0.5},
    };
    if (z.has_oj) terms.push_back({z.right_field, z.oj_lo, z.oj_hi, 1.0});
    for (const auto& term : terms) {
      const KernelSpec& kern = rm.kernel(term.field);
      auto xs = elems_over(term.field, z.ijr_lo, z.ijr_hi);
      auto ys = elems_over(term.field, term.ylo, term.yhi);
      for (auto& [ea, ka] : xs)
        for (auto& [eb, kb] : ys)
          detail::add_pair_block(A, dm, term.field, ea, ka.first, ka.second, eb,
                                 kb.first, kb.second, kern, term.weight, rule,
                                 cuts);
    }
  }
  return A;
}

// l(v) = sum_i int_{Omega_i} f_i v_i + per interface int_{I_R^J} psi_1 v_L +
// int_{I_L^J} psi_2 v_R
inline Eigen::VectorXd assemble_load(const DofMap& dm, const ProblemData& data,
                                     const GaussRule& rule) {
  const RegionMap& rm = dm.regions();
  const Mesh& mesh = dm.mesh;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dm.n_dofs());
  std::vector<double> vals;

  auto add_term = [&](int field, double lo, double hi, const ScalarField& w) {
    std::vector<double> breaks = w.breakpoints();
    for (double al : rm.interfaces) breaks.push_back(al);
    for (int e : dm.field_elems[field]) {
      double clo = std::max(mesh.elems[e].lo, lo);
      double chi = std::min(mesh.elems[e].hi, hi);
      if (chi - clo <= 1e-12 * mesh.h) continue;
      const ElemDofs& ed = dm.elem_dofs[field].at(e);
      for_each_interval_point(clo, chi, breaks, rule, [&](double x, double wq) {
        double fx = w.eval(x);
        if (fx == 0.0) return;
        detail::elem_shape_values(dm, field, e, x, vals);
        for (size_t r = 0; r < vals.size(); ++r)
          if (vals[r] != 0.0) b[ed.ids[r]] += wq * fx * vals[r];
      });
    }
  };

  for (int f = 0; f < rm.n_fields(); ++f) {
    auto [olo, ohi] = rm.omega(f);
    add_term(f, olo, ohi, data.f[f]);
  }
  for (int m = 0; m < rm.n_interfaces(); ++m) {
    const auto& z = rm.zones[m];
    add_term(z.left_field, z.ijr_lo, z.ijr_hi, data.psi1[m]);
    add_term(z.right_field, z.ijl_lo, z.ijl_hi, data.psi2[m]);
  }
  return b;
}

// Per-dof affine constraint ledger: dof value = u_red[red[d]] + lift[d], or
// just lift[d] when red[d] < 0 (pinned class).
struct ConstraintSet {
  std::vector<int> red;
  std::vector<double> lift;
  int n_reduced = 0;
};

inline ConstraintSet build_constraints(const DofMap& dm, const ProblemData& data) {
  int N = dm.n_dofs();
  ConstraintSet cs;
  cs.red = dm.red_index;
  cs.lift.assign(N, 0.0);
  cs.n_reduced = dm.n_reduced;

  std::vector<double> edge_phi(dm.edges.size(), 0.0);
  for (size_t e = 0; e < dm.edges.size(); ++e) {
    const IdentEdge& ed = dm.edges[e];
    edge_phi[e] = data.phi[ed.iface].eval_branch(ed.anchor, ed.side, ed.x);
  }

  std::vector<double> rel(N, 0.0);
  std::vector<char> known(N, 0);
  for (size_t c = 0; c < dm.classes.size(); ++c) {
    const auto& members = dm.classes[c];
    // relative offsets by BFS over the class's identification edges
    std::queue<int> q;
    rel[members[0]] = 0.0;
    known[members[0]] = 1;
    q.push(members[0]);
    size_t visited = 1;
    double scale = 1.0;
    for (int ei : dm.class_edges[c]) scale = std::max(scale, std::fabs(edge_phi[ei]));
    while (!q.empty()) {
      int d = q.front();
      q.pop();
      for (int ei : dm.class_edges[c]) {
        const IdentEdge& ed = dm.edges[ei];
        int other = -1;
        double r = 0.0;
        if (ed.a == d) {
          other = ed.b;
          r = rel[d] + edge_phi[ei];
        } else if (ed.b == d) {
          other = ed.a;
          r = rel[d] - edge_phi[ei];
        } else {
          continue;
        }
        if (!known[other]) {
          rel[other] = r;
          known[other] = 1;
          q.push(other);
          ++visited;
        } else {
          require(std::fabs(rel[other] - r) <= 1e-8 * scale,
                  "constraints: inconsistent jump data around an identification cycle");
        }
      }
    }
    require(visited == members.size(), "constraints: identification class not connected");

    if (dm.class_pinned[c]) {
      bool have = false;
      double v0 = 0.0;
      for (int d : members) {
        if (!dm.dirichlet[d]) continue;
        const DofInfo& info = dm.dofs[d];
        int side = (info.field == 0) ? -1 : +1;
        double gv = data.g[info.field].eval(info.x, side);
        double cand = gv - rel[d];
        if (!have) {
          v0 = cand;
          have = true;
        } else {
          require(std::fabs(cand - v0) <= 1e-8 * (1.0 + std::fabs(v0)),
                  "constraints: conflicting Dirichlet values in one class");
        }
      }
      require(have, "constraints: pinned class without a Dirichlet member");
      for (int d : members) cs.lift[d] = v0 + rel[d];
    } else {
      double r0 = rel[members[0]];
      for (int d : members) cs.lift[d] = rel[d] - r0;
    }
  }
  return cs;
}

struct ReducedSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  ConstraintSet cons;
};

inline ReducedSystem apply_constraints(const Eigen::MatrixXd& A,
                                       const Eigen::VectorXd& b, const DofMap& dm,
                                       const ProblemData& data) {
  ReducedSystem rs;
  rs.cons = build_constraints(dm, data);
  int N = dm.n_dofs(), nr = rs.cons.n_reduced;
  Eigen::Map<const Eigen::VectorXd> lift(rs.cons.lift.data(), N);
  Eigen::VectorXd r = b - A * lift;
  rs.A = Eigen::MatrixXd::Zero(nr, nr);
  rs.b = Eigen::VectorXd::Zero(nr);
  for (int m = 0; m < N; ++m) {
    int rm_ = rs.cons.red[m];
    if (rm_ < 0) continue;
    rs.b[rm_] += r[m];
    for (int n = 0; n < N; ++n) {
      int rn = rs.cons.red[n];
      if (rn >= 0) rs.A(rm_, rn) += A(m, n);
    }
  }
  return rs;
}

struct Solution {
  DofMap dm;
  Eigen::VectorXd coeffs;  // full dof values

  // branch-aware point evaluation of field `field`; `side` breaks ties when x
  // sits exactly on a cut point
  double eval(int field, double x, int side = 0) const {
    const Mesh& mesh = dm.mesh;
    int e = mesh.elem_index_at(x);
    double ntol = 1e-12 * mesh.h;
    auto value_on = [&](int elem, bool& ok) -> double {
      auto it = dm.elem_dofs[field].find(elem);
      if (it == dm.elem_dofs[field].end()) {
        ok = false;
        return 0.0;
      }
      ok = true;
      const ElemDofs& ed = it->second;
      const Element& el = mesh.elems[elem];
      double t = (x - el.lo) / mesh.h;
      double v = 0.0;
      if (!ed.cut) {
        for (size_t r = 0; r < ed.ids.size(); ++r)
          v += coeffs[ed.ids[r]] * lagrange_shape(dm.k, r, t);
        return v;
      }
      double alpha = dm.regions().zones[ed.cut_interface].alpha;
      bool left = (std::fabs(x - alpha) <= ntol) ? (side < 0) : (x < alpha);
      int base = left ? 0 : dm.k + 1;
      for (int r = 0; r <= dm.k; ++r)
        v += coeffs[ed.ids[base + r]] * lagrange_shape(dm.k, r, t);
      return v;
    };
    bool ok = false;
    double v = value_on(e, ok);
    if (!ok && e > 0 && std::fabs(x - mesh.elems[e].lo) <= ntol)
      v = value_on(e - 1, ok);
    require(ok, "solution: x outside the field's active region");
    return v;
  }
};

struct SolveInfo {
  double residual = 0.0;
  int n_reduced = 0;
};

inline Solution solve_system(const DofMap& dm, const Eigen::MatrixXd& A,
                             const Eigen::VectorXd& b, const ProblemData& data,
                             SolveInfo* info = nullptr) {
  ReducedSystem rs = apply_constraints(A, b, dm, data);
  int nr = rs.cons.n_reduced;
  Eigen::VectorXd ur(nr);
  double res = 0.0;
  if (nr > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt(rs.A);
    if (llt.info() != Eigen::Success)
      throw numeric_error("solve: reduced matrix is not positive definite");
    ur = llt.solve(rs.b);
    res = (rs.A * ur - rs.b).lpNorm<Eigen::Infinity>();
    double tol = 1e-10 * (1.0 + rs.b.lpNorm<Eigen::Infinity>());
    if (res > tol) throw numeric_error("solve: factorization residual too large");
  }
  Solution sol;
  sol.dm = dm;
  sol.coeffs.resize(dm.n_dofs());
  for (int d = 0; d < dm.n_dofs(); ++d) {
    int r = rs.cons.red[d];
    sol.coeffs[d] = (r >= 0) ? ur[r] + rs.cons.lift[d] : rs.cons.lift[d];
  }
  if (info) {
    info->residual = res;
    info->n_reduced = nr;
  }
  return sol;
}

// homogeneous prolongation (g = 0, phi = 0): full vector from reduced values
inline Eigen::VectorXd prolong_homogeneous(const DofMap& dm,
                                           const Eigen::VectorXd& ured) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dm.n_dofs());
  for (int d = 0; d < dm.n_dofs(); ++d)
    if (dm.red_index[d] >= 0) v[d] = ured[dm.red_index[d]];
  return v;
}

// residual of the full system tested against the free classes only
inline Eigen::VectorXd free_residual(const DofMap& dm, const Eigen::MatrixXd& A,
                                     const Eigen::VectorXd& b,
                                     const Solution& sol) {
  Eigen::VectorXd r = A * sol.coeffs - b;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dm.n_reduced);
  for (int d = 0; d < dm.n_dofs(); ++d)
    if (dm.red_index[d] >= 0) out[dm.red_index[d]] += r[d];
  return out;
}

inline void dump_matrix(const Eigen::MatrixXd& A, const std::string& path) {
  std::ofstream out(path);
  require(bool(out), "dump-matrix: cannot open " + path);
  char buf[80];
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      if (A(i, j) != 0.0) {
        std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", i, j, A(i, j));
        out << buf;
      }
}

}  // namespace nlifem
