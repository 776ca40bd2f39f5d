#pragma once

// Discrete operator machinery: the projected difference D(u), the truncated
// lattice operator, the bilinear form, energy seminorms, and stiffness
// assembly over interior DOFs. Quadrature is the midpoint lattice rule with
// the self-cell excluded. Pair displacements on periodic grids are the
// canonical torus representatives (offsets in (-n/2, n/2] per axis).

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "nlelast/core.hpp"
#include "nlelast/field.hpp"
#include "nlelast/geometry.hpp"
#include "nlelast/kernels.hpp"
#include "nlelast/threads.hpp"

namespace nlelast {

struct OperatorOptions {
  double eps = 0.0;                     // pairs with |x-y| <= eps are excluded
  double radius_cap = kInfiniteRadius;  // extra truncation for infinite-range kernels
  int threads = 1;
  std::size_t max_entries = 200'000'000;  // stiffness memory guard (matrix entries)
};

// D(u)(x,y) = (u(x) - u(y)) . (x-y)/|x-y| for two distinct grid points.
inline double projected_difference(const GridField& u, std::size_t ix, std::size_t iy) {
  require(ix != iy, ErrorKind::usage, "projected_difference: x and y coincide");
  Vec z = u.grid.point(ix) - u.grid.point(iy);
  double n = norm(z);
  require(n > 0.0, ErrorKind::usage, "projected_difference: coincident points");
  return dot(u.value(ix) - u.value(iy), z) / n;
}

// Interaction radius actually used on this grid: the kernel radius, clipped
// by the configured cap, by half the box on periodic grids (unique canonical
// displacements), and by the grid extent on bounded grids.
inline double effective_radius(const KernelSpec& k, const Grid& g,
                               double cap = kInfiniteRadius) {
  double r = std::min(truncation_radius(k), cap);
  if (g.periodic) {
    r = std::min(r, 0.5 * g.min_box_length());
  } else {
    double diag2 = 0.0;
    for (int a = 0; a < g.d; ++a) {
      double ext = (g.n[a] - 1) * g.h[a];
      diag2 += ext * ext;
    }
    r = std::min(r, std::sqrt(diag2));
  }
  require(std::isfinite(r) && r > 0.0, ErrorKind::usage,
          "effective_radius: no finite positive interaction radius");
  return r;
}

namespace detail {

struct StencilEntry {
  std::array<int, 3> o{};  // neighbor multi-index = point multi-index - o
  Vec z{1};                // displacement x - y = o * h (canonical on tori)
  Vec zhat{1};
  double weight = 0.0;  // cached kernel value (translation-invariant only)
};

struct Stencil {
  std::vector<StencilEntry> entries;
  double r_eff = 0.0;
  bool cached = false;  // weights precomputed (translation invariant)
};

inline Stencil build_stencil(const KernelSpec& k, const Grid& g,
                             const OperatorOptions& opt) {
  require(opt.eps >= 0.0, ErrorKind::usage, "operator: eps must be >= 0");
  Stencil st;
  st.r_eff = effective_radius(k, g, opt.radius_cap);
  st.cached = k.translation_invariant;
  const double bound = st.r_eff * (1.0 + 1e-12);

  int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
  for (int a = 0; a < g.d; ++a) {
    int m = static_cast<int>(std::floor(bound / g.h[a]));
    if (g.periodic) {
      lo[a] = -std::min(m, (g.n[a] - 1) / 2);
      hi[a] = std::min(m, g.n[a] / 2);
    } else {
      lo[a] = -std::min(m, g.n[a] - 1);
      hi[a] = std::min(m, g.n[a] - 1);
    }
  }

  Vec x0 = g.point(std::size_t{0});
  std::array<int, 3> o{0, 0, 0};
  for (o[0] = lo[0]; o[0] <= hi[0]; ++o[0])
    for (o[1] = lo[1]; o[1] <= hi[1]; ++o[1])
      for (o[2] = lo[2]; o[2] <= hi[2]; ++o[2]) {
        if (o[0] == 0 && o[1] == 0 && o[2] == 0) continue;
        Vec z(g.d);
        for (int a = 0; a < g.d; ++a) z[a] = o[a] * g.h[a];
        double n = norm(z);
        if (n > bound || n <= opt.eps) continue;
        StencilEntry e;
        e.o = o;
        e.z = z;
        e.zhat = (1.0 / n) * z;
        if (st.cached) {
          e.weight = eval_k_at(k, x0, x0 - z, z);
          // Keep zero-weight entries whose reversed orientation is active:
          // they still feed k_s / k_a in the bilinear form.
          if (e.weight == 0.0 &&
              (k.symmetric || eval_k_at(k, x0 - z, x0, -1.0 * z) == 0.0))
            continue;
        }
        st.entries.push_back(e);
      }
  return st;
}

// Neighbor grid index for point mi shifted by -o; false when it falls off a
// bounded grid.
inline bool neighbor_index(const Grid& g, const std::array<int, 3>& mi,
                           const std::array<int, 3>& o, std::size_t& out) {
  std::array<int, 3> nj{0, 0, 0};
  for (int a = 0; a < g.d; ++a) {
    int v = mi[a] - o[a];
    if (g.periodic) {
      v %= g.n[a];
      if (v < 0) v += g.n[a];
    } else if (v < 0 || v >= g.n[a]) {
      return false;
    }
    nj[a] = v;
  }
  out = g.flatten(nj);
  return true;
}

inline double pair_weight(const KernelSpec& k, const Stencil& st,
                          const detail::StencilEntry& e, const Vec& x, const Vec& y) {
  return st.cached ? e.weight : eval_k_at(k, x, y, e.z);
}

}  // namespace detail

// (L_n u)(x) = h^d sum_{y != x, |x-y| > eps} k(x,y) D(u)(x,y) (x-y)/|x-y|.
inline GridField apply_Ln(const KernelSpec& k, const GridField& u,
                          const OperatorOptions& opt = {},
                          const DomainMask* mask = nullptr) {
  const Grid& g = u.grid;
  require(u.components == g.d, ErrorKind::usage, "apply_Ln: field must have d components");
  if (mask)
    require(g.same_layout(mask->grid), ErrorKind::usage, "apply_Ln: mask grid mismatch");
  detail::Stencil st = detail::build_stencil(k, g, opt);
  GridField out(g, g.d);
  const double vol = g.cell_volume();

  parallel_for(g.num_points(), opt.threads, [&](std::size_t i) {
    if (mask && !mask->is_interior(i)) return;  // exterior rows stay zero
    std::array<int, 3> mi = g.unflatten(i);
    Vec x = g.point(i);
    Vec ui = u.value(i);
    Vec acc(g.d);
    for (const auto& e : st.entries) {
      std::size_t j;
      if (!detail::neighbor_index(g, mi, e.o, j)) continue;
      Vec y = x - e.z;
      double w = detail::pair_weight(k, st, e, x, y);
      if (w == 0.0) continue;
      double du = dot(ui - u.value(j), e.zhat);
      acc = acc + (w * du) * e.zhat;
    }
    out.set_value(i, vol * acc);
  });
  return out;
}

// F^k_n(u,v) = 1/2 sum sum k_s D(u) D(v) h^{2d} + sum sum k_a D(u) (v(x).zhat) h^{2d}.
inline double bilinear_form(const KernelSpec& k, const GridField& u, const GridField& v,
                            const OperatorOptions& opt = {}) {
  const Grid& g = u.grid;
  require_same_shape(u, v, "bilinear_form");
  require(u.components == g.d, ErrorKind::usage,
          "bilinear_form: fields must have d components");
  detail::Stencil st = detail::build_stencil(k, g, opt);
  const double w2 = g.cell_volume() * g.cell_volume();
  const bool sym = k.symmetric;

  std::vector<double> partial(g.num_points(), 0.0);
  parallel_for(g.num_points(), opt.threads, [&](std::size_t i) {
    std::array<int, 3> mi = g.unflatten(i);
    Vec x = g.point(i);
    Vec ui = u.value(i), vi = v.value(i);
    double acc = 0.0;
    for (const auto& e : st.entries) {
      std::size_t j;
      if (!detail::neighbor_index(g, mi, e.o, j)) continue;
      Vec y = x - e.z;
      double du = dot(ui - u.value(j), e.zhat);
      if (sym) {
        double ks = detail::pair_weight(k, st, e, x, y);
        if (ks == 0.0) continue;
        double dv = dot(vi - v.value(j), e.zhat);
        acc += 0.5 * ks * du * dv;
      } else {
        double ks = eval_ks_at(k, x, y, e.z);
        double ka = eval_ka_at(k, x, y, e.z);
        if (ks != 0.0) {
          double dv = dot(vi - v.value(j), e.zhat);
          acc += 0.5 * ks * du * dv;
        }
        if (ka != 0.0) acc += ka * du * dot(vi, e.zhat);
      }
    }
    partial[i] = acc;
  });

  double total = 0.0;
  for (double p : partial) total += p;
  return w2 * total;
}

// [u,u]_S = sum sum k_s D(u)^2 h^{2d}, diagonal excluded.
inline double energy_seminorm(const KernelSpec& k, const GridField& u,
                              const OperatorOptions& opt = {}) {
  const Grid& g = u.grid;
  require(u.components == g.d, ErrorKind::usage,
          "energy_seminorm: field must have d components");
  detail::Stencil st = detail::build_stencil(k, g, opt);
  const double w2 = g.cell_volume() * g.cell_volume();

  std::vector<double> partial(g.num_points(), 0.0);
  parallel_for(g.num_points(), opt.threads, [&](std::size_t i) {
    std::array<int, 3> mi = g.unflatten(i);
    Vec x = g.point(i);
    Vec ui = u.value(i);
    double acc = 0.0;
    for (const auto& e : st.entries) {
      std::size_t j;
      if (!detail::neighbor_index(g, mi, e.o, j)) continue;
      Vec y = x - e.z;
      double ks = k.symmetric ? detail::pair_weight(k, st, e, x, y)
                              : eval_ks_at(k, x, y, e.z);
      if (ks == 0.0) continue;
      double du = dot(ui - u.value(j), e.zhat);
      acc += ks * du * du;
    }
    partial[i] = acc;
  });

  double total = 0.0;
  for (double p : partial) total += p;
  return w2 * total;
}

// Energy norm of the variational space: ||u||_V^2 = ||u||_{L2}^2 + [u,u]_S.
inline double v_norm_squared(const KernelSpec& k, const GridField& u,
                             const OperatorOptions& opt = {}) {
  double l2 = l2_norm(u);
  return l2 * l2 + energy_seminorm(k, u, opt);
}

// Pair part of [u,u]_{V(Omega;k)}: k_s D(u)^2 over pairs with at least one
// interior endpoint (both-exterior pairs do not see the solution).
inline double omega_seminorm(const KernelSpec& k, const GridField& u,
                             const DomainMask& mask, const OperatorOptions& opt = {}) {
  const Grid& g = u.grid;
  require(g.same_layout(mask.grid), ErrorKind::usage, "omega_seminorm: grid mismatch");
  require(u.components == g.d, ErrorKind::usage,
          "omega_seminorm: field must have d components");
  detail::Stencil st = detail::build_stencil(k, g, opt);
  const double w2 = g.cell_volume() * g.cell_volume();

  std::vector<double> partial(static_cast<std::size_t>(g.num_points()), 0.0);
  parallel_for(static_cast<std::size_t>(g.num_points()), opt.threads, [&](std::size_t i) {
    std::array<int, 3> mi = g.unflatten(static_cast<int64_t>(i));
    bool i_in = mask.is_interior(static_cast<int64_t>(i));
    Vec x = g.point(static_cast<int64_t>(i));
    Vec ui = u.value(i);
    double acc = 0.0;
    for (const auto& e : st.entries) {
      std::size_t j;
      if (!detail::neighbor_index(g, mi, e.o, j)) continue;
      if (!i_in && !mask.is_interior(static_cast<int64_t>(j))) continue;
      Vec y = x - e.z;
      double ks = k.symmetric ? detail::pair_weight(k, st, e, x, y)
                              : eval_ks_at(k, x, y, e.z);
      if (ks == 0.0) continue;
      double du = dot(ui - u.value(j), e.zhat);
      acc += ks * du * du;
    }
    partial[i] = acc;
  });

  double total = 0.0;
  for (double p : partial) total += p;
  return w2 * total;
}

struct CsrMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::uint32_t> col;
  std::vector<double> val;
  bool symmetric_flag = false;

  void matvec(const std::vector<double>& x, std::vector<double>& y, int threads = 1) const {
    require(x.size() == cols && y.size() == rows, ErrorKind::usage,
            "matvec: dimension mismatch");
    parallel_for(rows, threads, [&](std::size_t r) {
      double acc = 0.0;
      for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p)
        acc += val[p] * x[col[p]];
      y[r] = acc;
    });
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : val) m = std::max(m, std::abs(v));
    return m;
  }
};

// Stiffness restricted to interior DOFs, DOF order (interior ordinal) * d + component.
struct DirichletSystem {
  Grid grid{1, {2, 1, 1}, {1.0, 1.0, 1.0}, false};
  int dim = 0;
  std::vector<std::size_t> interior;       // ascending grid indices
  std::vector<std::uint32_t> ordinal_of;   // grid index -> ordinal, UINT32_MAX outside
  CsrMatrix A;                             // entries carry the h^{2d} pair weight
  double mass = 0.0;                       // diagonal mass h^d

  std::size_t dofs() const { return interior.size() * static_cast<std::size_t>(dim); }
};

// Row block for test point i: diagonal  sum_y k(x_i,y) zhat zhat^T  over every
// in-grid neighbor, off-diagonal -k(x_i,x_j) zhat zhat^T for interior j; all
// times h^{2d}. Then w^T A z = F^k_n(z-field, w-field) for interior-supported
// fields, rows being test DOFs.
inline DirichletSystem assemble_stiffness(const KernelSpec& k, const DomainMask& mask,
                                          const OperatorOptions& opt = {}) {
  const Grid& g = mask.grid;
  detail::Stencil st = detail::build_stencil(k, g, opt);
  if (!g.periodic) {
    double collar = mask.collar_width();
    require(collar >= st.r_eff * (1.0 - 1e-12), ErrorKind::usage,
            "assemble_stiffness: mask collar narrower than the interaction radius");
  }

  DirichletSystem sys;
  sys.grid = g;
  sys.dim = g.d;
  sys.mass = g.cell_volume();
  sys.ordinal_of.assign(g.num_points(), UINT32_MAX);
  for (std::size_t i = 0; i < g.num_points(); ++i)
    if (mask.is_interior(i)) {
      require(sys.interior.size() < UINT32_MAX, ErrorKind::usage,
              "assemble_stiffness: too many interior points");
      sys.ordinal_of[i] = static_cast<std::uint32_t>(sys.interior.size());
      sys.interior.push_back(i);
    }

  const std::size_t nint = sys.interior.size();
  const int d = g.d;
  std::size_t upper = nint * static_cast<std::size_t>(d) * d * (st.entries.size() + 1);
  require(upper <= opt.max_entries, ErrorKind::usage,
          "assemble_stiffness: stencil exceeds the configured memory budget");

  CsrMatrix& A = sys.A;
  A.rows = A.cols = sys.dofs();
  A.symmetric_flag = k.symmetric;
  A.row_ptr.assign(A.rows + 1, 0);
  const double w2 = sys.mass * sys.mass;

  std::vector<std::vector<std::pair<std::uint32_t, Mat>>> blocks(nint);
  parallel_for(nint, opt.threads, [&](std::size_t ii) {
    std::size_t gi = sys.interior[ii];
    std::array<int, 3> mi = g.unflatten(gi);
    Vec x = g.point(gi);
    Mat diag(d);
    auto& row = blocks[ii];
    for (const auto& e : st.entries) {
      std::size_t j;
      if (!detail::neighbor_index(g, mi, e.o, j)) continue;
      double w = detail::pair_weight(k, st, e, x, x - e.z);
      if (w == 0.0) continue;
      Mat p = outer(e.zhat, e.zhat);
      diag = diag + w * p;
      std::uint32_t jj = sys.ordinal_of[j];
      if (jj != UINT32_MAX) row.emplace_back(jj, (-w) * p);
    }
    row.emplace_back(static_cast<std::uint32_t>(ii), diag);
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  });

  for (std::size_t ii = 0; ii < nint; ++ii)
    for (int a = 0; a < d; ++a)
      A.row_ptr[ii * d + a + 1] = blocks[ii].size() * d;
  for (std::size_t r = 0; r < A.rows; ++r) A.row_ptr[r + 1] += A.row_ptr[r];

  A.col.assign(A.row_ptr.back(), 0);
  A.val.assign(A.row_ptr.back(), 0.0);
  for (std::size_t ii = 0; ii < nint; ++ii)
    for (int a = 0; a < d; ++a) {
      std::size_t p = A.row_ptr[ii * d + a];
      for (const auto& [jj, blk] : blocks[ii])
        for (int b = 0; b < d; ++b, ++p) {
          A.col[p] = jj * d + b;
          A.val[p] = w2 * blk(a, b);
        }
    }
  return sys;
}

inline std::vector<double> restrict_to_dofs(const DirichletSystem& sys,
                                            const GridField& u) {
  require(u.grid.same_layout(sys.grid) && u.components == sys.dim, ErrorKind::usage,
          "restrict_to_dofs: field shape mismatch");
  std::vector<double> x(sys.dofs());
  for (std::size_t ii = 0; ii < sys.interior.size(); ++ii)
    for (int a = 0; a < sys.dim; ++a)
      x[ii * sys.dim + a] = u.at(a, sys.interior[ii]);
  return x;
}

// Interior DOFs from x, zero elsewhere.
inline GridField extend_by_zero(const DirichletSystem& sys, const std::vector<double>& x) {
  require(x.size() == sys.dofs(), ErrorKind::usage, "extend_by_zero: size mismatch");
  GridField u(sys.grid, sys.dim);
  for (std::size_t ii = 0; ii < sys.interior.size(); ++ii)
    for (int a = 0; a < sys.dim; ++a)
      u.at(a, sys.interior[ii]) = x[ii * sys.dim + a];
  return u;
}

}  // namespace nlelast
