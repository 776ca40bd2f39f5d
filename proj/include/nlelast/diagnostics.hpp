#pragma once

// Certification diagnostics: spectral fractional seminorms, Korn equivalence
// constants, the Poincare-Korn constant, rigid-motion detection, the cutoff
// commutator residual, and interior regularity studies. All diagnostics are
// pure functions of their inputs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nlelast/core.hpp"
#include "nlelast/fft.hpp"
#include "nlelast/field.hpp"
#include "nlelast/geometry.hpp"
#include "nlelast/kernels.hpp"
#include "nlelast/linalg.hpp"
#include "nlelast/operator.hpp"
#include "nlelast/solver.hpp"
#include "nlelast/symbol.hpp"

namespace nlelast {

// Squared H^sigma seminorm on the periodic grid: sum_xi |xi|^{2 sigma}
// |uhat(xi)|^2 / V over all components, via FFT.
inline double hs_seminorm(const GridField& u, double sigma) {
  require(u.grid.periodic, ErrorKind::usage, "hs_seminorm: grid must be periodic");
  require(sigma > 0.0 && sigma < 2.0, ErrorKind::usage,
          "hs_seminorm: sigma outside (0,2)");
  Spectrum s = forward_fft(u);
  double acc = 0.0;
  for (std::size_t idx = 0; idx < s.points(); ++idx) {
    double nxi = norm(s.frequency(idx));
    if (nxi == 0.0) continue;
    double w = std::pow(nxi, 2.0 * sigma);
    for (int c = 0; c < u.components; ++c) acc += w * std::norm(s.at(c, idx));
  }
  return acc / s.box_volume();
}

// (-Delta)^s acting componentwise via the multiplier |2 pi xi|^{2s}.
inline GridField fractional_laplacian(const GridField& u, double s) {
  require(u.grid.periodic, ErrorKind::usage,
          "fractional_laplacian: grid must be periodic");
  require(s > 0.0 && s < 1.0, ErrorKind::usage,
          "fractional_laplacian: s outside (0,1)");
  Spectrum sp = forward_fft(u);
  for (std::size_t idx = 0; idx < sp.points(); ++idx) {
    double w = std::pow(2.0 * M_PI * norm(sp.frequency(idx)), 2.0 * s);
    for (int c = 0; c < u.components; ++c) sp.at(c, idx) *= w;
  }
  return inverse_fft(sp);
}

// Grid L^p norm (h^d sum |u(x)|^p)^{1/p} with the pointwise Euclidean norm
// across components.
inline double lp_norm(const GridField& u, double p) {
  require(p >= 1.0, ErrorKind::usage, "lp_norm: p must be >= 1");
  double acc = 0.0;
  for (std::size_t i = 0; i < u.points(); ++i) {
    double v2 = 0.0;
    for (int c = 0; c < u.components; ++c) v2 += u.at(c, i) * u.at(c, i);
    acc += std::pow(std::sqrt(v2), p);
  }
  return std::pow(u.grid.cell_volume() * acc, 1.0 / p);
}

// Reinterprets a bounded-grid field on the periodic torus of the same layout.
// Sound whenever the data decays inside the box (compact support).
inline GridField periodic_embedding(const GridField& u) {
  if (u.grid.periodic) return u;
  Grid g(u.grid.d, u.grid.n, u.grid.h, /*is_periodic=*/true, u.grid.origin);
  GridField out(g, u.components);
  out.data = u.data;
  return out;
}

// ---------------------------------------------------------------------------
// Cutoffs: quintic smoothstep bump, identically 1 inside r_in and 0 outside
// r_out; C^2 across both joints.
// ---------------------------------------------------------------------------

struct Cutoff {
  Vec center{1};
  double r_in = 0.0;
  double r_out = 0.0;
  std::string id;

  double value(const Vec& x) const {
    double rho = norm(x - center);
    if (rho <= r_in) return 1.0;
    if (rho >= r_out) return 0.0;
    double t = (rho - r_in) / (r_out - r_in);
    double st = t * t * t * (t * (6.0 * t - 15.0) + 10.0);
    return 1.0 - st;
  }
};

inline Cutoff quintic_cutoff(const Vec& center, double r_in, double r_out,
                             const std::string& id = "quintic") {
  require(r_in > 0.0 && r_out > r_in, ErrorKind::usage,
          "quintic_cutoff: need 0 < r_in < r_out");
  Cutoff c;
  c.center = center;
  c.r_in = r_in;
  c.r_out = r_out;
  c.id = id;
  return c;
}

inline GridField sample_cutoff(const Grid& g, const Cutoff& c) {
  require(c.center.d == g.d, ErrorKind::usage, "sample_cutoff: dimension mismatch");
  GridField out(g, 1);
  for (int64_t i = 0; i < g.num_points(); ++i)
    out.at(0, static_cast<std::size_t>(i)) = c.value(g.point(i));
  return out;
}

// eta * u componentwise (eta scalar).
inline GridField cutoff_multiply(const GridField& eta, const GridField& u) {
  require(eta.components == 1, ErrorKind::usage, "cutoff_multiply: eta must be scalar");
  require(eta.grid.same_layout(u.grid), ErrorKind::usage,
          "cutoff_multiply: grid mismatch");
  GridField out = u;
  for (std::size_t i = 0; i < u.points(); ++i)
    for (int c = 0; c < u.components; ++c) out.at(c, i) = eta.at(0, i) * u.at(c, i);
  return out;
}

// ---------------------------------------------------------------------------
// Korn equivalence
// ---------------------------------------------------------------------------

struct LabeledField {
  std::string label;
  GridField field;
};

// Band-limited random fields (modes with |m| in [kmin, kmax] on the integer
// frequency lattice of the box) plus near-rigid adversarial fields: on the
// torus the rigid motions representable periodically are the constants, so
// the adversarial family is constant + eps * band-limited noise.
inline std::vector<LabeledField> korn_field_suite(const Grid& g, int count,
                                                  double ximin, double ximax,
                                                  std::uint64_t seed) {
  require(g.periodic, ErrorKind::usage, "korn_field_suite: grid must be periodic");
  require(count >= 1 && ximax >= ximin && ximin > 0.0, ErrorKind::usage,
          "korn_field_suite: bad band");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> amp(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  const int d = g.d;

  auto band_field = [&]() {
    GridField u(g, d);
    for (int mode = 0; mode < 8; ++mode) {
      Vec xi(d);
      bool found = false;
      for (int tries = 0; tries < 4096 && !found; ++tries) {
        for (int a = 0; a < d; ++a) {
          double fmax = 0.5 / g.h[static_cast<std::size_t>(a)];
          int mmax = static_cast<int>(std::floor(ximax * g.box_length(a)));
          mmax = std::min(mmax, static_cast<int>(std::floor(fmax * g.box_length(a))) - 1);
          require(mmax >= 1, ErrorKind::usage,
                  "korn_field_suite: band not resolvable on this grid");
          std::uniform_int_distribution<int> mm(-mmax, mmax);
          xi[a] = mm(rng) / g.box_length(a);
        }
        double nxi = norm(xi);
        found = nxi >= ximin && nxi <= ximax;
      }
      require(found, ErrorKind::usage,
              "korn_field_suite: frequency band contains no lattice mode");
      double a0 = amp(rng);
      double ph = phase(rng);
      std::uniform_int_distribution<int> comp(0, d - 1);
      int c = comp(rng);
      for (int64_t i = 0; i < g.num_points(); ++i) {
        Vec x = g.point(i);
        u.at(c, static_cast<std::size_t>(i)) +=
            a0 * std::cos(2.0 * M_PI * dot(xi, x) + ph);
      }
    }
    return u;
  };

  std::vector<LabeledField> suite;
  for (int i = 0; i < count; ++i)
    suite.push_back({"band-" + std::to_string(i), band_field()});

  GridField constant(g, d);
  for (std::size_t i = 0; i < constant.points(); ++i)
    for (int c = 0; c < d; ++c) constant.at(c, i) = 1.0 + 0.25 * c;
  suite.push_back({"constant", constant});
  for (double eps : {1e-2, 1e-4}) {
    GridField u = constant;
    axpy(u, eps, band_field());
    std::ostringstream label;
    label << "near-rigid-eps-" << eps;
    suite.push_back({label.str(), u});
  }
  return suite;
}

struct KornReport {
  double C1_est = 0.0;
  double C2_est = 0.0;
  double beta_r = 0.0;
  int fields_tested = 0;
  std::string worst_case_field;
};

// Tightest constants with  C1 [u,u]_S <= |u|^2_{H^s}  and
// |u|^2_{H^s} <= C2 ([u,u]_S + beta(r) ||u||^2_{L2})  across the suite.
// beta(r) is the closed-form cone tail mass for truncated kernels and absent
// (zero) at r = infinity. The upper constant is floored at the lower one so
// the pair is always consistent.
inline KornReport korn_equivalence(const KernelSpec& k,
                                   const std::vector<LabeledField>& suite,
                                   const OperatorOptions& opt = {}) {
  require(k.family == KernelFamily::fractional_cone, ErrorKind::usage,
          "korn_equivalence: kernel must be a fractional cone kernel");
  require(!suite.empty(), ErrorKind::usage, "korn_equivalence: empty field suite");
  KornReport rep;
  rep.beta_r = std::isfinite(k.r) ? cone_tail_mass(k.cone, k.s, k.r) : 0.0;

  double c1 = std::numeric_limits<double>::infinity();
  double c2 = 0.0;
  const double floor_scale = 1e-14;
  for (const auto& lf : suite) {
    const GridField& u = lf.field;
    require(u.grid.periodic && u.components == u.grid.d, ErrorKind::usage,
            "korn_equivalence: fields must be periodic with d components");
    double semi = energy_seminorm(k, u, opt);
    double hs = hs_seminorm(u, k.s);
    double l2 = l2_norm(u);
    double lower_den = semi;
    double upper_den = semi + rep.beta_r * l2 * l2;
    double scale = hs + semi + l2 * l2;
    if (lower_den > floor_scale * scale) c1 = std::min(c1, hs / lower_den);
    if (upper_den > floor_scale * scale) {
      double ratio = hs / upper_den;
      if (ratio > c2) {
        c2 = ratio;
        rep.worst_case_field = lf.label;
      }
    }
    ++rep.fields_tested;
  }
  require(std::isfinite(c1) && c2 > 0.0, ErrorKind::usage,
          "korn_equivalence: suite has no field with nonzero energy");
  rep.C1_est = c1;
  rep.C2_est = std::max(c2, c1);

  // Re-certify; a failure here is a bug in the extremal bookkeeping.
  for (const auto& lf : suite) {
    double semi = energy_seminorm(k, lf.field, opt);
    double hs = hs_seminorm(lf.field, k.s);
    double l2 = l2_norm(lf.field);
    double slack = 1e-10 * (hs + semi + l2 * l2 + 1.0);
    if (rep.C1_est * semi > hs + slack ||
        hs > rep.C2_est * (semi + rep.beta_r * l2 * l2) + slack)
      throw Error(ErrorKind::internal,
                  "korn_equivalence: inequality violation on field " + lf.label);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Poincare-Korn constant
// ---------------------------------------------------------------------------

// C_P = 1 / lambda_min of the symmetric-part stiffness against the lumped
// mass h^d, by inverse iteration. A nonpositive eigenvalue (or indefinite
// curvature met by the inner solver) means the kernel fails the discrete
// Poincare-Korn inequality on this mask.
inline double pk_constant(const KernelSpec& k, const DomainMask& mask,
                          const OperatorOptions& opt = {}) {
  KernelSpec ks = symmetrized(k);
  DirichletSystem sys = assemble_stiffness(ks, mask, opt);
  require(sys.dofs() > 0, ErrorKind::usage, "pk_constant: mask has no interior points");
  MatVecFn apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    sys.A.matvec(x, y, opt.threads);
  };
  EigenEstimate est = smallest_eigenvalue(apply, sys.dofs(), sys.mass);
  if (!(est.value > 0.0)) {
    std::ostringstream msg;
    msg << "pk_constant: coercivity violation: smallest stiffness eigenvalue "
        << est.value << " is not positive";
    throw Error(ErrorKind::hypothesis, msg.str());
  }
  return 1.0 / est.value;
}

// ---------------------------------------------------------------------------
// Rigid-motion detection
// ---------------------------------------------------------------------------

struct RigidMotionFit {
  bool is_rigid = false;
  Mat A{1};  // skew-symmetric
  Vec b{1};
  double rel_residual = 0.0;
  double max_pair_difference = 0.0;
};

// Least-squares fit of u to A x + b with A skew-symmetric; rigid iff the fit
// residual is <= tol * ||u|| and, independently, |D(u)| <= tol on sampled
// pairs.
inline RigidMotionFit rigid_motion_test(const GridField& u, double tol,
                                        std::uint64_t seed = 20240817) {
  const Grid& g = u.grid;
  const int d = g.d;
  require(u.components == d, ErrorKind::usage,
          "rigid_motion_test: field must have d components");
  const std::size_t npts = u.points();

  Vec xbar(d), ubar(d);
  for (std::size_t i = 0; i < npts; ++i) {
    xbar = xbar + g.point(static_cast<int64_t>(i));
    ubar = ubar + u.value(i);
  }
  xbar = (1.0 / static_cast<double>(npts)) * xbar;
  ubar = (1.0 / static_cast<double>(npts)) * ubar;

  // Skew basis E_(p,q): (E x)_p = x_q, (E x)_q = -x_p.
  std::vector<std::pair<int, int>> basis;
  for (int p = 0; p < d; ++p)
    for (int q = p + 1; q < d; ++q) basis.emplace_back(p, q);
  const int m = static_cast<int>(basis.size());

  RigidMotionFit fit;
  fit.A = Mat(d);
  fit.b = Vec(d);
  if (m > 0) {
    Mat gram(m);
    std::array<double, kMaxDim> rhs{0.0, 0.0, 0.0};
    auto apply_basis = [&](int kk, const Vec& x) {
      Vec out(d);
      out[basis[static_cast<std::size_t>(kk)].first] =
          x[basis[static_cast<std::size_t>(kk)].second];
      out[basis[static_cast<std::size_t>(kk)].second] =
          -x[basis[static_cast<std::size_t>(kk)].first];
      return out;
    };
    for (std::size_t i = 0; i < npts; ++i) {
      Vec xt = g.point(static_cast<int64_t>(i)) - xbar;
      Vec ut = u.value(i) - ubar;
      for (int a = 0; a < m; ++a) {
        Vec ea = apply_basis(a, xt);
        rhs[static_cast<std::size_t>(a)] += dot(ut, ea);
        for (int bidx = a; bidx < m; ++bidx) {
          double v = dot(ea, apply_basis(bidx, xt));
          gram(a, bidx) += v;
        }
      }
    }
    for (int a = 0; a < m; ++a)
      for (int bidx = 0; bidx < a; ++bidx) gram(a, bidx) = gram(bidx, a);
    auto coeff = solve_small(gram, rhs);
    for (int a = 0; a < m; ++a) {
      fit.A(basis[static_cast<std::size_t>(a)].first,
            basis[static_cast<std::size_t>(a)].second) =
          coeff[static_cast<std::size_t>(a)];
      fit.A(basis[static_cast<std::size_t>(a)].second,
            basis[static_cast<std::size_t>(a)].first) =
          -coeff[static_cast<std::size_t>(a)];
    }
  }
  fit.b = ubar - fit.A * xbar;

  double res2 = 0.0, norm2 = 0.0;
  for (std::size_t i = 0; i < npts; ++i) {
    Vec x = g.point(static_cast<int64_t>(i));
    Vec r = u.value(i) - (fit.A * x + fit.b);
    res2 += dot(r, r);
    norm2 += dot(u.value(i), u.value(i));
  }
  fit.rel_residual = norm2 > 0.0 ? std::sqrt(res2 / norm2) : 0.0;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, npts - 1);
  const int samples = 256;
  for (int t = 0; t < samples; ++t) {
    std::size_t ix = pick(rng), iy = pick(rng);
    if (ix == iy) continue;
    fit.max_pair_difference =
        std::max(fit.max_pair_difference, std::abs(projected_difference(u, ix, iy)));
  }
  fit.is_rigid = fit.rel_residual <= tol && fit.max_pair_difference <= tol;
  return fit;
}

// ---------------------------------------------------------------------------
// Localization (cutoff commutator) residual
// ---------------------------------------------------------------------------

struct LocalizationReport {
  GridField g{Grid(1, {{2, 1, 1}}, {{1.0, 1.0, 1.0}}, false), 1};
  double g_l2 = 0.0;
  double i1_l2 = 0.0;  // (L eta) u piece
  double i2_l2 = 0.0;  // I_s(u, eta) piece
  double u_hs_norm = 0.0;
  double c_total = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

// g(x) = [(L eta)(x)] u(x) - I_s(u, eta)(x) with
//   (L eta)(x)   = h^d sum_y k(x,y) (eta(x) - eta(y)) zhat zhat^T,
//   I_s(u,eta)(x) = h^d sum_y k(x,y) (eta(x) - eta(y)) D(u)(x,y) zhat,
// diagonal excluded. The measured constants ||g|| / ||u||_{H^s} (and per
// piece) are recorded, not asserted.
inline LocalizationReport localization_residual(const KernelSpec& k,
                                                const GridField& u,
                                                const GridField& eta,
                                                const DomainMask& mask,
                                                const OperatorOptions& opt = {}) {
  const Grid& g = mask.grid;
  require(u.grid.same_layout(g) && eta.grid.same_layout(g), ErrorKind::usage,
          "localization_residual: grid mismatch");
  require(eta.components == 1, ErrorKind::usage,
          "localization_residual: cutoff must be a scalar field");
  require(u.components == g.d, ErrorKind::usage,
          "localization_residual: field must have d components");
  for (std::size_t i = 0; i < eta.points(); ++i)
    if (eta.at(0, i) != 0.0 && !mask.is_interior(static_cast<int64_t>(i)))
      throw Error(ErrorKind::usage,
                  "localization_residual: invalid cutoff: support touches the collar");

  detail::Stencil st = detail::build_stencil(k, g, opt);
  const double hd = g.cell_volume();
  const int d = g.d;

  LocalizationReport rep;
  GridField i1(g, d), i2(g, d);
  for (int64_t ii = 0; ii < g.num_points(); ++ii) {
    std::size_t i = static_cast<std::size_t>(ii);
    auto mi = g.unflatten(ii);
    Vec x = g.point(ii);
    Vec ux = u.value(i);
    double ex = eta.at(0, i);
    Vec acc1(d), acc2(d);
    for (const auto& e : st.entries) {
      std::size_t j;
      if (!detail::neighbor_index(g, mi, e.o, j)) continue;
      double w = st.cached ? e.weight : eval_k_at(k, x, x - e.z, e.z);
      if (w == 0.0) continue;
      double de = ex - eta.at(0, j);
      if (de == 0.0) continue;
      double proj = dot(ux - u.value(j), e.zhat);
      double un = dot(ux, e.zhat);
      acc1 = acc1 + (w * de * un) * e.zhat;
      acc2 = acc2 + (w * de * proj) * e.zhat;
    }
    for (int c = 0; c < d; ++c) {
      i1.at(c, i) = hd * acc1[c];
      i2.at(c, i) = hd * acc2[c];
    }
  }

  rep.g = i1;
  axpy(rep.g, -1.0, i2);
  rep.g_l2 = l2_norm(rep.g);
  rep.i1_l2 = l2_norm(i1);
  rep.i2_l2 = l2_norm(i2);
  double l2u = l2_norm(u);
  double hs = hs_seminorm(periodic_embedding(u), k.s);
  rep.u_hs_norm = std::sqrt(l2u * l2u + hs);
  if (rep.u_hs_norm > 0.0) {
    rep.c_total = rep.g_l2 / rep.u_hs_norm;
    rep.c1 = rep.i1_l2 / rep.u_hs_norm;
    rep.c2 = rep.i2_l2 / rep.u_hs_norm;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Interior regularity study
// ---------------------------------------------------------------------------

struct RegularityLevel {
  int level = 0;
  double h = 0.0;
  double local_norm = 0.0;
  double f_norm = 0.0;
  double ratio = 0.0;
};

struct RegularityReport {
  double s = 0.0;
  double p = 2.0;
  double local_norm = 0.0;  // finest level
  double f_norm = 0.0;
  double ratio = 0.0;
  std::string cutoff_id;
  std::vector<RegularityLevel> levels;
  bool bounded = false;  // max/min ratio <= 2 across the top two levels
};

// Critical exponent 2*_s = 2d / (d - 2s), infinite when 2s >= d.
inline double sobolev_conjugate(int d, double s) {
  require(d >= 1 && s > 0.0 && s < 1.0, ErrorKind::usage,
          "sobolev_conjugate: bad arguments");
  if (2.0 * s >= static_cast<double>(d))
    return std::numeric_limits<double>::infinity();
  return 2.0 * d / (d - 2.0 * s);
}

struct RegularityStudyOptions {
  int levels = 3;
  bool lp_evidence = false;  // caller-supplied evidence that u is in L^p (p > 2*_s)
  SolverOptions solve;
};

// Solves the zero-constraint problem per refinement level (n doubled, h
// halved), localizes with the cutoff, and measures |eta u|_{H^{2s}} (p = 2,
// spectrally) or ||(-Delta)^s (eta u)||_{L^p} (p > 2) against ||f||. Data and
// cutoff are sampled analytically per level; the data is restricted to the
// mask interior.
inline RegularityReport interior_regularity_study(
    const KernelSpec& k, const std::function<Vec(const Vec&)>& f_fn,
    const std::function<bool(const Vec&)>& interior_pred, const Cutoff& eta,
    double p, const Grid& base_grid, const RegularityStudyOptions& opt = {}) {
  require(!base_grid.periodic, ErrorKind::usage,
          "interior_regularity_study: base grid must be bounded");
  require(opt.levels >= 1, ErrorKind::usage,
          "interior_regularity_study: need at least one level");
  require(p >= 2.0, ErrorKind::usage, "interior_regularity_study: p must be >= 2");
  double pstar = sobolev_conjugate(base_grid.d, k.s);
  if (p > pstar)
    require(opt.lp_evidence, ErrorKind::usage,
            "interior_regularity_study: p exceeds the critical exponent; "
            "supply L^p evidence for the data");

  RegularityReport rep;
  rep.s = k.s;
  rep.p = p;
  rep.cutoff_id = eta.id;

  for (int lev = 0; lev < opt.levels; ++lev) {
    std::array<int, kMaxDim> n = base_grid.n;
    std::array<double, kMaxDim> h = base_grid.h;
    for (int a = 0; a < base_grid.d; ++a) {
      n[static_cast<std::size_t>(a)] <<= lev;
      h[static_cast<std::size_t>(a)] /= static_cast<double>(1 << lev);
    }
    Grid g(base_grid.d, n, h, /*is_periodic=*/false, base_grid.origin);
    DomainMask mask(g, interior_pred);
    GridField f = sample_field(g, g.d, f_fn);
    enforce_mask(f, mask);

    SolveReport solved = solve_dirichlet(k, f, mask, opt.solve);
    GridField etau = cutoff_multiply(sample_cutoff(g, eta), solved.solution);
    GridField embedded = periodic_embedding(etau);

    RegularityLevel row;
    row.level = lev;
    row.h = h[0];
    if (p == 2.0) {
      row.local_norm = std::sqrt(hs_seminorm(embedded, 2.0 * k.s));
      row.f_norm = l2_norm(f);
    } else {
      row.local_norm = lp_norm(fractional_laplacian(embedded, k.s), p);
      row.f_norm = lp_norm(f, p);
    }
    require(row.f_norm > 0.0, ErrorKind::usage,
            "interior_regularity_study: data vanishes on the mask interior");
    row.ratio = row.local_norm / row.f_norm;
    rep.levels.push_back(row);
  }

  const RegularityLevel& top = rep.levels.back();
  rep.local_norm = top.local_norm;
  rep.f_norm = top.f_norm;
  rep.ratio = top.ratio;
  if (rep.levels.size() >= 2) {
    double a = rep.levels[rep.levels.size() - 2].ratio;
    double b = top.ratio;
    double lo = std::min(a, b), hi = std::max(a, b);
    rep.bounded = lo > 0.0 && hi / lo <= 2.0;
  } else {
    rep.bounded = true;
  }
  return rep;
}

}  // namespace nlelast
