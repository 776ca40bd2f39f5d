#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "nlelast/kernels.hpp"
#include "nlelast/operator.hpp"

namespace nlelast {
namespace {

double constant_rho(double) { return 1.0; }

// Dense |A - A^T| max over a CSR matrix.
double transpose_gap(const CsrMatrix& A) {
  std::vector<std::vector<double>> dense(A.rows, std::vector<double>(A.cols, 0.0));
  for (std::size_t r = 0; r < A.rows; ++r)
    for (std::size_t p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p)
      dense[r][A.col[p]] = A.val[p];
  double gap = 0.0;
  for (std::size_t r = 0; r < A.rows; ++r)
    for (std::size_t c = 0; c < A.cols; ++c)
      gap = std::max(gap, std::abs(dense[r][c] - dense[c][r]));
  return gap;
}

double quadratic_form(const CsrMatrix& A, const std::vector<double>& x) {
  std::vector<double> y(A.rows, 0.0);
  A.matvec(x, y);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

GridField skew_affine(const Grid& g, const Vec& c, double w) {
  return sample_field(g, g.d, [&](const Vec& x) {
    Vec u = c;
    if (g.d >= 2) {
      u[0] += w * x[1];
      u[1] -= w * x[0];
    }
    return u;
  });
}

TEST(ProjectedDifference, HandValueAndCoincidence) {
  Grid g(2, {4, 4, 1}, {0.5, 0.5, 1.0}, false);
  GridField u = sample_field(g, 2, [](const Vec& x) { return Vec(2, x[0] * x[0], x[1]); });
  std::size_t ix = g.flatten({2, 1, 0});
  std::size_t iy = g.flatten({1, 1, 0});
  // z = (0.5, 0), u(x) - u(y) = (1 - 0.25, 0): D = 0.75.
  EXPECT_DOUBLE_EQ(projected_difference(u, ix, iy), 0.75);
  EXPECT_DOUBLE_EQ(projected_difference(u, iy, ix), 0.75);  // symmetric in (x, y)
  try {
    projected_difference(u, ix, ix);
    FAIL() << "expected usage error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::usage);
  }
}

TEST(EffectiveRadius, ClipRules) {
  KernelSpec kinf = fractional_cone_kernel(2, 0.5, DoubleCone::full(2));
  KernelSpec kfin = fractional_cone_kernel(2, 0.5, DoubleCone::full(2), 0.7);

  Grid per(2, {16, 16, 1}, {1.0 / 16, 1.0 / 16, 1.0}, true);
  EXPECT_DOUBLE_EQ(effective_radius(kinf, per), 0.5);          // half the box
  EXPECT_DOUBLE_EQ(effective_radius(kinf, per, 0.3), 0.3);     // cap wins
  EXPECT_DOUBLE_EQ(effective_radius(kfin, per), 0.5);          // box/2 < r

  Grid bnd(2, {5, 5, 1}, {0.25, 0.25, 1.0}, false);
  EXPECT_DOUBLE_EQ(effective_radius(kinf, bnd), std::sqrt(2.0));  // grid diagonal
  EXPECT_DOUBLE_EQ(effective_radius(kfin, bnd), 0.7);
  try {
    effective_radius(kinf, bnd, 0.0);
    FAIL() << "expected usage error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::usage);
  }
}

// h^d sum_x v(x) . (L_n u)(x) = F^k_n(u, v) exactly (same pair set).
TEST(Duality, PeriodicSymmetricKernel) {
  Grid g(1, {32, 1, 1}, {1.0 / 32, 1.0, 1.0}, true);
  KernelSpec k = fractional_cone_kernel(1, 0.25, DoubleCone::full(1));
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    GridField u = random_field(g, 1, seed);
    GridField v = random_field(g, 1, seed + 100);
    GridField Lu = apply_Ln(k, u);
    double lhs = g.cell_volume() * dot(v, Lu);
    double rhs = bilinear_form(k, u, v);
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(Duality, PeriodicNyquistMode) {
  Grid g(2, {10, 10, 1}, {0.1, 0.1, 1.0}, true);
  KernelSpec k = fractional_cone_kernel(2, 0.5, DoubleCone::full(2), 0.4);
  // Alternating-sign mode along x plus a random test field.
  GridField u(g, 2);
  for (std::size_t i = 0; i < g.num_points(); ++i) {
    auto mi = g.unflatten(i);
    u.at(0, i) = (mi[0] % 2 == 0) ? 1.0 : -1.0;
    u.at(1, i) = (mi[1] % 2 == 0) ? -0.5 : 0.5;
  }
  GridField v = random_field(g, 2, 77);
  double lhs = g.cell_volume() * dot(v, apply_Ln(k, u));
  double rhs = bilinear_form(k, u, v);
  EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
}

TEST(Duality, BoundedNonsymmetricKernel) {
  Grid g(2, {12, 12, 1}, {0.1, 0.1, 1.0}, false);
  HalfConeSet half{2, {make_cap(Vec(2, 1.0, 0.0), 0.5 * M_PI)}};
  KernelSpec k = example2_kernel(2, constant_rho, half, 0.3);
  for (std::uint64_t seed : {21u, 22u}) {
    GridField u = random_field(g, 2, seed);
    GridField v = random_field(g, 2, seed + 100);
    double lhs = g.cell_volume() * dot(v, apply_Ln(k, u));
    double rhs = bilinear_form(k, u, v);
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(ApplyLn, MaskZeroesExteriorRowsOnly) {
  Grid g(1, {21, 1, 1}, {0.1, 0.1, 1.0}, false);
  KernelSpec k = example1_kernel(1, constant_rho, DoubleCone::full(1), 0.5);
  DomainMask mask = DomainMask::box(g, Vec(1, 0.55), Vec(1, 1.45));
  GridField u = random_field(g, 1, 5);
  GridField full = apply_Ln(k, u);
  GridField masked = apply_Ln(k, u, {}, &mask);
  for (std::size_t i = 0; i < g.num_points(); ++i) {
    if (mask.is_interior(i))
      EXPECT_DOUBLE_EQ(masked.at(0, i), full.at(0, i));
    else
      EXPECT_DOUBLE_EQ(masked.at(0, i), 0.0);
  }
}

TEST(ApplyLn, RejectsComponentMismatch) {
  Grid g(2, {4, 4, 1}, {0.25, 0.25, 1.0}, true);
  KernelSpec k = fractional_cone_kernel(2, 0.5, DoubleCone::full(2));
  GridField u(g, 1);
  EXPECT_THROW(apply_Ln(k, u), Error);
}

// Skew-affine fields are pointwise in the kernel of D, hence of the energy.
TEST(NullSpace, SkewAffineOnBoundedGrids) {
  Grid g(2, {14, 14, 1}, {0.1, 0.1, 1.0}, false);
  HalfConeSet half{2, {make_cap(Vec(2, 1.0, 0.0), 0.5 * M_PI)}};
  std::vector<KernelSpec> kernels = {
      fractional_cone_kernel(2, 0.5, DoubleCone::full(2), 0.4),
      example1_kernel(2, constant_rho, DoubleCone::full(2), 0.4),
      example2_kernel(2, constant_rho, half, 0.4),
  };
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (const KernelSpec& k : kernels) {
    for (int rep = 0; rep < 3; ++rep) {
      GridField u = skew_affine(g, Vec(2, dist(rng), dist(rng)), dist(rng));
      EXPECT_LE(energy_seminorm(k, u), 1e-24);
      std::size_t ia = g.flatten({3, 5, 0});
      std::size_t ib = g.flatten({9, 2, 0});
      EXPECT_LE(std::abs(projected_difference(u, ia, ib)), 1e-13);
    }
  }
}

TEST(Seminorms, OmegaMatchesEnergyOnFullMask) {
  Grid g(2, {12, 12, 1}, {0.1, 0.1, 1.0}, false);
  KernelSpec k = fractional_cone_kernel(2, 0.5, DoubleCone::full(2), 0.35);
  GridField u = random_field(g, 2, 31);
  DomainMask all = DomainMask::all(g);
  EXPECT_DOUBLE_EQ(omega_seminorm(k, u, all), energy_seminorm(k, u));

  // Fewer interior points can only drop pair terms (k_s >= 0 here).
  DomainMask inner = DomainMask::box(g, Vec(2, 0.35, 0.35), Vec(2, 0.75, 0.75));
  EXPECT_LE(omega_seminorm(k, u, inner), energy_seminorm(k, u) * (1.0 + 1e-15));
}

TEST(Stiffness, SingleInteriorPointHandSum) {
  // Grid {0, .25, .5, .75, 1}, k = 7 on |z| <= 0.5: the only interior point
  // x = 0.5 sees 4 neighbors, so A = h^2 * 4 * 7 and mass = h.
  Grid g(1, {5, 1, 1}, {0.25, 1.0, 1.0}, false);
  KernelSpec k = custom_kernel(1, [](const Vec&, const Vec&) { return 7.0; }, 0.5,
                               true, true, true);
  DomainMask mask = DomainMask::box(g, Vec(1, 0.3), Vec(1, 0.7));
  DirichletSystem sys = assemble_stiffness(k, mask);
  ASSERT_EQ(sys.dofs(), 1u);
  ASSERT_EQ(sys.A.val.size(), 1u);
  EXPECT_DOUBLE_EQ(sys.A.val[0], 0.25 * 0.25 * 28.0);
  EXPECT_DOUBLE_EQ(sys.mass, 0.25);

  // Quadratic form against the bilinear form for the matching field.
  std::vector<double> x{3.0};
  GridField uf = extend_by_zero(sys, x);
  EXPECT_DOUBLE_EQ(quadratic_form(sys.A, x), bilinear_form(k, uf, uf));
  EXPECT_DOUBLE_EQ(bilinear_form(k, uf, uf), 0.5 * energy_seminorm(k, uf));
}

TEST(Stiffness, SymmetricKernelGivesSymmetricMatrix) {
  Grid g(1, {65, 1, 1}, {1.0 / 32, 1.0, 1.0}, false, Vec(1, -0.5));
  KernelSpec k = fractional_cone_kernel(1, 0.25, DoubleCone::full(1));
  DomainMask mask = DomainMask::box(g, Vec(1, 0.0), Vec(1, 1.0));
  OperatorOptions opt;
  opt.radius_cap = 0.5;
  DirichletSystem sys = assemble_stiffness(k, mask, opt);
  EXPECT_TRUE(sys.A.symmetric_flag);
  EXPECT_LE(transpose_gap(sys.A), 1e-12 * sys.A.max_abs());

  // u^T A u reproduces both the bilinear form and half the energy seminorm.
  GridField u = random_field(g, 1, 99);
  enforce_mask(u, mask);
  std::vector<double> x = restrict_to_dofs(sys, u);
  double qa = quadratic_form(sys.A, x);
  double fb = bilinear_form(k, u, u, opt);
  double es = energy_seminorm(k, u, opt);
  EXPECT_NEAR(qa, fb, 1e-10 * std::abs(fb));
  EXPECT_NEAR(fb, 0.5 * es, 1e-10 * std::abs(fb));
}

TEST(Stiffness, NonsymmetricBilinearIdentity) {
  // w^T A z = F(z-field, w-field): rows of A are test DOFs.
  Grid g(2, {15, 15, 1}, {0.1, 0.1, 1.0}, false);
  HalfConeSet half{2, {make_cap(Vec(2, 0.6, 0.8), 1.0)}};
  KernelSpec k = example2_kernel(2, constant_rho, half, 0.3);
  DomainMask mask = DomainMask::box(g, Vec(2, 0.35, 0.35), Vec(2, 1.05, 1.05));
  DirichletSystem sys = assemble_stiffness(k, mask);
  EXPECT_FALSE(sys.A.symmetric_flag);

  GridField zf = random_field(g, 2, 7);
  GridField wf = random_field(g, 2, 8);
  enforce_mask(zf, mask);
  enforce_mask(wf, mask);
  std::vector<double> z = restrict_to_dofs(sys, zf);
  std::vector<double> w = restrict_to_dofs(sys, wf);
  std::vector<double> Az(sys.dofs(), 0.0);
  sys.A.matvec(z, Az);
  double lhs = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) lhs += w[i] * Az[i];
  double rhs = bilinear_form(k, zf, wf);
  EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(rhs)));
}

TEST(Stiffness, GuardsAndPreconditions) {
  Grid g(1, {21, 1, 1}, {0.1, 0.1, 1.0}, false);
  KernelSpec k = example1_kernel(1, constant_rho, DoubleCone::full(1), 0.8);

  // Collar narrower than the interaction radius.
  DomainMask thin = DomainMask::box(g, Vec(1, 0.35), Vec(1, 1.65));
  try {
    assemble_stiffness(k, thin);
    FAIL() << "expected usage error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::usage);
  }

  // Memory budget.
  DomainMask mask = DomainMask::box(g, Vec(1, 0.85), Vec(1, 1.15));
  OperatorOptions opt;
  opt.max_entries = 3;
  try {
    assemble_stiffness(k, mask, opt);
    FAIL() << "expected usage error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::usage);
  }
}

}  // namespace
}  // namespace nlelast
