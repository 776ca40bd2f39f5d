#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "nlelast/diagnostics.hpp"
#include "nlelast/solver.hpp"

namespace nlelast {
namespace {

TEST(KornFieldSuite, LabelsCountsAndGuards) {
  Grid g(2, {32, 32, 1}, {1.0 / 32, 1.0 / 32, 1.0}, true);
  auto suite = korn_field_suite(g, 5, 4.0, 8.0, 77);
  ASSERT_EQ(suite.size(), 8u);
  EXPECT_EQ(suite[0].label, "band-0");
  EXPECT_EQ(suite[4].label, "band-4");
  EXPECT_EQ(suite[5].label, "constant");
  EXPECT_EQ(suite[6].label.rfind("near-rigid-eps-", 0), 0u);
  for (const auto& lf : suite) {
    EXPECT_TRUE(lf.field.grid.periodic);
    EXPECT_EQ(lf.field.components, 2);
  }

  Grid bounded(2, {16, 16, 1}, {1.0 / 16, 1.0 / 16, 1.0}, false);
  EXPECT_THROW(korn_field_suite(bounded, 2, 1.0, 2.0, 1), Error);
  EXPECT_THROW(korn_field_suite(g, 0, 1.0, 2.0, 1), Error);
  EXPECT_THROW(korn_field_suite(g, 2, 0.0, 2.0, 1), Error);

  // Band squeezed between integer lattice frequencies: no mode exists.
  Grid g1(1, {32, 1, 1}, {1.0 / 32, 1.0, 1.0}, true);
  EXPECT_THROW(korn_field_suite(g1, 1, 4.4, 4.6, 1), Error);
}

TEST(KornEquivalence, SingleModeBracketsTheClosedFormConstants) {
  // d = 2, s = 1/2, full cone, r = infinity: Psi_max = 8 pi^2 / 3 along
  // longitudinal directions and Psi_min = 4 pi^2 / 3 transverse, so the
  // continuum constants are C1 = 3/(16 pi^2) and C2 = 3/(8 pi^2). The lattice
  // ratios sit slightly above (radius truncation at box/2 plus dispersion).
  const int n = 48;
  Grid g(2, {n, n, 1}, {1.0 / n, 1.0 / n, 1.0}, true);
  KernelSpec k = fractional_cone_kernel(2, 0.5, DoubleCone::full(2));

  const int m = 6;
  GridField longi(g, 2), trans(g, 2);
  for (std::size_t i = 0; i < g.num_points(); ++i) {
    double c = std::cos(2.0 * M_PI * m * g.point(i)[0]);
    longi.at(0, i) = c;  // displacement along the wave vector e1
    trans.at(1, i) = c;  // displacement across it
  }
  std::vector<LabeledField> suite{{"longitudinal", longi}, {"transverse", trans}};

  KornReport rep = korn_equivalence(k, suite);
  const double c1_oracle = 3.0 / (16.0 * M_PI * M_PI);
  const double c2_oracle = 3.0 / (8.0 * M_PI * M_PI);
  EXPECT_EQ(rep.fields_tested, 2);
  EXPECT_DOUBLE_EQ(rep.beta_r, 0.0);
  EXPECT_GE(rep.C1_est, 0.999 * c1_oracle);
  EXPECT_LE(rep.C1_est, 1.45 * c1_oracle);
  EXPECT_GE(rep.C2_est, 0.999 * c2_oracle);
  EXPECT_LE(rep.C2_est, 1.45 * c2_oracle);
  EXPECT_EQ(rep.worst_case_field, "transverse");
}

TEST(KornEquivalence, TruncationTailConstantsAndGuards) {
  Grid g(1, {64, 1, 1}, {4.0 / 64, 1.0, 1.0}, true);
  auto suite = korn_field_suite(g, 3, 1.0, 2.0, 5);

  KernelSpec k1 = fractional_cone_kernel(1, 0.25, DoubleCone::full(1), 1.0);
  KernelSpec k2 = fractional_cone_kernel(1, 0.25, DoubleCone::full(1), 2.0);
  KornReport r1 = korn_equivalence(k1, suite);
  KornReport r2 = korn_equivalence(k2, suite);
  // beta(r) = sigma(cone) r^{-2s} / (2s): 4 at r = 1, 2 sqrt(2) at r = 2.
  EXPECT_NEAR(r1.beta_r, 4.0, 1e-12);
  EXPECT_NEAR(r2.beta_r, 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_GT(r1.beta_r, r2.beta_r);
  EXPECT_GT(r1.C1_est, 0.0);
  EXPECT_GE(r1.C2_est, r1.C1_est);
  EXPECT_GE(r2.C2_est, r2.C1_est);

  KernelSpec notfrac = example1_kernel(1, [](double) { return 1.0; },
                                       DoubleCone::full(1));
  EXPECT_THROW(korn_equivalence(notfrac, suite), Error);
  EXPECT_THROW(korn_equivalence(k1, {}), Error);
}

TEST(PkConstant, IntegrableKernelClosedForm) {
  // rho = 1, r = 1, Omega = (0,1) inside [-1,2]: every interior pair
  // interacts, A = h^2((2n+1) I - J), and the smallest eigenvalue against the
  // mass h is h(2n + 1 - #dofs).
  KernelSpec k = example1_kernel(1, [](double) { return 1.0; }, DoubleCone::full(1));
  auto pk_at = [&](int n, double hi) {
    Grid g(1, {3 * n + 1, 1, 1}, {1.0 / n, 1.0, 1.0}, false, Vec(1, -1.0));
    DomainMask mask = DomainMask::box(g, Vec(1, 0.0), Vec(1, hi));
    return pk_constant(k, mask);
  };
  EXPECT_NEAR(pk_at(32, 1.0), 32.0 / 34.0, 1e-6);
  EXPECT_NEAR(pk_at(64, 1.0), 64.0 / 66.0, 1e-6);
  // Smaller domain, smaller constant: 19 dofs inside (0, 0.6) at n = 32,
  // lambda_min = h^2 (65 - 19).
  EXPECT_NEAR(pk_at(32, 0.6), 32.0 / 46.0, 1e-6);
}

TEST(PkConstant, VanishingKernelIsACoercivityError) {
  KernelSpec dead = custom_kernel(1, [](const Vec&, const Vec&) { return 0.0; }, 0.5);
  Grid g(1, {33, 1, 1}, {1.0 / 16, 1.0, 1.0}, false, Vec(1, -0.5));
  DomainMask mask = DomainMask::box(g, Vec(1, 0.0), Vec(1, 1.0));
  try {
    pk_constant(dead, mask);
    FAIL() << "expected coercivity violation";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::hypothesis);
  }
}

TEST(RigidMotion, FitRecoveryAndClassification) {
  Grid g(2, {17, 17, 1}, {1.0 / 16, 1.0 / 16, 1.0}, false);
  GridField u = sample_field(g, 2, [](const Vec& x) {
    return Vec(2, 0.3 + 0.7 * x[1], -0.2 - 0.7 * x[0]);
  });
  RigidMotionFit fit = rigid_motion_test(u, 1e-10);
  EXPECT_TRUE(fit.is_rigid);
  EXPECT_LE(fit.rel_residual, 1e-12);
  EXPECT_LE(fit.max_pair_difference, 1e-12);
  EXPECT_NEAR(fit.A(0, 1), 0.7, 1e-10);
  EXPECT_NEAR(fit.A(1, 0), -0.7, 1e-10);
  EXPECT_NEAR(fit.b[0], 0.3, 1e-10);
  EXPECT_NEAR(fit.b[1], -0.2, 1e-10);

  GridField bent = u;
  for (std::size_t i = 0; i < g.num_points(); ++i)
    bent.at(0, i) += 0.1 * g.point(i)[0] * g.point(i)[0];
  EXPECT_FALSE(rigid_motion_test(bent, 1e-6).is_rigid);

  // d = 1 has no skew part: constants are the only rigid motions.
  Grid g1(1, {9, 1, 1}, {0.125, 1.0, 1.0}, false);
  GridField c1(g1, 1);
  for (std::size_t i = 0; i < c1.points(); ++i) c1.at(0, i) = 2.5;
  EXPECT_TRUE(rigid_motion_test(c1, 1e-12).is_rigid);

  EXPECT_THROW(rigid_motion_test(GridField(g, 1), 1e-8), Error);
}

TEST(Localization, ConstantCutoffGivesExactZero) {
  Grid g(1, {33, 1, 1}, {1.0 / 16, 1.0, 1.0}, false, Vec(1, -0.5));
  DomainMask all = DomainMask::all(g);
  KernelSpec k = fractional_cone_kernel(1, 0.25, DoubleCone::full(1));
  OperatorOptions op;
  op.radius_cap = 0.25;
  GridField u = sample_field(g, 1, [](const Vec& x) {
    return Vec(1, std::sin(2.0 * M_PI * x[0]));
  });
  GridField eta(g, 1);
  for (std::size_t i = 0; i < eta.points(); ++i) eta.at(0, i) = 1.0;
  LocalizationReport rep = localization_residual(k, u, eta, all, op);
  EXPECT_DOUBLE_EQ(rep.g_l2, 0.0);
  EXPECT_DOUBLE_EQ(rep.i1_l2, 0.0);
  EXPECT_DOUBLE_EQ(rep.i2_l2, 0.0);
  EXPECT_GT(rep.u_hs_norm, 0.0);
  EXPECT_DOUBLE_EQ(rep.c_total, 0.0);
}

TEST(Localization, RigidFieldKillsTheProjectedPiece) {
  Grid g(2, {25, 25, 1}, {1.0 / 24, 1.0 / 24, 1.0}, false, Vec(2, -0.5, -0.5));
  DomainMask mask = DomainMask::box(g, Vec(2, -0.4, -0.4), Vec(2, 0.4, 0.4));
  KernelSpec k = fractional_cone_kernel(2, 0.5, DoubleCone::full(2));
  OperatorOptions op;
  op.radius_cap = 0.1;
  GridField u = sample_field(g, 2, [](const Vec& x) {
    return Vec(2, 1.0 + 0.5 * x[1], -0.5 * x[0]);
  });
  Cutoff eta = quintic_cutoff(Vec(2, 0.0, 0.0), 0.1, 0.25);
  GridField etaf = sample_cutoff(g, eta);
  LocalizationReport rep = localization_residual(k, u, etaf, mask, op);
  // D(u) = 0 for a rigid field, so the I_s piece vanishes to rounding while
  // the (L eta) u piece does not.
  EXPECT_GT(rep.i1_l2, 1e-3);
  EXPECT_LE(rep.i2_l2, 1e-12 * rep.i1_l2);
  EXPECT_NEAR(rep.g_l2, rep.i1_l2, 1e-10 * rep.i1_l2);
}

TEST(Localization, CutoffTouchingTheCollarIsRejected) {
  Grid g(1, {33, 1, 1}, {1.0 / 16, 1.0, 1.0}, false, Vec(1, -0.5));
  DomainMask mask = DomainMask::box(g, Vec(1, 0.0), Vec(1, 1.0));
  KernelSpec k = fractional_cone_kernel(1, 0.25, DoubleCone::full(1));
  OperatorOptions op;
  op.radius_cap = 0.25;
  GridField u(g, 1);
  GridField eta(g, 1);
  for (std::size_t i = 0; i < eta.points(); ++i) eta.at(0, i) = 1.0;  // covers collar
  EXPECT_THROW(localization_residual(k, u, eta, mask, op), Error);

  GridField eta2(g, 2);
  EXPECT_THROW(localization_residual(k, u, eta2, mask, op), Error);
}

TEST(Localization, CommutatorConstantIsRefinementStable) {
  KernelSpec k = fractional_cone_kernel(1, 0.25, DoubleCone::full(1));
  Cutoff eta = quintic_cutoff(Vec(1, 0.5), 0.15, 0.3);
  auto c_at = [&](int per_unit) {
    Grid g(1, {2 * per_unit + 1, 1, 1}, {1.0 / per_unit, 1.0, 1.0}, false,
           Vec(1, -0.5));
    DomainMask mask = DomainMask::box(g, Vec(1, 0.0), Vec(1, 1.0));
    OperatorOptions op;
    op.radius_cap = 0.25;
    GridField u = sample_field(g, 1, [](const Vec& x) {
      return Vec(1, std::sin(2.0 * M_PI * x[0]));
    });
    return localization_residual(k, u, sample_cutoff(g, eta), mask, op).c_total;
  };
  double c32 = c_at(32);
  double c64 = c_at(64);
  EXPECT_GT(c32, 0.0);
  EXPECT_GT(c64, 0.0);
  EXPECT_LE(std::max(c32, c64) / std::min(c32, c64), 2.0);
}

TEST(SobolevConjugate, ValuesAndGuards) {
  EXPECT_NEAR(sobolev_conjugate(1, 0.25), 4.0, 1e-14);
  EXPECT_NEAR(sobolev_conjugate(2, 0.5), 4.0, 1e-14);
  EXPECT_TRUE(std::isinf(sobolev_conjugate(1, 0.5)));
  EXPECT_TRUE(std::isinf(sobolev_conjugate(1, 0.75)));
  EXPECT_THROW(sobolev_conjugate(0, 0.5), Error);
  EXPECT_THROW(sobolev_conjugate(1, 1.0), Error);
}

TEST(Cutoff, QuinticShapeAndGuards) {
  Cutoff eta = quintic_cutoff(Vec(1, 0.5), 0.1, 0.3);
  EXPECT_DOUBLE_EQ(eta.value(Vec(1, 0.5)), 1.0);
  EXPECT_DOUBLE_EQ(eta.value(Vec(1, 0.55)), 1.0);
  EXPECT_DOUBLE_EQ(eta.value(Vec(1, 0.85)), 0.0);
  double mid = eta.value(Vec(1, 0.7));
  EXPECT_GT(mid, 0.0);
  EXPECT_LT(mid, 1.0);
  // Monotone through the transition band.
  EXPECT_GT(eta.value(Vec(1, 0.65)), eta.value(Vec(1, 0.75)));

  EXPECT_THROW(quintic_cutoff(Vec(1, 0.5), 0.0, 0.3), Error);
  EXPECT_THROW(quintic_cutoff(Vec(1, 0.5), 0.3, 0.3), Error);

  Grid g(1, {9, 1, 1}, {0.125, 1.0, 1.0}, false);
  GridField u(g, 1);
  GridField eta2(g, 2);
  EXPECT_THROW(cutoff_multiply(eta2, u), Error);
}

TEST(Regularity, SmoothDataGivesBoundedRatios) {
  KernelSpec k = fractional_cone_kernel(1, 0.25, DoubleCone::full(1));
  Cutoff eta = quintic_cutoff(Vec(1, 0.5), 0.15, 0.3);
  Grid base(1, {33, 1, 1}, {1.0 / 16, 1.0, 1.0}, false, Vec(1, -0.5));
  auto fsmooth = [](const Vec& x) { return Vec(1, std::sin(M_PI * x[0])); };
  auto inside = [](const Vec& x) { return x[0] > 0.0 && x[0] < 1.0; };
  RegularityStudyOptions opt;
  opt.levels = 3;
  opt.solve.op.radius_cap = 0.5;

  RegularityReport rep = interior_regularity_study(k, fsmooth, inside, eta, 2.0,
                                                   base, opt);
  ASSERT_EQ(rep.levels.size(), 3u);
  EXPECT_DOUBLE_EQ(rep.s, 0.25);
  EXPECT_EQ(rep.cutoff_id, "quintic");
  for (int lev = 0; lev < 3; ++lev) {
    EXPECT_EQ(rep.levels[static_cast<std::size_t>(lev)].level, lev);
    EXPECT_GT(rep.levels[static_cast<std::size_t>(lev)].ratio, 0.0);
  }
  EXPECT_NEAR(rep.levels[1].h, rep.levels[0].h / 2.0, 1e-15);
  EXPECT_TRUE(rep.bounded);
  EXPECT_DOUBLE_EQ(rep.ratio, rep.levels.back().ratio);
}

TEST(Regularity, LpPathAndGuards) {
  KernelSpec k = fractional_cone_kernel(1, 0.25, DoubleCone::full(1));
  Cutoff eta = quintic_cutoff(Vec(1, 0.5), 0.15, 0.3);
  Grid base(1, {33, 1, 1}, {1.0 / 16, 1.0, 1.0}, false, Vec(1, -0.5));
  auto fsmooth = [](const Vec& x) { return Vec(1, std::sin(M_PI * x[0])); };
  auto inside = [](const Vec& x) { return x[0] > 0.0 && x[0] < 1.0; };
  RegularityStudyOptions opt;
  opt.levels = 2;
  opt.solve.op.radius_cap = 0.5;

  // p = 5 > 2*_s = 4 requires explicit integrability evidence.
  EXPECT_THROW(interior_regularity_study(k, fsmooth, inside, eta, 5.0, base, opt),
               Error);
  opt.lp_evidence = true;
  RegularityReport rep =
      interior_regularity_study(k, fsmooth, inside, eta, 5.0, base, opt);
  EXPECT_EQ(rep.levels.size(), 2u);
  EXPECT_GT(rep.ratio, 0.0);

  EXPECT_THROW(interior_regularity_study(k, fsmooth, inside, eta, 1.5, base, opt),
               Error);
  opt.levels = 0;
  EXPECT_THROW(interior_regularity_study(k, fsmooth, inside, eta, 2.0, base, opt),
               Error);
  opt.levels = 1;
  Grid per(1, {32, 1, 1}, {1.0 / 16, 1.0, 1.0}, true);
  EXPECT_THROW(interior_regularity_study(k, fsmooth, inside, eta, 2.0, per, opt),
               Error);

  auto fzero = [](const Vec&) { return Vec(1, 0.0); };
  EXPECT_THROW(interior_regularity_study(k, fzero, inside, eta, 2.0, base, opt),
               Error);
}

}  // namespace
}  // namespace nlelast
