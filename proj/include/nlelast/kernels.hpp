#pragma once

// Kernel catalog. A KernelSpec evaluates k(x, y) >= 0 and declares the
// structure the rest of the library keys on: translation invariance,
// evenness in z = x - y, symmetry k(x,y) = k(y,x), a support cone, and a
// truncation radius (closed ball |z| <= r; r may be infinite).
//
// Families:
//   fractional_cone  m(z) |z|^(-d-2s) chi_{cone}(z) chi_{|z|<=r},  m even
//   integrable_cone  rho(|z|) chi_{cone}(z) chi_{|z|<=r}, cone one- or
//                    two-sided (the one-sided variant is nonsymmetric)
//   mixed_order      |z|^(-d-2s) chi_{cone}(z)
//                    + |z|^(-d-2a) chi_{halfcone}(z) chi_{|z|<=1}
//   variable_order   b(x) |z|^(-d-alpha(x)), alpha into [a_lo,a_hi] in (0,2)
//   custom           caller-supplied k(x, y) with declared structure
//
// Asymmetric indicator pieces are evaluated at z = x - y throughout.

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>

#include "nlelast/core.hpp"
#include "nlelast/geometry.hpp"

namespace nlelast {

enum class KernelFamily {
  fractional_cone,
  integrable_cone,
  mixed_order,
  variable_order,
  custom,
};

inline constexpr double kInfiniteRadius = std::numeric_limits<double>::infinity();

struct KernelSpec {
  KernelFamily family = KernelFamily::custom;
  int d = 0;

  double s = 0.0;      // fractional order in (0,1)
  double alpha = 0.0;  // mixed_order secondary order in (0, s/2)
  DoubleCone cone;     // symmetric support (fractional_cone, mixed_order, example 1)
  HalfConeSet halfcone;  // one-sided support piece
  double r = kInfiniteRadius;

  std::function<double(const Vec&)> m;  // even density; empty means m == 1
  double alpha1 = 1.0, alpha2 = 1.0;    // declared bounds on m

  std::function<double(double)> rho;  // radial profile for integrable_cone

  std::function<double(const Vec&)> b;        // variable_order amplitude
  std::function<double(const Vec&)> alpha_x;  // variable_order exponent
  double b_min = 1.0, b_max = 1.0;
  double a_lo = 0.0, a_hi = 0.0;

  std::function<double(const Vec&, const Vec&)> k_xy;  // custom

  bool translation_invariant = false;
  bool even = false;       // k(-z) == k(z) for translation invariant kernels
  bool symmetric = false;  // k(x,y) == k(y,x)
};

inline KernelSpec fractional_cone_kernel(int d, double s, DoubleCone cone,
                                         double r = kInfiniteRadius,
                                         std::function<double(const Vec&)> m = {},
                                         double alpha1 = 1.0, double alpha2 = 1.0) {
  require(s > 0.0 && s < 1.0, ErrorKind::usage, "fractional_cone: s outside (0,1)");
  require(r > 0.0, ErrorKind::usage, "fractional_cone: r must be positive");
  require(alpha1 > 0.0 && alpha1 <= alpha2, ErrorKind::usage,
          "fractional_cone: need 0 < alpha1 <= alpha2");
  KernelSpec k;
  k.family = KernelFamily::fractional_cone;
  k.d = d;
  k.s = s;
  k.cone = std::move(cone);
  k.r = r;
  k.m = std::move(m);
  k.alpha1 = alpha1;
  k.alpha2 = alpha2;
  k.translation_invariant = true;
  k.even = true;
  k.symmetric = true;
  return k;
}

inline KernelSpec example1_kernel(int d, std::function<double(double)> rho,
                                  DoubleCone cone, double radius = 1.0) {
  require(radius > 0.0, ErrorKind::usage, "example1: radius must be positive");
  KernelSpec k;
  k.family = KernelFamily::integrable_cone;
  k.d = d;
  k.rho = std::move(rho);
  k.cone = std::move(cone);
  k.r = radius;
  k.translation_invariant = true;
  k.even = true;
  k.symmetric = true;
  return k;
}

inline KernelSpec example2_kernel(int d, std::function<double(double)> rho,
                                  HalfConeSet halfcone, double radius = 1.0) {
  require(radius > 0.0, ErrorKind::usage, "example2: radius must be positive");
  KernelSpec k;
  k.family = KernelFamily::integrable_cone;
  k.d = d;
  k.rho = std::move(rho);
  k.halfcone = std::move(halfcone);
  k.r = radius;
  k.translation_invariant = true;
  k.even = false;
  k.symmetric = false;
  return k;
}

inline KernelSpec mixed_order_kernel(int d, double s, double alpha, DoubleCone cone,
                                     HalfConeSet halfcone) {
  require(s > 0.0 && s < 1.0, ErrorKind::usage, "mixed_order: s outside (0,1)");
  require(alpha > 0.0 && alpha < 0.5 * s, ErrorKind::usage,
          "mixed_order: alpha outside (0, s/2)");
  KernelSpec k;
  k.family = KernelFamily::mixed_order;
  k.d = d;
  k.s = s;
  k.alpha = alpha;
  k.cone = std::move(cone);
  k.halfcone = std::move(halfcone);
  k.r = kInfiniteRadius;  // principal part untruncated; the cone piece stops at 1
  k.translation_invariant = true;
  k.even = false;
  k.symmetric = false;
  return k;
}

inline KernelSpec variable_order_kernel(int d, std::function<double(const Vec&)> b,
                                        double b_min, double b_max,
                                        std::function<double(const Vec&)> alpha_x,
                                        double a_lo, double a_hi) {
  require(a_lo > 0.0 && a_lo <= a_hi && a_hi < 2.0, ErrorKind::usage,
          "variable_order: exponent bounds outside (0,2)");
  require(b_min > 0.0 && b_min <= b_max, ErrorKind::usage,
          "variable_order: amplitude bounds must be positive");
  KernelSpec k;
  k.family = KernelFamily::variable_order;
  k.d = d;
  k.b = std::move(b);
  k.alpha_x = std::move(alpha_x);
  k.b_min = b_min;
  k.b_max = b_max;
  k.a_lo = a_lo;
  k.a_hi = a_hi;
  k.r = kInfiniteRadius;
  k.cone = DoubleCone::full(d);
  k.translation_invariant = false;
  k.even = false;
  k.symmetric = false;
  return k;
}

inline KernelSpec custom_kernel(int d, std::function<double(const Vec&, const Vec&)> k_xy,
                                double r, bool translation_invariant = false,
                                bool even = false, bool symmetric = false) {
  require(r > 0.0, ErrorKind::usage, "custom: r must be positive");
  KernelSpec k;
  k.family = KernelFamily::custom;
  k.d = d;
  k.k_xy = std::move(k_xy);
  k.r = r;
  k.cone = DoubleCone::full(d);
  k.translation_invariant = translation_invariant;
  k.even = even;
  k.symmetric = symmetric;
  return k;
}

inline double truncation_radius(const KernelSpec& k) { return k.r; }

// Symmetric closure of the support directions, for direction quadrature.
inline DoubleCone support_cone(const KernelSpec& k) {
  switch (k.family) {
    case KernelFamily::fractional_cone:
      return k.cone;
    case KernelFamily::integrable_cone:
      if (k.symmetric) return k.cone;
      else {
        DoubleCone c;
        c.d = k.d;
        c.caps = k.halfcone.caps;
        return c;
      }
    case KernelFamily::mixed_order: {
      DoubleCone c = k.cone;
      for (const Cap& cap : k.halfcone.caps) c.caps.push_back(cap);
      return c;
    }
    case KernelFamily::variable_order:
    case KernelFamily::custom:
      return DoubleCone::full(k.d);
  }
  return DoubleCone::full(k.d);
}

// Kernel value for the ordered pair (x, y) with the displacement x - y
// prescribed as z. On periodic grids z is the canonical torus displacement,
// which may differ from the coordinate difference; coefficient fields (the
// variable-order b, alpha and custom kernels) still see the coordinates.
inline double eval_k_at(const KernelSpec& k, const Vec& x, const Vec& y, const Vec& z) {
  double rz = norm(z);
  if (rz <= 0.0) return 0.0;
  switch (k.family) {
    case KernelFamily::fractional_cone: {
      if (rz > k.r || !cone_contains(k.cone, z)) return 0.0;
      double density = k.m ? k.m(z) : 1.0;
      return density * std::pow(rz, -static_cast<double>(k.d) - 2.0 * k.s);
    }
    case KernelFamily::integrable_cone: {
      if (rz > k.r) return 0.0;
      bool in = k.symmetric ? cone_contains(k.cone, z) : cone_contains(k.halfcone, z);
      return in ? k.rho(rz) : 0.0;
    }
    case KernelFamily::mixed_order: {
      double v = 0.0;
      if (cone_contains(k.cone, z))
        v += std::pow(rz, -static_cast<double>(k.d) - 2.0 * k.s);
      if (rz <= 1.0 && cone_contains(k.halfcone, z))
        v += std::pow(rz, -static_cast<double>(k.d) - 2.0 * k.alpha);
      return v;
    }
    case KernelFamily::variable_order:
      return k.b(x) * std::pow(rz, -static_cast<double>(k.d) - k.alpha_x(x));
    case KernelFamily::custom:
      if (rz > k.r) return 0.0;
      return k.k_xy(x, y);
  }
  return 0.0;
}

inline double eval_k(const KernelSpec& k, const Vec& x, const Vec& y) {
  return eval_k_at(k, x, y, x - y);
}

// Symmetric and antisymmetric parts in the pair (x, y). Structurally
// symmetric kernels short-circuit so eval_ka is exactly zero for them.
// The mixed-order family is split analytically: the generic half-difference
// absorbs the half-cone piece into the principal one once rz^(2s-2a) exceeds
// 1/eps_mach, silently zeroing ka near the origin.
inline double eval_ks_at(const KernelSpec& k, const Vec& x, const Vec& y, const Vec& z) {
  if (k.symmetric) return eval_k_at(k, x, y, z);
  if (k.family == KernelFamily::mixed_order) {
    double rz = norm(z);
    if (rz <= 0.0) return 0.0;
    double v = 0.0;
    if (cone_contains(k.cone, z))
      v += std::pow(rz, -static_cast<double>(k.d) - 2.0 * k.s);
    if (rz <= 1.0) {
      double half = 0.0;
      if (cone_contains(k.halfcone, z)) half += 0.5;
      if (cone_contains(k.halfcone, -1.0 * z)) half += 0.5;
      if (half > 0.0)
        v += half * std::pow(rz, -static_cast<double>(k.d) - 2.0 * k.alpha);
    }
    return v;
  }
  return 0.5 * (eval_k_at(k, x, y, z) + eval_k_at(k, y, x, -1.0 * z));
}

inline double eval_ka_at(const KernelSpec& k, const Vec& x, const Vec& y, const Vec& z) {
  if (k.symmetric) return 0.0;
  if (k.family == KernelFamily::mixed_order) {
    double rz = norm(z);
    if (rz <= 0.0 || rz > 1.0) return 0.0;
    double sgn = 0.0;
    if (cone_contains(k.halfcone, z)) sgn += 0.5;
    if (cone_contains(k.halfcone, -1.0 * z)) sgn -= 0.5;
    if (sgn == 0.0) return 0.0;
    return sgn * std::pow(rz, -static_cast<double>(k.d) - 2.0 * k.alpha);
  }
  return 0.5 * (eval_k_at(k, x, y, z) - eval_k_at(k, y, x, -1.0 * z));
}

inline double eval_ks(const KernelSpec& k, const Vec& x, const Vec& y) {
  return eval_ks_at(k, x, y, x - y);
}

inline double eval_ka(const KernelSpec& k, const Vec& x, const Vec& y) {
  return eval_ka_at(k, x, y, x - y);
}

// A spec evaluating the symmetric part of `k`, with the same declared
// support; used to assemble the symmetric-part stiffness.
inline KernelSpec symmetrized(const KernelSpec& k) {
  if (k.symmetric) return k;
  KernelSpec base = k;
  KernelSpec out = custom_kernel(
      k.d, [base](const Vec& x, const Vec& y) { return eval_ks(base, x, y); }, 1.0,
      k.translation_invariant, true, true);
  out.r = k.r;
  out.cone = support_cone(k);
  return out;
}

inline std::string family_name(const KernelSpec& k) {
  switch (k.family) {
    case KernelFamily::fractional_cone: return "fractional_cone";
    case KernelFamily::integrable_cone: return k.symmetric ? "integrable_cone" : "integrable_halfcone";
    case KernelFamily::mixed_order: return "mixed_order";
    case KernelFamily::variable_order: return "variable_order";
    case KernelFamily::custom: return "custom";
  }
  return "unknown";
}

}  // namespace nlelast
