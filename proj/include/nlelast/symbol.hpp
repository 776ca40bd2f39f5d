#pragma once

// Fourier symbol of translation-invariant even kernels:
//   M_r(xi) = int k_r(h) 2(1 - cos(2 pi xi.h)) hhat hhat^T dh,
// evaluated in polar form. For power-law radial parts the radial integral
// collapses to the fractional cosine moment C(s, X); other radial profiles
// use graded oscillation-aware quadrature. Also the angular function
// Psi(nu, eta), its minimum, the ell constants, and the closed-form inverse
// multiplier.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "nlelast/core.hpp"
#include "nlelast/geometry.hpp"
#include "nlelast/kernels.hpp"
#include "nlelast/quadrature.hpp"
#include "nlelast/sphere_rule.hpp"

namespace nlelast {

struct SymbolMatrix {
  Vec xi{1};
  Mat entries{1};
};

struct SymbolOptions {
  int sphere_order = 24;
  int radial_shells = 0;   // 0: picked from the kernel's singularity strength
  double radius = -1.0;    // override truncation radius; < 0 uses the kernel's
};

namespace detail {

inline double cached_cos_moment(double s) {
  static std::map<int64_t, double> cache;
  static std::mutex mu;
  int64_t key = 0;
  std::memcpy(&key, &s, sizeof(key));
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, cos_moment(s)).first;
  return it->second;
}

// int_0^r 2 (1 - cos(t rho)) profile(rho) rho^{d-1} drho with oscillation-
// bounded panels; profile carries the kernel's radial factor.
template <typename Profile>
inline double radial_cos_integral(Profile&& profile, int d, double t, double r,
                                  int shells) {
  double at = std::abs(t);
  double osc = at > 0.0 ? M_PI / (2.0 * at) : r;
  double total = 0.0;
  for (auto [a, b] : graded_intervals(0.0, r, shells, 0.5, {})) {
    int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / osc)));
    double w = (b - a) / pieces;
    for (int p = 0; p < pieces; ++p)
      total += gl_integrate(
          [&](double rho) {
            return 2.0 * (1.0 - std::cos(t * rho)) * profile(rho) *
                   std::pow(rho, d - 1);
          },
          a + p * w, a + (p + 1) * w, 12);
  }
  return total;
}

}  // namespace detail

// Raw d x d matrix; prefer compute_symbol for the wrapped result.
inline Mat compute_symbol_matrix(const KernelSpec& k, const Vec& xi,
                                 const SymbolOptions& opt = {}) {
  require(k.translation_invariant && k.even, ErrorKind::usage,
          "compute_symbol: kernel must be translation invariant and even");
  require(xi.d == k.d, ErrorKind::usage, "compute_symbol: dimension mismatch");
  const int d = k.d;
  Mat m(d);
  double nxi = norm(xi);
  if (nxi == 0.0) return m;  // 1 - cos(0) = 0 mode by mode

  double r = opt.radius > 0.0 ? std::min(opt.radius, truncation_radius(k))
                              : truncation_radius(k);
  Vec xihat = (1.0 / nxi) * xi;
  SphereRule rule = make_sphere_rule(support_cone(k), {xihat}, opt.sphere_order);

  int shells = opt.radial_shells;
  if (shells <= 0)
    shells = shells_for_exponent(k.family == KernelFamily::fractional_cone ? k.s : 0.5);

  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Vec& omega = rule.nodes[i];
    double t = 2.0 * M_PI * dot(xi, omega);
    double at = std::abs(t);
    double radial = 0.0;
    switch (k.family) {
      case KernelFamily::fractional_cone: {
        if (at > 0.0) {
          double density = k.m ? k.m(omega) : 1.0;
          double moment = std::isfinite(r) ? cos_moment_table(k.s)(at * r)
                                           : detail::cached_cos_moment(k.s);
          radial = 2.0 * density * std::pow(at, 2.0 * k.s) * moment;
        }
        break;
      }
      case KernelFamily::integrable_cone: {
        require(std::isfinite(r), ErrorKind::usage,
                "compute_symbol: integrable kernel needs a finite radius");
        radial = detail::radial_cos_integral([&](double rho) { return k.rho(rho); }, d,
                                             t, r, shells);
        break;
      }
      case KernelFamily::custom: {
        require(std::isfinite(r), ErrorKind::usage,
                "compute_symbol: custom kernel needs a finite radius");
        Vec x0(d);
        radial = detail::radial_cos_integral(
            [&](double rho) {
              Vec z = rho * omega;
              return eval_k_at(k, x0, x0 - z, z);
            },
            d, t, r, shells);
        break;
      }
      default:
        require(false, ErrorKind::usage,
                "compute_symbol: unsupported kernel family (no even translation-"
                "invariant symbol)");
    }
    if (radial == 0.0) continue;
    double w = rule.weights[i] * radial;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) m(a, b) += w * omega[a] * omega[b];
  }

  // Symmetrize away rounding skew; the form is symmetric exactly.
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      double v = 0.5 * (m(a, b) + m(b, a));
      m(a, b) = v;
      m(b, a) = v;
    }
  return m;
}

inline SymbolMatrix compute_symbol(const KernelSpec& k, const Vec& xi,
                                   const SymbolOptions& opt = {}) {
  SymbolMatrix s;
  s.xi = xi;
  s.entries = compute_symbol_matrix(k, xi, opt);
  return s;
}

// Psi(nu, eta) = C(s) (2 pi)^{2s} int_{cone cap S} |nu.w|^{2s} (eta.w)^2 dsigma(w).
// The direction rule is split along nu's orthogonal circle where |nu.w|^{2s}
// kinks.
inline double psi(const DoubleCone& cone, double s, const Vec& nu, const Vec& eta,
                  int sphere_order = 24) {
  require(s > 0.0 && s < 1.0, ErrorKind::usage, "psi: s outside (0,1)");
  require(std::abs(norm(nu) - 1.0) <= 1e-10, ErrorKind::usage, "psi: nu not unit");
  require(std::abs(norm(eta) - 1.0) <= 1e-10, ErrorKind::usage, "psi: eta not unit");
  SphereRule rule = make_sphere_rule(cone, {nu}, sphere_order);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Vec& w = rule.nodes[i];
    double dn = std::abs(dot(nu, w)), de = dot(eta, w);
    acc += rule.weights[i] * std::pow(dn, 2.0 * s) * de * de;
  }
  return detail::cached_cos_moment(s) * std::pow(2.0 * M_PI, 2.0 * s) * acc;
}

struct PsiMinResult {
  double value = 0.0;
  Vec nu{1};
  Vec eta{1};
  bool degenerate = false;  // estimate below resolution: cone too thin
};

namespace detail {

// Q(nu) = int_{cone cap S} |nu.w|^{2s} w w^T dsigma; Psi(nu, eta) is
// C(s)(2pi)^{2s} eta^T Q(nu) eta, so min over eta is the smallest eigenvalue.
inline Mat psi_direction_matrix(const DoubleCone& cone, double s, const Vec& nu,
                                int order) {
  SphereRule rule = make_sphere_rule(cone, {nu}, order);
  Mat q(cone.d);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Vec& w = rule.nodes[i];
    double c = rule.weights[i] * std::pow(std::abs(dot(nu, w)), 2.0 * s);
    for (int a = 0; a < cone.d; ++a)
      for (int b = 0; b < cone.d; ++b) q(a, b) += c * w[a] * w[b];
  }
  return q;
}

inline Vec sphere_point(int d, const std::vector<double>& ang) {
  if (d == 1) return Vec(1, 1.0);
  if (d == 2) return Vec(2, std::cos(ang[0]), std::sin(ang[0]));
  double st = std::sin(ang[0]);
  return Vec(3, st * std::cos(ang[1]), st * std::sin(ang[1]), std::cos(ang[0]));
}

// Minimal Nelder-Mead on k parameters (k = 1 or 2 here).
template <typename F>
inline std::vector<double> nelder_mead(F&& f, std::vector<double> x0, double step,
                                       int iters) {
  const std::size_t k = x0.size();
  std::vector<std::vector<double>> pts(k + 1, x0);
  for (std::size_t i = 0; i < k; ++i) pts[i + 1][i] += step;
  std::vector<double> vals(k + 1);
  for (std::size_t i = 0; i <= k; ++i) vals[i] = f(pts[i]);

  auto worst_best = [&](std::size_t& wi, std::size_t& bi, std::size_t& si) {
    wi = bi = 0;
    for (std::size_t i = 1; i <= k; ++i) {
      if (vals[i] > vals[wi]) wi = i;
      if (vals[i] < vals[bi]) bi = i;
    }
    si = bi;  // second-worst
    for (std::size_t i = 0; i <= k; ++i)
      if (i != wi && vals[i] > vals[si]) si = i;
  };

  for (int it = 0; it < iters; ++it) {
    std::size_t wi, bi, si;
    worst_best(wi, bi, si);
    std::vector<double> centroid(k, 0.0);
    for (std::size_t i = 0; i <= k; ++i) {
      if (i == wi) continue;
      for (std::size_t j = 0; j < k; ++j) centroid[j] += pts[i][j] / k;
    }
    auto blend = [&](double c) {
      std::vector<double> p(k);
      for (std::size_t j = 0; j < k; ++j)
        p[j] = centroid[j] + c * (pts[wi][j] - centroid[j]);
      return p;
    };
    auto refl = blend(-1.0);
    double fr = f(refl);
    if (fr < vals[bi]) {
      auto exp_ = blend(-2.0);
      double fe = f(exp_);
      if (fe < fr) { pts[wi] = exp_; vals[wi] = fe; }
      else { pts[wi] = refl; vals[wi] = fr; }
    } else if (fr < vals[si]) {
      pts[wi] = refl;
      vals[wi] = fr;
    } else {
      auto con = blend(0.5);
      double fc = f(con);
      if (fc < vals[wi]) { pts[wi] = con; vals[wi] = fc; }
      else {
        for (std::size_t i = 0; i <= k; ++i) {
          if (i == bi) continue;
          for (std::size_t j = 0; j < k; ++j)
            pts[i][j] = 0.5 * (pts[i][j] + pts[bi][j]);
          vals[i] = f(pts[i]);
        }
      }
    }
  }
  std::size_t wi, bi, si;
  worst_best(wi, bi, si);
  return pts[bi];
}

}  // namespace detail

// Coarse direction sweep (>= 64 samples for d=2, >= 1024 for d=3) followed by
// local simplex refinement of nu; eta is the minimizing eigenvector.
inline PsiMinResult psi_min(const DoubleCone& cone, double s, int sphere_order = 20) {
  require(s > 0.0 && s < 1.0, ErrorKind::usage, "psi_min: s outside (0,1)");
  const int d = cone.d;
  const double front = detail::cached_cos_moment(s) * std::pow(2.0 * M_PI, 2.0 * s);

  auto eval_q = [&](const Vec& nu) {
    return detail::psi_direction_matrix(cone, s, nu, sphere_order);
  };

  std::vector<std::vector<double>> seeds;
  if (d == 1) {
    seeds.push_back({});
  } else if (d == 2) {
    const int n = 128;
    for (int i = 0; i < n; ++i) seeds.push_back({M_PI * i / n});
  } else {
    const int n = 1200;  // Fibonacci sphere
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
      double z = 1.0 - 2.0 * (i + 0.5) / n;
      double theta = std::acos(std::clamp(z, -1.0, 1.0));
      seeds.push_back({theta, golden * i});
    }
  }

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_ang;
  for (const auto& ang : seeds) {
    Vec nu = detail::sphere_point(d, ang);
    double v = min_eigenvalue(eval_q(nu));
    if (v < best) {
      best = v;
      best_ang = ang;
    }
  }

  if (d > 1) {
    auto objective = [&](const std::vector<double>& ang) {
      return min_eigenvalue(eval_q(detail::sphere_point(d, ang)));
    };
    best_ang = detail::nelder_mead(objective, best_ang, 0.02, 60);
    best = objective(best_ang);
  }

  PsiMinResult out;
  out.nu = detail::sphere_point(d, best_ang);
  Mat q = eval_q(out.nu);
  auto eig = sym_eigenvalues(q);
  out.value = front * eig[0];
  // Eigenvector by inverse iteration on (Q - lambda I) with a tiny shift.
  Mat shifted = q - (eig[0] - 1e-12 * (1.0 + std::abs(eig[0]))) * Mat::identity(d);
  std::array<double, 3> v{1.0, 0.7, 0.4};
  for (int it = 0; it < 8; ++it) {
    auto w = solve_small(shifted, v);
    double n = 0.0;
    for (int a = 0; a < d; ++a) n += w[a] * w[a];
    n = std::sqrt(n);
    for (int a = 0; a < d; ++a) v[a] = w[a] / n;
  }
  out.eta = Vec(d);
  for (int a = 0; a < d; ++a) out.eta[a] = v[a];
  out.degenerate = !(out.value > 1e-10);
  return out;
}

struct EllConstants {
  double ell1 = 0.0;
  double ell2 = 0.0;
  double s = 0.0;
  int d = 0;
  int sphere_order = 0;
  std::string note;
};

// M(e1) for the full-cone, m == 1, r = infinity kernel: ell1 is the off-axis
// diagonal entry, ell2 the on-axis excess. d = 1 uses the ell1 = 0 convention
// (the projector is the scalar 1).
inline EllConstants ell_constants(int d, double s, int sphere_order = 32) {
  require(d >= 1 && d <= kMaxDim, ErrorKind::usage, "ell_constants: bad dimension");
  KernelSpec k = fractional_cone_kernel(d, s, DoubleCone::full(d));
  Vec e1(d);
  e1[0] = 1.0;
  SymbolOptions opt;
  opt.sphere_order = sphere_order;
  Mat m = compute_symbol_matrix(k, e1, opt);
  EllConstants ell;
  ell.s = s;
  ell.d = d;
  ell.sphere_order = sphere_order;
  if (d == 1) {
    ell.ell1 = 0.0;
    ell.ell2 = m(0, 0);
    ell.note = "d = 1: scalar symbol c(s)|xi|^{2s}; ell1 = 0 by convention";
  } else {
    ell.ell1 = m(1, 1);
    ell.ell2 = m(0, 0) - m(1, 1);
  }
  return ell;
}

// |xi|^{-2s} [ (1/ell1) I - (ell2 / (ell1 (ell1 + ell2))) xihat xihat^T ],
// the closed-form inverse of |xi|^{2s}(ell1 I + ell2 P).
inline Mat inverse_multiplier(const EllConstants& ell, const Vec& xi) {
  require(ell.d == xi.d, ErrorKind::usage, "inverse_multiplier: dimension mismatch");
  double nxi = norm(xi);
  require(nxi > 0.0, ErrorKind::usage,
          "inverse_multiplier: singular frequency xi = 0");
  double scale = std::pow(nxi, -2.0 * ell.s);
  if (ell.d == 1) {
    require(ell.ell2 > 0.0, ErrorKind::usage, "inverse_multiplier: ell2 must be positive");
    Mat m(1);
    m(0, 0) = scale / ell.ell2;
    return m;
  }
  require(ell.ell1 > 0.0 && ell.ell1 + ell.ell2 > 0.0, ErrorKind::usage,
          "inverse_multiplier: ell constants not positive definite");
  Vec xihat = (1.0 / nxi) * xi;
  Mat m = (1.0 / ell.ell1) * Mat::identity(ell.d) -
          (ell.ell2 / (ell.ell1 * (ell.ell1 + ell.ell2))) * outer(xihat, xihat);
  return scale * m;
}

}  // namespace nlelast
