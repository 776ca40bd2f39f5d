#pragma once

// Numeric checks of the structural kernel hypotheses: the second-moment
// integrability bound, the principal-value compensators C1/C2, and the
// antisymmetric-part domination (k2). All integrals run in polar form with
// direction nodes confined to the kernel's support cone and radial shells
// graded toward the singularity.

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nlelast/core.hpp"
#include "nlelast/geometry.hpp"
#include "nlelast/kernels.hpp"
#include "nlelast/quadrature.hpp"
#include "nlelast/sphere_rule.hpp"

namespace nlelast {

struct QuadResolution {
  int sphere_order = 16;
  int min_shells = 0;          // 0: pick from the kernel's singularity strength
  double tail_rel_tol = 1e-12; // stop outward shells when relatively negligible
  double value_guard = 1e15;   // divergence guard for improper integrals
};

namespace detail {

inline int shells_for_kernel(const KernelSpec& k, const QuadResolution& res) {
  if (res.min_shells > 0) return res.min_shells;
  double s = 0.5;
  switch (k.family) {
    case KernelFamily::fractional_cone: s = k.s; break;
    case KernelFamily::mixed_order: s = k.s; break;
    case KernelFamily::variable_order: s = 0.5 * k.a_hi; break;
    default: s = 0.5; break;
  }
  return shells_for_exponent(s);
}

// The k2 integrand ka^2/ks decays more slowly toward the origin than the
// kernel itself; shell depth must track its radial exponent rho^(1-2s_eff).
inline int shells_for_k2(const KernelSpec& k, const QuadResolution& res) {
  if (res.min_shells > 0) return res.min_shells;
  double s_eff = 0.9;  // conservative default for custom kernels
  int depth_cap = 2000;
  switch (k.family) {
    case KernelFamily::mixed_order:
      // ka^2/ks ~ rho^(-d-4a+2s), so s_eff = 1 + 2a - s. Cap the ladder so
      // rho^-(d+2a) stays representable; past the cap the stub decays like
      // 2^(-2n(s-2a)), negligible wherever the cap can bind.
      s_eff = 1.0 + 2.0 * k.alpha - k.s;
      depth_cap = static_cast<int>(960.0 / (k.d + 2.0 * k.alpha));
      break;
    case KernelFamily::variable_order:
      // ka(x, x-z) ~ rho^(1-d-a(x)) by locality of b and a, so the true decay
      // is t^(2-a); below rho ~ 1e-15 the float difference b(x) - b(y) has no
      // signal left, so deeper shells add noise, not accuracy.
      s_eff = 0.5 * k.a_hi;
      depth_cap = 50;
      break;
    case KernelFamily::integrable_cone:
      s_eff = 0.5;  // bounded integrand
      break;
    default:
      break;
  }
  return std::min(shells_for_exponent(std::clamp(s_eff, 0.05, 0.99)), depth_cap);
}

// Integrates f(rho, omega) * rho^(d-1) over the cone x (r_lo, r_hi), carrying
// the infinite upper limit by outward geometric shells until the running
// total stops moving. Throws on divergence.
template <typename F>
inline double polar_integral(const KernelSpec& spec, const SphereRule& rule, F&& f,
                             double r_lo, double r_hi, const QuadResolution& res,
                             const std::vector<double>& breakpoints,
                             const char* label) {
  const int d = spec.d;
  auto shell_value = [&](double a, double b) {
    double acc = 0.0;
    const Quad1D& q = gauss_legendre(8);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (size_t iq = 0; iq < q.nodes.size(); ++iq) {
      double rho = mid + half * q.nodes[iq];
      double wr = q.weights[iq] * half * std::pow(rho, d - 1);
      double ang = 0.0;
      for (size_t in = 0; in < rule.size(); ++in)
        ang += rule.weights[in] * f(rho, rule.nodes[in]);
      acc += wr * ang;
    }
    return acc;
  };

  if (std::isfinite(r_hi) && r_hi <= r_lo) return 0.0;  // empty range

  double finite_hi = std::isfinite(r_hi) ? r_hi : std::max(2.0, 2.0 * r_lo);
  for (double b : breakpoints) finite_hi = std::max(finite_hi, std::isfinite(b) ? b : 0.0);

  double total = 0.0;
  int shells = shells_for_kernel(spec, res);
  for (auto [a, b] : graded_intervals(r_lo, finite_hi, shells, 0.5, breakpoints))
    total += shell_value(a, b);

  if (!std::isfinite(r_hi)) {
    double lo = finite_hi;
    bool tail_converged = false;
    for (int k = 0; k < 700; ++k) {
      double hi = lo * 2.0;
      double seg = shell_value(lo, hi);
      total += seg;
      require(std::isfinite(total) && std::abs(total) < res.value_guard,
              ErrorKind::hypothesis,
              std::string(label) + ": integral diverges (guard exceeded)");
      if (std::abs(seg) <= res.tail_rel_tol * (std::abs(total) + 1e-300)) {
        tail_converged = true;
        break;
      }
      lo = hi;
    }
    require(tail_converged, ErrorKind::hypothesis,
            std::string(label) + ": integral diverges (tail does not decay)");
  }
  require(std::isfinite(total) && std::abs(total) < res.value_guard,
          ErrorKind::hypothesis, std::string(label) + ": integral diverges");
  return total;
}

}  // namespace detail

// sup over probes of int min{1, |z|^2} k_s(x, x-z) dz.
inline double check_second_moment(const KernelSpec& spec, const std::vector<Vec>& probes,
                                  const QuadResolution& res = {}) {
  require(!probes.empty(), ErrorKind::usage, "check_second_moment: no probes");
  SphereRule rule = make_sphere_rule(support_cone(spec), {}, res.sphere_order);
  double worst = 0.0;
  for (const Vec& x : probes) {
    auto f = [&](double rho, const Vec& omega) {
      Vec y = x - rho * omega;
      return std::min(1.0, rho * rho) * eval_ks(spec, x, y);
    };
    double v = detail::polar_integral(spec, rule, f, 0.0, truncation_radius(spec), res,
                                      {1.0}, "second_moment");
    worst = std::max(worst, v);
  }
  return worst;
}

// C_eps = sup over probes of int_{|z| > eps} |k_a(x, x-z)| dz, per eps.
inline std::map<double, double> check_C1(const KernelSpec& spec,
                                         const std::vector<double>& eps_list,
                                         const std::vector<Vec>& probes,
                                         const QuadResolution& res = {}) {
  require(!probes.empty(), ErrorKind::usage, "check_C1: no probes");
  std::map<double, double> out;
  if (spec.symmetric) {
    for (double e : eps_list) out[e] = 0.0;
    return out;
  }
  SphereRule rule = make_sphere_rule(support_cone(spec), {}, res.sphere_order);
  for (double eps : eps_list) {
    require(eps > 0.0, ErrorKind::usage, "check_C1: eps must be positive");
    double worst = 0.0;
    for (const Vec& x : probes) {
      auto f = [&](double rho, const Vec& omega) {
        return std::abs(eval_ka(spec, x, x - rho * omega));
      };
      double v = detail::polar_integral(spec, rule, f, eps, truncation_radius(spec), res,
                                        {1.0}, "C1");
      worst = std::max(worst, v);
    }
    out[eps] = worst;
  }
  return out;
}

// Minimum eigenvalue over probes of
//   T(x, eps) = int_{|z| > eps} k_a(x, x-z) zhat zhat^T dz,
// with antipodes averaged pointwise so odd kernels cancel exactly.
inline std::map<double, double> check_C2(const KernelSpec& spec,
                                         const std::vector<double>& eps_list,
                                         const std::vector<Vec>& probes,
                                         const QuadResolution& res = {}) {
  require(!probes.empty(), ErrorKind::usage, "check_C2: no probes");
  std::map<double, double> out;
  if (spec.symmetric) {
    for (double e : eps_list) out[e] = 0.0;
    return out;
  }
  const int d = spec.d;
  SphereRule rule = make_sphere_rule(support_cone(spec), {}, res.sphere_order);
  for (double eps : eps_list) {
    require(eps > 0.0, ErrorKind::usage, "check_C2: eps must be positive");
    double min_eig = std::numeric_limits<double>::infinity();
    for (const Vec& x : probes) {
      Mat t(d);
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
          auto f = [&](double rho, const Vec& omega) {
            double ka = 0.5 * (eval_ka(spec, x, x - rho * omega) +
                               eval_ka(spec, x, x + rho * omega));
            return ka * omega[i] * omega[j];
          };
          double v = detail::polar_integral(spec, rule, f, eps, truncation_radius(spec),
                                            res, {1.0}, "C2");
          t(i, j) = v;
          t(j, i) = v;
        }
      min_eig = std::min(min_eig, min_eigenvalue(t));
    }
    out[eps] = min_eig;
  }
  return out;
}

// A2 = sup over probes of int k_a(x, x-z)^2 / ktilde(x, x-z) dz. ktilde
// defaults to the symmetric part. Wherever k_a != 0 but ktilde == 0 the
// hypothesis fails structurally.
inline double check_k2(const KernelSpec& spec, const std::vector<Vec>& probes,
                       const QuadResolution& res = {},
                       const std::function<double(const Vec&, const Vec&)>& ktilde = {}) {
  require(!probes.empty(), ErrorKind::usage, "check_k2: no probes");
  if (spec.symmetric) return 0.0;
  QuadResolution k2_res = res;
  k2_res.min_shells = detail::shells_for_k2(spec, res);
  SphereRule rule = make_sphere_rule(support_cone(spec), {}, res.sphere_order);
  double worst = 0.0;
  for (const Vec& x : probes) {
    auto f = [&](double rho, const Vec& omega) {
      Vec y = x - rho * omega;
      double ka = eval_ka(spec, x, y);
      if (ka == 0.0) return 0.0;
      double kt = ktilde ? ktilde(x, y) : eval_ks(spec, x, y);
      require(kt > 0.0, ErrorKind::hypothesis,
              "k2: ktilde vanishes where the antisymmetric part does not");
      // (ka/kt)*ka, not ka*ka/kt: near the origin ka^2 can overflow even
      // where the quotient is representable.
      return (ka / kt) * ka;
    };
    double v = detail::polar_integral(spec, rule, f, 0.0, truncation_radius(spec),
                                      k2_res, {1.0}, "k2");
    worst = std::max(worst, v);
  }
  return worst;
}

struct HypothesisReport {
  double second_moment = 0.0;
  std::map<double, double> c1;
  std::map<double, double> c2_min_eig;
  double a2 = 0.0;
  bool symmetric = false;
  bool pk_applicable = false;
  std::string pk_note;
  std::vector<std::string> notes;
};

inline HypothesisReport check_kernel(const KernelSpec& spec, const std::vector<Vec>& probes,
                                     const std::vector<double>& eps_list = {0.25, 0.5, 1.0},
                                     const QuadResolution& res = {}) {
  HypothesisReport rep;
  rep.symmetric = spec.symmetric;
  rep.second_moment = check_second_moment(spec, probes, res);
  rep.c1 = check_C1(spec, eps_list, probes, res);
  rep.c2_min_eig = check_C2(spec, eps_list, probes, res);
  rep.a2 = check_k2(spec, probes, res);
  rep.notes.push_back(
      "ktilde = k_s satisfies the domination hypothesis with A1 = 2: the strain "
      "form against k_s equals the energy seminorm, which is at most twice the "
      "full energy norm; numeric testing of that case is skipped by design.");
  switch (spec.family) {
    case KernelFamily::fractional_cone:
    case KernelFamily::integrable_cone:
    case KernelFamily::mixed_order:
    case KernelFamily::variable_order:
      rep.pk_applicable = true;
      rep.pk_note = "Poincare-Korn inequality established for this kernel family "
                    "on bounded domains with Dirichlet volume constraints.";
      break;
    case KernelFamily::custom:
      rep.pk_applicable = false;
      rep.pk_note = "custom kernel: Poincare-Korn status unknown; supply external "
                    "evidence or verify via pk_constant.";
      break;
  }
  if (spec.family == KernelFamily::variable_order)
    rep.notes.push_back(
        "variable_order: exponent bounds checked as declared; the modulus-of-"
        "continuity condition on alpha(x) is accepted without enforcement.");
  return rep;
}

}  // namespace nlelast
