#pragma once

// Direction quadrature over (cone intersect unit sphere). Nodes are placed
// only inside the cone, with arc boundaries resolved exactly, so indicator
// supports cost no accuracy. Split directions mark great circles
// {omega . nu = 0} across which integrands like |omega . nu|^(2s) lose
// smoothness; arcs are cut there and graded toward the cut.

#include <cmath>
#include <vector>

#include "nlelast/core.hpp"
#include "nlelast/geometry.hpp"
#include "nlelast/quadrature.hpp"

namespace nlelast {

struct SphereRule {
  std::vector<Vec> nodes;
  std::vector<double> weights;

  [[nodiscard]] size_t size() const { return nodes.size(); }
};

namespace detail {

// Graded boundary fractions walking away from a kink endpoint.
inline const std::vector<double>& kink_fractions() {
  static const std::vector<double> f{0.0, 0.004, 0.02, 0.1, 0.3, 1.0};
  return f;
}

// Appends GL nodes for f over [a, b] of a 1D parametrization, grading toward
// whichever endpoints are flagged as kinks.
template <typename Emit>
inline void emit_graded_1d(double a, double b, bool kink_lo, bool kink_hi,
                           int order, Emit&& emit) {
  if (b - a <= 0.0) return;
  std::vector<double> cuts;
  if (kink_lo && kink_hi) {
    double m = 0.5 * (a + b);
    for (double t : kink_fractions()) cuts.push_back(a + (m - a) * t);
    for (double t : kink_fractions()) cuts.push_back(b - (b - m) * t);
    cuts.push_back(m);
  } else if (kink_lo) {
    for (double t : kink_fractions()) cuts.push_back(a + (b - a) * t);
  } else if (kink_hi) {
    for (double t : kink_fractions()) cuts.push_back(b - (b - a) * t);
  } else {
    cuts = {a, b};
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const Quad1D& q = gauss_legendre(order);
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    double lo = cuts[i], hi = cuts[i + 1];
    if (hi - lo <= 0.0) continue;
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (size_t k = 0; k < q.nodes.size(); ++k)
      emit(mid + half * q.nodes[k], q.weights[k] * half);
  }
}

// Splits the arcs of `set` at the given angles; returns (start, end) pieces
// with kink flags at split endpoints.
struct ArcPiece {
  double a, b;
  bool kink_a, kink_b;
};

inline std::vector<ArcPiece> split_arcs(const ArcSet& set,
                                        const std::vector<double>& split_angles) {
  auto at_split = [&](double ang) {
    for (double s : split_angles)
      if (std::abs(std::remainder(ang - s, 2.0 * M_PI)) < 1e-9) return true;
    return false;
  };
  std::vector<ArcPiece> out;
  for (auto [start, len] : set.arcs) {
    std::vector<double> cuts{start, start + len};
    for (double ang : split_angles) {
      // Bring ang into [start, start + 2pi).
      double t = start + wrap_angle(ang - start);
      if (t > start + 1e-13 && t < start + len - 1e-13) cuts.push_back(t);
    }
    std::sort(cuts.begin(), cuts.end());
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
      bool ka = i > 0 || at_split(cuts[i]);
      bool kb = i + 2 < cuts.size() || at_split(cuts[i + 1]);
      out.push_back({cuts[i], cuts[i + 1], ka, kb});
    }
  }
  return out;
}

}  // namespace detail

// Builds the rule. split_dirs lists unit vectors nu whose orthogonal great
// circles are resolved; `order` controls nodes per smooth piece.
inline SphereRule make_sphere_rule(const DoubleCone& cone,
                                   const std::vector<Vec>& split_dirs = {},
                                   int order = 16) {
  SphereRule rule;
  const int d = cone.d;
  if (d == 1) {
    for (double sgn : {-1.0, 1.0}) {
      Vec z(1, sgn);
      if (cone_contains(cone, z)) {
        rule.nodes.push_back(z);
        rule.weights.push_back(1.0);
      }
    }
    return rule;
  }
  if (d == 2) {
    detail::ArcSet arcs = detail::circle_arcs(cone, /*two_sided=*/true);
    std::vector<double> splits;
    for (const Vec& nu : split_dirs) {
      double phi = std::atan2(nu[1], nu[0]);
      splits.push_back(phi + 0.5 * M_PI);
      splits.push_back(phi - 0.5 * M_PI);
    }
    for (const auto& piece : detail::split_arcs(arcs, splits)) {
      detail::emit_graded_1d(piece.a, piece.b, piece.kink_a, piece.kink_b, order,
                             [&](double phi, double w) {
                               rule.nodes.push_back(Vec(2, std::cos(phi), std::sin(phi)));
                               rule.weights.push_back(w);
                             });
    }
    return rule;
  }

  // d == 3: polar segments from cap topology plus ring-tangency angles of the
  // split circles; per ring, merged azimuthal arcs split at circle crossings.
  std::vector<double> seg = detail::polar_segments(cone, 0.2);
  {
    std::vector<double> extra;
    for (const Vec& nu : split_dirs) {
      double rho = std::hypot(nu[0], nu[1]);
      double psi = std::atan2(rho, std::abs(nu[2]));
      extra.push_back(psi);
      extra.push_back(M_PI - psi);
    }
    seg.insert(seg.end(), extra.begin(), extra.end());
    std::sort(seg.begin(), seg.end());
    seg.erase(std::unique(seg.begin(), seg.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              seg.end());
  }
  const int polar_order = 12;
  const Quad1D& pq = gauss_legendre(polar_order);
  for (size_t i = 0; i + 1 < seg.size(); ++i) {
    double mid = 0.5 * (seg[i] + seg[i + 1]);
    double half = 0.5 * (seg[i + 1] - seg[i]);
    if (half <= 0.0) continue;
    for (size_t kp = 0; kp < pq.nodes.size(); ++kp) {
      double psi = mid + half * pq.nodes[kp];
      double wp = pq.weights[kp] * half * std::sin(psi);
      double sp = std::sin(psi), cp = std::cos(psi);
      detail::ArcSet arcs = detail::ring_arcs(cone, /*two_sided=*/true, psi);
      if (arcs.arcs.empty()) continue;
      std::vector<double> splits;
      for (const Vec& nu : split_dirs) {
        double rho = std::hypot(nu[0], nu[1]);
        double phi_nu = std::atan2(nu[1], nu[0]);
        double A = sp * rho, B = nu[2] * cp;
        if (A < 1e-15) continue;
        double c = -B / A;
        if (std::abs(c) <= 1.0) {
          double w = std::acos(c);
          splits.push_back(phi_nu + w);
          splits.push_back(phi_nu - w);
        }
      }
      for (const auto& piece : detail::split_arcs(arcs, splits)) {
        detail::emit_graded_1d(
            piece.a, piece.b, piece.kink_a, piece.kink_b, std::max(8, order / 2),
            [&](double phi, double w) {
              rule.nodes.push_back(Vec(3, sp * std::cos(phi), sp * std::sin(phi), cp));
              rule.weights.push_back(w * wp);
            });
      }
    }
  }
  return rule;
}

}  // namespace nlelast
