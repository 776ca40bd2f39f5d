#pragma once

// Interaction-cone geometry, uniform tensor grids, and Dirichlet volume
// masks. Cones are unions of axis/half-angle caps; a DoubleCone is symmetric
// under z -> -z by construction, a HalfConeSet is one-sided. Surface measures
// on the unit sphere are computed exactly in d in {1,2} (arc merging) and by
// breakpoint-aware Gauss quadrature over polar rings in d = 3.
//
// In d = 1 the unit sphere is {-1,+1} with counting measure, and any cap with
// positive half-angle contains both signs, so every nonempty double cone is
// the full cone there.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "nlelast/core.hpp"
#include "nlelast/quadrature.hpp"

namespace nlelast {

struct Cap {
  Vec axis;           // unit vector
  double half_angle;  // in (0, pi]
};

inline Cap make_cap(const Vec& axis, double half_angle) {
  require(half_angle > 0.0 && half_angle <= M_PI + 1e-12, ErrorKind::usage,
          "make_cap: half_angle outside (0, pi]");
  Cap c{normalized(axis), std::min(half_angle, M_PI)};
  // Snap to a closed half-space so lattice directions orthogonal to the axis
  // are kept when the cap is meant to cover the whole sphere.
  if (std::abs(c.half_angle - 0.5 * M_PI) < 1e-12) c.half_angle = 0.5 * M_PI;
  return c;
}

// Symmetric double cone: z is inside iff |zhat . axis| >= cos(half_angle)
// for some cap.
struct DoubleCone {
  int d = 0;
  std::vector<Cap> caps;

  static DoubleCone full(int dim) {
    DoubleCone c;
    c.d = dim;
    c.caps.push_back(make_cap(Vec(dim, 1.0), M_PI));
    return c;
  }
};

// One-sided cap union: z is inside iff zhat . axis >= cos(half_angle) for
// some cap. Used for the asymmetric kernel supports.
struct HalfConeSet {
  int d = 0;
  std::vector<Cap> caps;
};

namespace detail {

inline double cap_cos(const Cap& c) {
  if (c.half_angle == 0.5 * M_PI) return 0.0;
  return std::cos(c.half_angle);
}

}  // namespace detail

inline bool cone_contains(const DoubleCone& cone, const Vec& z) {
  double n = norm(z);
  if (n <= 0.0) return false;
  for (const Cap& c : cone.caps) {
    double t = dot(z, c.axis) / n;
    if (std::abs(t) >= detail::cap_cos(c)) return true;
  }
  return false;
}

inline bool cone_contains(const HalfConeSet& cone, const Vec& z) {
  double n = norm(z);
  if (n <= 0.0) return false;
  for (const Cap& c : cone.caps) {
    double t = dot(z, c.axis) / n;
    if (t >= detail::cap_cos(c)) return true;
  }
  return false;
}

namespace detail {

// Closed arcs on the circle, angles in radians. Arcs are kept normalized:
// start in [0, 2pi), 0 < length <= 2pi, pairwise disjoint, sorted.
struct ArcSet {
  std::vector<std::pair<double, double>> arcs;  // (start, length)

  [[nodiscard]] double total() const {
    double s = 0.0;
    for (auto& a : arcs) s += a.second;
    return s;
  }
};

inline double wrap_angle(double a) {
  double t = std::fmod(a, 2.0 * M_PI);
  if (t < 0.0) t += 2.0 * M_PI;
  return t;
}

// Merges raw (start, length) arcs, handling wrap-around.
inline ArcSet merge_arcs(std::vector<std::pair<double, double>> raw) {
  ArcSet out;
  std::vector<std::pair<double, double>> flat;  // [start, end] with end > start
  bool full = false;
  for (auto [s, len] : raw) {
    if (len <= 0.0) continue;
    if (len >= 2.0 * M_PI - 1e-15) {
      full = true;
      break;
    }
    double a = wrap_angle(s);
    double b = a + len;
    if (b <= 2.0 * M_PI) {
      flat.emplace_back(a, b);
    } else {
      flat.emplace_back(a, 2.0 * M_PI);
      flat.emplace_back(0.0, b - 2.0 * M_PI);
    }
  }
  if (full) {
    out.arcs.emplace_back(0.0, 2.0 * M_PI);
    return out;
  }
  if (flat.empty()) return out;
  std::sort(flat.begin(), flat.end());
  std::vector<std::pair<double, double>> merged;  // [start, end]
  for (auto& iv : flat) {
    if (!merged.empty() && iv.first <= merged.back().second + 1e-14) {
      merged.back().second = std::max(merged.back().second, iv.second);
    } else {
      merged.push_back(iv);
    }
  }
  // Glue across the 0 == 2pi seam.
  if (merged.size() > 1 && merged.front().first <= 1e-14 &&
      merged.back().second >= 2.0 * M_PI - 1e-14) {
    merged.front().first = merged.back().first - 2.0 * M_PI;
    merged.pop_back();
  }
  for (auto& iv : merged) out.arcs.emplace_back(wrap_angle(iv.first), iv.second - iv.first);
  std::sort(out.arcs.begin(), out.arcs.end());
  return out;
}

// Azimuthal set {u : A cos(u) >= t} as raw arcs centered at 0.
inline void arcs_cos_ge(double A, double t, double center,
                        std::vector<std::pair<double, double>>& raw) {
  if (A < 1e-15) {
    if (0.0 >= t) raw.emplace_back(0.0, 2.0 * M_PI);
    return;
  }
  double c = t / A;
  if (c > 1.0) return;
  if (c <= -1.0) {
    raw.emplace_back(0.0, 2.0 * M_PI);
    return;
  }
  double w = std::acos(c);
  raw.emplace_back(center - w, 2.0 * w);
}

// Azimuthal set {u : A cos(u) <= t}: complement arc.
inline void arcs_cos_le(double A, double t, double center,
                        std::vector<std::pair<double, double>>& raw) {
  if (A < 1e-15) {
    if (0.0 <= t) raw.emplace_back(0.0, 2.0 * M_PI);
    return;
  }
  double c = t / A;
  if (c >= 1.0) {
    raw.emplace_back(0.0, 2.0 * M_PI);
    return;
  }
  if (c < -1.0) return;
  double w = std::acos(c);
  raw.emplace_back(center + w, 2.0 * (M_PI - w));
}

// d = 2: arc set of a cap union on the unit circle.
template <typename ConeT>
inline ArcSet circle_arcs(const ConeT& cone, bool two_sided) {
  std::vector<std::pair<double, double>> raw;
  for (const Cap& c : cone.caps) {
    double phi0 = std::atan2(c.axis[1], c.axis[0]);
    double th = c.half_angle;
    if (two_sided) {
      if (th >= 0.5 * M_PI) {
        raw.emplace_back(0.0, 2.0 * M_PI);
      } else {
        raw.emplace_back(phi0 - th, 2.0 * th);
        raw.emplace_back(phi0 + M_PI - th, 2.0 * th);
      }
    } else {
      raw.emplace_back(phi0 - th, 2.0 * th);
    }
  }
  return merge_arcs(raw);
}

// d = 3 ring decomposition. For polar angle psi (from +e3), the azimuthal
// membership set of each cap is the union of at most two exact arcs.
struct RingGeometry {
  double sin_psi = 0.0, cos_psi = 0.0;
};

template <typename ConeT>
inline ArcSet ring_arcs(const ConeT& cone, bool two_sided, double psi) {
  double sp = std::sin(psi), cp = std::cos(psi);
  std::vector<std::pair<double, double>> raw;
  for (const Cap& c : cone.caps) {
    double rho = std::hypot(c.axis[0], c.axis[1]);
    double phi_a = std::atan2(c.axis[1], c.axis[0]);
    double A = sp * rho;
    double B = c.axis[2] * cp;
    double cth = cap_cos(c);
    arcs_cos_ge(A, cth - B, phi_a, raw);
    if (two_sided) arcs_cos_le(A, -cth - B, phi_a, raw);
  }
  return merge_arcs(raw);
}

// Polar angles where a cap's azimuthal arc topology can change.
inline void polar_breakpoints_for_cap(const Cap& c, std::vector<double>& out) {
  double rho = std::hypot(c.axis[0], c.axis[1]);
  double delta = std::atan2(rho, c.axis[2]);  // polar angle of the axis
  double th = c.half_angle;
  for (double base : {delta, -delta}) {
    for (double off : {th, -th, M_PI - th, th - M_PI}) {
      double psi = base + off;
      psi = std::abs(std::remainder(psi, 2.0 * M_PI));
      if (psi > M_PI) psi = 2.0 * M_PI - psi;
      out.push_back(psi);
    }
  }
}

template <typename ConeT>
inline std::vector<double> polar_segments(const ConeT& cone, double max_len = 0.35) {
  std::vector<double> cuts{0.0, M_PI};
  for (const Cap& c : cone.caps) polar_breakpoints_for_cap(c, cuts);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-13; }),
             cuts.end());
  std::vector<double> fine;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    double a = cuts[i], b = cuts[i + 1];
    int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / max_len)));
    for (int p = 0; p < pieces; ++p) fine.push_back(a + (b - a) * p / pieces);
  }
  fine.push_back(M_PI);
  return fine;
}

template <typename ConeT>
inline double sphere_measure_impl(const ConeT& cone, bool two_sided) {
  const int d = cone.d;
  require(!cone.caps.empty(), ErrorKind::usage, "surface measure of empty cone");
  if (d == 1) {
    double m = 0.0;
    for (double sgn : {-1.0, 1.0}) {
      bool inside = false;
      for (const Cap& c : cone.caps) {
        double t = sgn * c.axis[0];
        if ((two_sided ? std::abs(t) : t) >= cap_cos(c)) inside = true;
      }
      if (inside) m += 1.0;
    }
    return m;
  }
  if (d == 2) return circle_arcs(cone, two_sided).total();
  // d == 3: integrate ring arc length against sin(psi) d psi per segment.
  // Where a cap circle is tangent to a polar ring the azimuthal width behaves
  // like a square root, so shells are graded geometrically toward both
  // segment ends (tangencies only occur at breakpoints).
  double total = 0.0;
  std::vector<double> seg = polar_segments(cone);
  auto ring = [&](double psi) {
    return ring_arcs(cone, two_sided, psi).total() * std::sin(psi);
  };
  for (size_t i = 0; i + 1 < seg.size(); ++i) {
    double a = seg[i], b = seg[i + 1];
    if (b - a < 1e-14) continue;
    double m = 0.5 * (a + b);
    for (double t = m; t - a > 1e-13 * (b - a);) {
      double t2 = a + 0.25 * (t - a);
      total += gl_integrate(ring, t2, t, 16);
      t = t2;
    }
    for (double t = m; b - t > 1e-13 * (b - a);) {
      double t2 = b - 0.25 * (b - t);
      total += gl_integrate(ring, t, t2, 16);
      t = t2;
    }
  }
  return total;
}

}  // namespace detail

// H^{d-1} measure of (cone intersect unit sphere). Relative accuracy is exact
// in d in {1,2} and better than 1e-9 for cap unions in d = 3.
inline double cone_surface_measure(const DoubleCone& cone) {
  return detail::sphere_measure_impl(cone, /*two_sided=*/true);
}

inline double cone_surface_measure(const HalfConeSet& cone) {
  return detail::sphere_measure_impl(cone, /*two_sided=*/false);
}

// beta(r) = int over (cone minus ball of radius r) of |h|^(-d-2s) dh
//         = measure(cone on sphere) * r^(-2s) / (2s).
inline double cone_tail_mass(const DoubleCone& cone, double s, double r) {
  require(s > 0.0 && s < 1.0, ErrorKind::usage, "cone_tail_mass: s outside (0,1)");
  require(r > 0.0, ErrorKind::usage, "cone_tail_mass: r must be positive");
  return cone_surface_measure(cone) * std::pow(r, -2.0 * s) / (2.0 * s);
}

// Uniform tensor grid. Points are x_i = origin + i*h componentwise with
// i in [0, n); a periodic grid identifies index n[i] with 0 and represents
// the box [origin, origin + n*h).
struct Grid {
  int d = 0;
  std::array<int, kMaxDim> n{1, 1, 1};
  std::array<double, kMaxDim> h{1.0, 1.0, 1.0};
  Vec origin;
  bool periodic = false;

  Grid() = default;
  Grid(int dim, std::array<int, kMaxDim> counts, std::array<double, kMaxDim> spacing,
       bool is_periodic, Vec orig = Vec())
      : d(dim), n(counts), h(spacing), origin(orig), periodic(is_periodic) {
    require(dim >= 1 && dim <= kMaxDim, ErrorKind::usage, "Grid: d outside {1,2,3}");
    if (origin.d == 0) origin = Vec(dim);
    for (int a = 0; a < dim; ++a) {
      require(n[static_cast<size_t>(a)] >= 2, ErrorKind::usage, "Grid: n < 2");
      require(h[static_cast<size_t>(a)] > 0.0, ErrorKind::usage, "Grid: h <= 0");
    }
    for (int a = dim; a < kMaxDim; ++a) {
      n[static_cast<size_t>(a)] = 1;
      h[static_cast<size_t>(a)] = 1.0;
    }
  }

  [[nodiscard]] int64_t num_points() const {
    int64_t m = 1;
    for (int a = 0; a < d; ++a) m *= n[static_cast<size_t>(a)];
    return m;
  }

  [[nodiscard]] double box_length(int axis) const {
    return n[static_cast<size_t>(axis)] * h[static_cast<size_t>(axis)];
  }

  [[nodiscard]] double min_box_length() const {
    double m = box_length(0);
    for (int a = 1; a < d; ++a) m = std::min(m, box_length(a));
    return m;
  }

  [[nodiscard]] double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < d; ++a) v *= h[static_cast<size_t>(a)];
    return v;
  }

  [[nodiscard]] double min_spacing() const {
    double m = h[0];
    for (int a = 1; a < d; ++a) m = std::min(m, h[static_cast<size_t>(a)]);
    return m;
  }

  [[nodiscard]] std::array<int, kMaxDim> unflatten(int64_t idx) const {
    std::array<int, kMaxDim> mi{0, 0, 0};
    for (int a = d - 1; a >= 0; --a) {
      int na = n[static_cast<size_t>(a)];
      mi[static_cast<size_t>(a)] = static_cast<int>(idx % na);
      idx /= na;
    }
    return mi;
  }

  [[nodiscard]] int64_t flatten(const std::array<int, kMaxDim>& mi) const {
    int64_t idx = 0;
    for (int a = 0; a < d; ++a) idx = idx * n[static_cast<size_t>(a)] + mi[static_cast<size_t>(a)];
    return idx;
  }

  [[nodiscard]] Vec point(const std::array<int, kMaxDim>& mi) const {
    Vec x(d);
    for (int a = 0; a < d; ++a)
      x[a] = origin[a] + mi[static_cast<size_t>(a)] * h[static_cast<size_t>(a)];
    return x;
  }

  [[nodiscard]] Vec point(int64_t idx) const { return point(unflatten(idx)); }

  // Frequency of FFT index k on one axis: k <= n/2 maps to k, else k - n,
  // then xi = k_signed / (n*h).
  [[nodiscard]] double frequency(int axis, int k) const {
    int na = n[static_cast<size_t>(axis)];
    int ks = (k <= na / 2) ? k : k - na;
    return static_cast<double>(ks) / (na * h[static_cast<size_t>(axis)]);
  }

  [[nodiscard]] bool same_layout(const Grid& o) const {
    if (d != o.d || periodic != o.periodic) return false;
    for (int a = 0; a < d; ++a) {
      if (n[static_cast<size_t>(a)] != o.n[static_cast<size_t>(a)]) return false;
      if (h[static_cast<size_t>(a)] != o.h[static_cast<size_t>(a)]) return false;
      if (origin[a] != o.origin[a]) return false;
    }
    return true;
  }
};

// Interior flags over a grid. Exterior points carry the Dirichlet volume
// constraint u = 0. On non-periodic grids the stored lattice must extend a
// collar of exterior points around the interior at least as wide as the
// operator's interaction radius; `collar_width` reports the available width.
struct DomainMask {
  Grid grid;
  std::vector<uint8_t> inside;
  int64_t interior_count = 0;

  DomainMask() = default;

  template <typename Pred>
  DomainMask(const Grid& g, Pred&& pred) : grid(g) {
    int64_t np = g.num_points();
    inside.resize(static_cast<size_t>(np));
    for (int64_t i = 0; i < np; ++i) {
      bool in = pred(g.point(i));
      inside[static_cast<size_t>(i)] = in ? 1 : 0;
      if (in) ++interior_count;
    }
    require(interior_count >= 1, ErrorKind::usage,
            "DomainMask: no interior points");
  }

  static DomainMask all(const Grid& g) {
    return DomainMask(g, [](const Vec&) { return true; });
  }

  static DomainMask box(const Grid& g, const Vec& lo, const Vec& hi) {
    return DomainMask(g, [&](const Vec& x) {
      for (int a = 0; a < g.d; ++a)
        if (x[a] <= lo[a] || x[a] >= hi[a]) return false;
      return true;
    });
  }

  [[nodiscard]] bool is_interior(int64_t idx) const {
    return inside[static_cast<size_t>(idx)] != 0;
  }

  // Shortest distance from any interior point to the stored lattice boundary.
  [[nodiscard]] double collar_width() const {
    if (grid.periodic) return std::numeric_limits<double>::infinity();
    double w = std::numeric_limits<double>::infinity();
    int64_t np = grid.num_points();
    for (int64_t i = 0; i < np; ++i) {
      if (!is_interior(i)) continue;
      auto mi = grid.unflatten(i);
      for (int a = 0; a < grid.d; ++a) {
        double ha = grid.h[static_cast<size_t>(a)];
        int na = grid.n[static_cast<size_t>(a)];
        w = std::min(w, mi[static_cast<size_t>(a)] * ha);
        w = std::min(w, (na - 1 - mi[static_cast<size_t>(a)]) * ha);
      }
    }
    return w;
  }
};

}  // namespace nlelast
