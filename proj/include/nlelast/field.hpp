#pragma once

// Vector fields sampled on a Grid. Storage is component-major: all samples of
// component 0 (row-major over the grid), then component 1, and so on.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "nlelast/core.hpp"
#include "nlelast/geometry.hpp"

namespace nlelast {

struct GridField {
  Grid grid;
  int components = 0;
  std::vector<double> data;

  GridField(const Grid& g, int comps) : grid(g), components(comps) {
    require(comps >= 1 && comps <= kMaxDim, ErrorKind::usage,
            "GridField: component count outside [1,3]");
    data.assign(static_cast<std::size_t>(comps) * g.num_points(), 0.0);
  }

  std::size_t points() const { return static_cast<std::size_t>(grid.num_points()); }

  double& at(int c, std::size_t idx) { return data[static_cast<std::size_t>(c) * points() + idx]; }
  double at(int c, std::size_t idx) const {
    return data[static_cast<std::size_t>(c) * points() + idx];
  }

  Vec value(std::size_t idx) const {
    Vec u(components);
    for (int c = 0; c < components; ++c) u[c] = at(c, idx);
    return u;
  }

  void set_value(std::size_t idx, const Vec& u) {
    for (int c = 0; c < components; ++c) at(c, idx) = u[c];
  }
};

inline bool same_shape(const GridField& a, const GridField& b) {
  return a.components == b.components && a.grid.same_layout(b.grid);
}

inline void require_same_shape(const GridField& a, const GridField& b, const char* who) {
  require(same_shape(a, b), ErrorKind::usage, std::string(who) + ": field shape mismatch");
}

// u <- u + c * v
inline void axpy(GridField& u, double c, const GridField& v) {
  require_same_shape(u, v, "axpy");
  for (std::size_t i = 0; i < u.data.size(); ++i) u.data[i] += c * v.data[i];
}

inline void scale(GridField& u, double c) {
  for (double& x : u.data) x *= c;
}

// Euclidean dot product of the raw sample vectors (no cell-volume weight).
inline double dot(const GridField& a, const GridField& b) {
  require_same_shape(a, b, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) acc += a.data[i] * b.data[i];
  return acc;
}

// L2(Omega_h) norm: cell volume times the squared samples.
inline double l2_norm(const GridField& u) {
  return std::sqrt(u.grid.cell_volume() * dot(u, u));
}

inline double max_abs(const GridField& u) {
  double m = 0.0;
  for (double x : u.data) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs_diff(const GridField& a, const GridField& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

inline Vec component_means(const GridField& u) {
  Vec mu(u.components);
  const double inv = 1.0 / static_cast<double>(u.points());
  for (int c = 0; c < u.components; ++c) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.points(); ++i) acc += u.at(c, i);
    mu[c] = acc * inv;
  }
  return mu;
}

inline Vec subtract_component_means(GridField& u) {
  Vec mu = component_means(u);
  for (int c = 0; c < u.components; ++c)
    for (std::size_t i = 0; i < u.points(); ++i) u.at(c, i) -= mu[c];
  return mu;
}

// Samples fn at every grid point. fn: Vec (point) -> Vec (components).
inline GridField sample_field(const Grid& g, int comps,
                              const std::function<Vec(const Vec&)>& fn) {
  GridField u(g, comps);
  for (std::size_t i = 0; i < g.num_points(); ++i) {
    Vec v = fn(g.point(i));
    require(v.d == comps, ErrorKind::usage, "sample_field: component count mismatch");
    u.set_value(i, v);
  }
  return u;
}

inline GridField sample_scalar(const Grid& g,
                               const std::function<double(const Vec&)>& fn) {
  GridField u(g, 1);
  for (std::size_t i = 0; i < g.num_points(); ++i) u.at(0, i) = fn(g.point(i));
  return u;
}

// Deterministic standard-normal field.
inline GridField random_field(const Grid& g, int comps, std::uint64_t seed) {
  GridField u(g, comps);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (double& x : u.data) x = dist(rng);
  return u;
}

// Zeroes every sample outside the interior of the mask.
inline void enforce_mask(GridField& u, const DomainMask& mask) {
  require(u.grid.same_layout(mask.grid), ErrorKind::usage, "enforce_mask: grid mismatch");
  for (int c = 0; c < u.components; ++c)
    for (std::size_t i = 0; i < u.points(); ++i)
      if (!mask.is_interior(i)) u.at(c, i) = 0.0;
}

inline bool vanishes_outside(const GridField& u, const DomainMask& mask) {
  require(u.grid.same_layout(mask.grid), ErrorKind::usage,
          "vanishes_outside: grid mismatch");
  for (int c = 0; c < u.components; ++c)
    for (std::size_t i = 0; i < u.points(); ++i)
      if (!mask.is_interior(i) && u.at(c, i) != 0.0) return false;
  return true;
}

}  // namespace nlelast
