#pragma once

// One-dimensional quadrature building blocks: cached Gauss-Legendre rules,
// geometrically graded radial partitions for kernels singular at the origin,
// and the fractional cosine moments
//   C(s)    = int_0^inf (1 - cos t) t^(-1-2s) dt
//   C(s, X) = int_0^X   (1 - cos t) t^(-1-2s) dt
// evaluated by two independent numeric routes so tests can cross-check them.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "nlelast/core.hpp"

namespace nlelast {

struct Quad1D {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre rule by Newton iteration on P_n; cached per order.
inline const Quad1D& gauss_legendre(int n) {
  static std::map<int, Quad1D> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  Quad1D rule;
  rule.nodes.resize(static_cast<size_t>(n));
  rule.weights.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    rule.nodes[static_cast<size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<size_t>(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  auto [pos, inserted] = cache.emplace(n, std::move(rule));
  (void)inserted;
  return pos->second;
}

template <typename F>
inline double gl_integrate(F&& f, double a, double b, int order) {
  const Quad1D& q = gauss_legendre(order);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (size_t i = 0; i < q.nodes.size(); ++i)
    s += q.weights[i] * f(mid + half * q.nodes[i]);
  return s * half;
}

// Partition of (0, hi] (or [lo, hi]) into shells graded geometrically toward
// the lower end; extra breakpoints are honored exactly. `ratio` is the
// geometric shrink factor per shell walking down from hi.
inline std::vector<std::pair<double, double>> graded_intervals(
    double lo, double hi, int min_shells = 40, double ratio = 0.5,
    const std::vector<double>& breakpoints = {}) {
  require(hi > lo && lo >= 0.0, ErrorKind::usage, "graded_intervals: bad range");
  std::vector<double> cuts{lo, hi};
  for (double b : breakpoints)
    if (b > lo && b < hi) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<std::pair<double, double>> out;
  for (size_t c = 0; c + 1 < cuts.size(); ++c) {
    double a = cuts[c], b = cuts[c + 1];
    if (c == 0 && a == 0.0) {
      // Singular end: geometric shells down toward zero, truncated once the
      // remaining stub is negligible for any integrand of the admissible
      // singularity class (handled by min_shells at the call site).
      std::vector<double> bounds;
      double t = b;
      for (int k = 0; k < min_shells; ++k) {
        bounds.push_back(t);
        t *= ratio;
        if (t < b * 1e-300) break;
      }
      bounds.push_back(t);
      for (size_t k = 0; k + 1 < bounds.size(); ++k)
        out.emplace_back(bounds[k + 1], bounds[k]);
    } else if (b / std::max(a, 1e-300) > 4.0) {
      // Wide regular interval: split geometrically so each shell has bounded
      // logarithmic width.
      std::vector<double> bounds{b};
      double t = b;
      while (t * ratio > a * 1.0001) {
        t *= ratio;
        bounds.push_back(t);
      }
      bounds.push_back(a);
      for (size_t k = 0; k + 1 < bounds.size(); ++k)
        out.emplace_back(bounds[k + 1], bounds[k]);
    } else {
      out.emplace_back(a, b);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Shell count so that the dropped stub below hi*ratio^S is irrelevant for
// integrands behaving like rho^(1-2s) near zero.
inline int shells_for_exponent(double s) {
  double one_minus = std::max(0.05, 1.0 - s);
  int n = static_cast<int>(std::ceil(40.0 / one_minus));
  return std::clamp(n, 40, 2000);
}

namespace detail {

// (1 - cos t) t^(-1-2s) without cancellation: below t = 1e-4 the series form
// 0.5 t^(1-2s) (1 - t^2/12) is exact to ~1e-18 relative and never forms the
// overflow-prone t^(-1-2s) factor.
inline double cos_moment_integrand(double s, double t) {
  if (t < 1e-4) return 0.5 * std::pow(t, 1.0 - 2.0 * s) * (1.0 - t * t / 12.0);
  double si = std::sin(0.5 * t);
  return 2.0 * si * si * std::pow(t, -1.0 - 2.0 * s);
}

// tail_cos(s, X) = int_X^inf cos(t) t^(-1-2s) dt by integration by parts,
// truncated at the smallest term of the asymptotic series. Needs X >= ~20.
inline double tail_cos_ibp(double s, double X) {
  double p = 1.0 + 2.0 * s;
  double sum = 0.0;
  double coeff = 1.0;  // product p(p+1)...(p+2k-1), sign (-1)^k
  double sign = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 12; ++k) {
    double pk = p + 2.0 * k;
    double t1 = -std::sin(X) * std::pow(X, -pk);
    double t2 = pk * std::cos(X) * std::pow(X, -pk - 1.0);
    double term = sign * coeff * (t1 + t2);
    double mag = coeff * (std::pow(X, -pk) + pk * std::pow(X, -pk - 1.0));
    if (mag > prev) break;  // asymptotic series started to diverge
    sum += term;
    prev = mag;
    coeff *= pk * (pk + 1.0);
    sign = -sign;
    if (mag < 1e-17) break;
  }
  return sum;
}

// Series for C(s, X) with X <= 0.5 from the Taylor expansion of 1 - cos.
inline double partial_moment_series(double s, double X) {
  double sum = 0.0;
  double fact = 2.0;  // (2k)! for k = 1
  double sign = 1.0;
  for (int k = 1; k <= 8; ++k) {
    double e = 2.0 * k - 2.0 * s;
    sum += sign * std::pow(X, e) / (fact * e);
    sign = -sign;
    fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
  }
  return sum;
}

}  // namespace detail

// Primary route: graded quadrature on [0, X0] plus analytic tail.
inline double cos_moment(double s) {
  require(s > 0.0 && s < 1.0, ErrorKind::usage, "cos_moment: s outside (0,1)");
  const double X0 = 40.0;
  auto f = [s](double t) { return detail::cos_moment_integrand(s, t); };
  double head = 0.0;
  for (auto [a, b] : graded_intervals(0.0, X0, shells_for_exponent(s), 0.5, {1.0})) {
    int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / 1.5)));
    double w = (b - a) / pieces;
    for (int p = 0; p < pieces; ++p)
      head += gl_integrate(f, a + p * w, a + (p + 1) * w, 16);
  }
  double tail = std::pow(X0, -2.0 * s) / (2.0 * s) - detail::tail_cos_ibp(s, X0);
  return head + tail;
}

// Independent route: series head, adaptive Simpson body, alternating
// half-period tail summed with repeated averaging.
inline double cos_moment_alt(double s) {
  require(s > 0.0 && s < 1.0, ErrorKind::usage, "cos_moment_alt: s outside (0,1)");
  const double a0 = 0.5;
  double head = detail::partial_moment_series(s, a0);

  auto f = [s](double t) { return detail::cos_moment_integrand(s, t); };
  std::function<double(double, double, double, double, double, int)> simpson =
      [&](double a, double b, double fa, double fb, double fm, int depth) -> double {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth > 24 || std::abs(left + right - whole) < 1e-13 * (1.0 + std::abs(whole)))
      return left + right + (left + right - whole) / 15.0;
    return simpson(a, m, fa, fm, flm, depth + 1) +
           simpson(m, b, fm, fb, frm, depth + 1);
  };
  int half_periods = 12;
  double A = std::ceil(30.0 / M_PI) * M_PI;
  double body = simpson(a0, A, f(a0), f(A), f(0.5 * (a0 + A)), 0);

  // Tail: int_A^inf (1-cos t) t^(-1-2s) dt; the "1" part is exact, the cosine
  // part alternates over half periods and is accelerated by averaging.
  double one_part = std::pow(A, -2.0 * s) / (2.0 * s);
  std::vector<double> partial;
  double acc = 0.0;
  for (int k = 0; k < half_periods; ++k) {
    double lo = A + k * M_PI, hi = A + (k + 1) * M_PI;
    double seg = gl_integrate([s](double t) { return std::cos(t) * std::pow(t, -1.0 - 2.0 * s); },
                              lo, hi, 24);
    acc += seg;
    partial.push_back(acc);
  }
  for (int level = 0; level < 6; ++level)
    for (size_t i = 0; i + 1 < partial.size(); ++i)
      partial[i] = 0.5 * (partial[i] + partial[i + 1]);
  double cos_part = partial.front();
  return head + body + one_part - cos_part;
}

// C(s, X): series, table-free quadrature, or full-minus-tail depending on X.
inline double cos_moment_partial(double s, double X) {
  require(X >= 0.0, ErrorKind::usage, "cos_moment_partial: negative X");
  if (X == 0.0) return 0.0;
  if (X <= 0.5) return detail::partial_moment_series(s, X);
  if (X >= 40.0) {
    double tail = std::pow(X, -2.0 * s) / (2.0 * s) - detail::tail_cos_ibp(s, X);
    return cos_moment(s) - tail;
  }
  auto f = [s](double t) { return detail::cos_moment_integrand(s, t); };
  double val = detail::partial_moment_series(s, 0.5);
  double a = 0.5;
  while (a < X) {
    double b = std::min(X, a + 1.0);
    val += gl_integrate(f, a, b, 16);
    a = b;
  }
  return val;
}

// Dense log-spaced table of X -> C(s, X) for the per-mode symbol solves;
// piecewise cubic Hermite in log X. Cached per s.
class CosMomentTable {
 public:
  explicit CosMomentTable(double s) : s_(s), c_inf_(cos_moment(s)) {
    const int n = 4096;
    lo_ = std::log(1e-6);
    hi_ = std::log(40.0);
    step_ = (hi_ - lo_) / (n - 1);
    x_.resize(n);
    y_.resize(n);
    auto f = [s](double t) { return detail::cos_moment_integrand(s, t); };
    double acc = detail::partial_moment_series(s, std::exp(lo_));
    double prev = std::exp(lo_);
    for (int i = 0; i < n; ++i) {
      double x = std::exp(lo_ + i * step_);
      if (i > 0) acc += gl_integrate(f, prev, x, 8);
      x_[static_cast<size_t>(i)] = x;
      y_[static_cast<size_t>(i)] = acc;
      prev = x;
    }
  }

  [[nodiscard]] double operator()(double X) const {
    if (X <= 0.0) return 0.0;
    if (X <= x_.front()) return detail::partial_moment_series(s_, X);
    if (X >= x_.back())
      return c_inf_ - std::pow(X, -2.0 * s_) / (2.0 * s_) + detail::tail_cos_ibp(s_, X);
    double u = (std::log(X) - lo_) / step_;
    auto i = static_cast<size_t>(u);
    if (i + 1 >= x_.size()) i = x_.size() - 2;
    double t = u - static_cast<double>(i);
    // Hermite with derivative dC/dlogX = X * f(X) evaluated analytically.
    auto deriv = [this](size_t j) {
      double x = x_[j];
      return x * detail::cos_moment_integrand(s_, x);
    };
    double y0 = y_[i], y1 = y_[i + 1];
    double m0 = deriv(i) * step_, m1 = deriv(i + 1) * step_;
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
           (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
  }

  [[nodiscard]] double full() const { return c_inf_; }

 private:
  double s_;
  double c_inf_;
  double lo_, hi_, step_;
  std::vector<double> x_, y_;
};

inline const CosMomentTable& cos_moment_table(double s) {
  static std::map<int64_t, CosMomentTable> cache;
  static std::mutex mu;
  int64_t key = 0;
  static_assert(sizeof(key) == sizeof(s));
  std::memcpy(&key, &s, sizeof(key));
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, CosMomentTable(s)).first;
  return it->second;
}

}  // namespace nlelast
