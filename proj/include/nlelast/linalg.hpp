#pragma once

// Krylov solvers on plain vectors: conjugate gradient for the symmetric
// positive-definite systems, transpose-free QMR for the nonsymmetric ones,
// and inverse power iteration for the smallest generalized eigenvalue.
// Stagnation (< 1% residual progress across 50 iterations) and indefinite
// directions are surfaced as typed errors.

#include <cmath>
#include <deque>
#include <functional>
#include <sstream>
#include <vector>

#include "nlelast/core.hpp"

namespace nlelast {

using MatVecFn = std::function<void(const std::vector<double>&, std::vector<double>&)>;
// Called every `sample_every` iterations with the current iterate.
using IterObserver = std::function<void(int iter, const std::vector<double>& x)>;

struct IterationResult {
  std::vector<double> x;
  double residual_norm = 0.0;  // absolute L2 residual of the final iterate
  int iterations = 0;
};

namespace detail {

inline double vec_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double vec_norm(const std::vector<double>& a) { return std::sqrt(vec_dot(a, a)); }

inline void vec_axpy(std::vector<double>& y, double c, const std::vector<double>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += c * x[i];
}

class StagnationGuard {
 public:
  // Fires when 50 iterations pass with less than 1% residual reduction.
  void check(double res, int iter) {
    history_.push_back(res);
    if (history_.size() > 51) history_.pop_front();
    if (history_.size() == 51 && res > 0.99 * history_.front()) {
      std::ostringstream msg;
      msg << "iteration stagnated: residual " << res << " after " << iter
          << " iterations (< 1% reduction over the last 50)";
      throw Error(ErrorKind::nonconvergence, msg.str());
    }
  }

 private:
  std::deque<double> history_;
};

[[noreturn]] inline void fail_not_converged(const char* who, double res, int iter) {
  std::ostringstream msg;
  msg << who << ": not converged, residual " << res << " after " << iter
      << " iterations";
  throw Error(ErrorKind::nonconvergence, msg.str());
}

}  // namespace detail

// CG on a symmetric system. tol is relative to ||b||; indefinite directions
// (p^T A p <= 0) raise a coercivity-violation error.
inline IterationResult conjugate_gradient(const MatVecFn& apply,
                                          const std::vector<double>& b, double tol,
                                          int max_iter, const IterObserver& obs = {},
                                          int sample_every = 10) {
  const std::size_t n = b.size();
  IterationResult out;
  out.x.assign(n, 0.0);
  double bnorm = detail::vec_norm(b);
  if (bnorm == 0.0) return out;  // x = 0 exactly

  std::vector<double> r = b, p = b, ap(n);
  double rr = detail::vec_dot(r, r);
  detail::StagnationGuard guard;
  for (int it = 1; it <= max_iter; ++it) {
    apply(p, ap);
    double pap = detail::vec_dot(p, ap);
    if (!(pap > 0.0)) {
      std::ostringstream msg;
      msg << "coercivity violation: p^T A p = " << pap << " at iteration " << it;
      throw Error(ErrorKind::hypothesis, msg.str());
    }
    double alpha = rr / pap;
    detail::vec_axpy(out.x, alpha, p);
    detail::vec_axpy(r, -alpha, ap);
    double rr_new = detail::vec_dot(r, r);
    out.iterations = it;
    out.residual_norm = std::sqrt(rr_new);
    if (obs && it % sample_every == 0) obs(it, out.x);
    if (out.residual_norm <= tol * bnorm) return out;
    guard.check(out.residual_norm, it);
    double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  detail::fail_not_converged("conjugate_gradient", out.residual_norm, out.iterations);
}

// Transpose-free QMR (Freund). Only products with A are used. The QMR bound
// drives the loop; the returned residual is recomputed exactly.
inline IterationResult tfqmr(const MatVecFn& apply, const std::vector<double>& b,
                             double tol, int max_iter, const IterObserver& obs = {},
                             int sample_every = 10) {
  const std::size_t n = b.size();
  IterationResult out;
  out.x.assign(n, 0.0);
  double bnorm = detail::vec_norm(b);
  if (bnorm == 0.0) return out;

  std::vector<double> r = b;  // x0 = 0
  std::vector<double> rstar = r, w = r, y1 = r, y2(n), d(n, 0.0);
  std::vector<double> v(n), ay2(n);
  apply(y1, v);
  std::vector<double> ay1 = v;
  double tau = bnorm, theta = 0.0, eta = 0.0;
  double rho = detail::vec_dot(rstar, r);
  detail::StagnationGuard guard;

  auto true_residual = [&](const std::vector<double>& x) {
    std::vector<double> ax(n);
    apply(x, ax);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double ri = b[i] - ax[i];
      acc += ri * ri;
    }
    return std::sqrt(acc);
  };

  for (int it = 1; it <= max_iter; ++it) {
    double sigma = detail::vec_dot(rstar, v);
    if (sigma == 0.0 || rho == 0.0)
      detail::fail_not_converged("tfqmr (breakdown)", tau, it);
    double alpha = rho / sigma;
    for (std::size_t i = 0; i < n; ++i) y2[i] = y1[i] - alpha * v[i];
    apply(y2, ay2);

    bool done = false;
    for (int half = 0; half < 2; ++half) {
      const std::vector<double>& y = half == 0 ? y1 : y2;
      const std::vector<double>& ay = half == 0 ? ay1 : ay2;
      detail::vec_axpy(w, -alpha, ay);
      double theta_new = detail::vec_norm(w) / tau;
      double c = 1.0 / std::sqrt(1.0 + theta_new * theta_new);
      double tau_new = tau * theta_new * c;
      double eta_new = c * c * alpha;
      double dscale = theta * theta * eta / alpha;
      for (std::size_t i = 0; i < n; ++i) d[i] = y[i] + dscale * d[i];
      detail::vec_axpy(out.x, eta_new, d);
      theta = theta_new;
      eta = eta_new;
      tau = tau_new;
      double bound = tau * std::sqrt(2.0 * it + half + 1.0);
      if (bound <= tol * bnorm) {
        double res = true_residual(out.x);
        if (res <= tol * bnorm) {
          out.iterations = it;
          out.residual_norm = res;
          done = true;
          break;
        }
      }
    }
    out.iterations = it;
    if (done) return out;
    if (obs && it % sample_every == 0) obs(it, out.x);
    guard.check(tau, it);

    double rho_new = detail::vec_dot(rstar, w);
    double beta = rho_new / rho;
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i) y1[i] = w[i] + beta * y2[i];
    apply(y1, ay1);
    for (std::size_t i = 0; i < n; ++i) v[i] = ay1[i] + beta * (ay2[i] + beta * v[i]);
  }
  out.residual_norm = true_residual(out.x);
  if (out.residual_norm <= tol * bnorm) return out;
  detail::fail_not_converged("tfqmr", out.residual_norm, out.iterations);
}

struct EigenEstimate {
  double value = 0.0;
  std::vector<double> vector;
  int iterations = 0;
};

// Smallest eigenvalue of A v = lambda m v (m a positive diagonal scalar) by
// inverse power iteration; inner solves use CG. Runs at least min_iters and
// stops once the Rayleigh quotient settles to rel_tol.
inline EigenEstimate smallest_eigenvalue(const MatVecFn& apply, std::size_t n,
                                         double mass, int min_iters = 30,
                                         int max_iters = 200, double rel_tol = 1e-8) {
  require(n > 0 && mass > 0.0, ErrorKind::usage, "smallest_eigenvalue: bad inputs");
  EigenEstimate est;
  std::vector<double> x(n, 1.0), ax(n);
  double nx = detail::vec_norm(x);
  for (auto& v : x) v /= nx;

  double lambda_prev = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = mass * x[i];
    IterationResult y = conjugate_gradient(apply, rhs, 1e-12,
                                           static_cast<int>(40 * n + 100));
    nx = detail::vec_norm(y.x);
    require(nx > 0.0, ErrorKind::internal, "smallest_eigenvalue: zero iterate");
    for (std::size_t i = 0; i < n; ++i) x[i] = y.x[i] / nx;
    apply(x, ax);
    double lambda = detail::vec_dot(x, ax) / (mass * detail::vec_dot(x, x));
    est.value = lambda;
    est.iterations = it;
    if (it >= min_iters &&
        std::abs(lambda - lambda_prev) <= rel_tol * std::abs(lambda))
      break;
    lambda_prev = lambda;
  }
  est.vector = x;
  return est;
}

}  // namespace nlelast
