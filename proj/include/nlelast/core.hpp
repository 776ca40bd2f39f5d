#pragma once

// Small value types shared by every module: fixed-capacity vectors and
// matrices for spatial dimension d <= 3, the error taxonomy, and the tiny
// dense routines (pivoted solves, Jacobi eigenvalues) the solvers rely on.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace nlelast {

inline constexpr int kMaxDim = 3;

enum class ErrorKind {
  usage,           // bad arguments, malformed config, contract misuse
  hypothesis,      // a stated structural condition fails on the given data
  nonconvergence,  // an iteration exhausted its budget or stagnated
  internal,        // resource guards, unexpected states
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
  if (!cond) throw Error(kind, msg);
}

inline const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage: return "usage";
    case ErrorKind::hypothesis: return "hypothesis";
    case ErrorKind::nonconvergence: return "nonconvergence";
    case ErrorKind::internal: return "internal";
  }
  return "internal";
}

// Spatial vector with runtime dimension d in {1,2,3}.
struct Vec {
  std::array<double, kMaxDim> v{0.0, 0.0, 0.0};
  int d = 0;

  Vec() = default;
  explicit Vec(int dim) : d(dim) {}
  Vec(int dim, double x0, double x1 = 0.0, double x2 = 0.0) : d(dim) {
    v = {x0, x1, x2};
  }

  double& operator[](int i) { return v[static_cast<size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<size_t>(i)]; }
};

inline Vec operator+(const Vec& a, const Vec& b) {
  Vec r(a.d);
  for (int i = 0; i < a.d; ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec operator-(const Vec& a, const Vec& b) {
  Vec r(a.d);
  for (int i = 0; i < a.d; ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec operator*(double s, const Vec& a) {
  Vec r(a.d);
  for (int i = 0; i < a.d; ++i) r[i] = s * a[i];
  return r;
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < a.d; ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline Vec normalized(const Vec& a) {
  double n = norm(a);
  require(n > 0.0, ErrorKind::usage, "normalized: zero vector");
  return (1.0 / n) * a;
}

// Dense d x d matrix, row major.
struct Mat {
  std::array<double, kMaxDim * kMaxDim> m{};
  int d = 0;

  Mat() = default;
  explicit Mat(int dim) : d(dim) { m.fill(0.0); }

  double& operator()(int i, int j) { return m[static_cast<size_t>(i * kMaxDim + j)]; }
  double operator()(int i, int j) const { return m[static_cast<size_t>(i * kMaxDim + j)]; }

  static Mat identity(int dim) {
    Mat r(dim);
    for (int i = 0; i < dim; ++i) r(i, i) = 1.0;
    return r;
  }
};

inline Mat operator+(const Mat& a, const Mat& b) {
  Mat r(a.d);
  for (int i = 0; i < a.d; ++i)
    for (int j = 0; j < a.d; ++j) r(i, j) = a(i, j) + b(i, j);
  return r;
}

inline Mat operator-(const Mat& a, const Mat& b) {
  Mat r(a.d);
  for (int i = 0; i < a.d; ++i)
    for (int j = 0; j < a.d; ++j) r(i, j) = a(i, j) - b(i, j);
  return r;
}

inline Mat operator*(double s, const Mat& a) {
  Mat r(a.d);
  for (int i = 0; i < a.d; ++i)
    for (int j = 0; j < a.d; ++j) r(i, j) = s * a(i, j);
  return r;
}

inline Vec operator*(const Mat& a, const Vec& x) {
  Vec r(a.d);
  for (int i = 0; i < a.d; ++i) {
    double s = 0.0;
    for (int j = 0; j < a.d; ++j) s += a(i, j) * x[j];
    r[i] = s;
  }
  return r;
}

inline Mat operator*(const Mat& a, const Mat& b) {
  Mat r(a.d);
  for (int i = 0; i < a.d; ++i)
    for (int j = 0; j < a.d; ++j) {
      double s = 0.0;
      for (int k = 0; k < a.d; ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

inline Mat outer(const Vec& a, const Vec& b) {
  Mat r(a.d);
  for (int i = 0; i < a.d; ++i)
    for (int j = 0; j < a.d; ++j) r(i, j) = a[i] * b[j];
  return r;
}

inline Mat transpose(const Mat& a) {
  Mat r(a.d);
  for (int i = 0; i < a.d; ++i)
    for (int j = 0; j < a.d; ++j) r(i, j) = a(j, i);
  return r;
}

inline double frobenius_norm(const Mat& a) {
  double s = 0.0;
  for (int i = 0; i < a.d; ++i)
    for (int j = 0; j < a.d; ++j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

inline double max_abs_entry(const Mat& a) {
  double s = 0.0;
  for (int i = 0; i < a.d; ++i)
    for (int j = 0; j < a.d; ++j) s = std::max(s, std::abs(a(i, j)));
  return s;
}

// Eigenvalues of a symmetric d x d matrix by cyclic Jacobi; ascending order.
inline std::array<double, kMaxDim> sym_eigenvalues(Mat a) {
  std::array<double, kMaxDim> lam{0.0, 0.0, 0.0};
  if (a.d == 1) {
    lam[0] = a(0, 0);
    return lam;
  }
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < a.d; ++p)
      for (int q = p + 1; q < a.d; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * (1.0 + frobenius_norm(a))) break;
    for (int p = 0; p < a.d; ++p)
      for (int q = p + 1; q < a.d; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        double theta = 0.5 * std::atan2(2.0 * a(p, q), a(q, q) - a(p, p));
        double c = std::cos(theta), s = std::sin(theta);
        for (int k = 0; k < a.d; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < a.d; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  for (int i = 0; i < a.d; ++i) lam[static_cast<size_t>(i)] = a(i, i);
  std::array<double, kMaxDim> out = lam;
  for (int i = 0; i < a.d; ++i)
    for (int j = i + 1; j < a.d; ++j)
      if (out[static_cast<size_t>(j)] < out[static_cast<size_t>(i)])
        std::swap(out[static_cast<size_t>(i)], out[static_cast<size_t>(j)]);
  return out;
}

inline double min_eigenvalue(const Mat& a) { return sym_eigenvalues(a)[0]; }

inline double max_eigenvalue(const Mat& a) {
  return sym_eigenvalues(a)[static_cast<size_t>(a.d - 1)];
}

// Solves a*x = b in place by Gaussian elimination with partial pivoting.
// T is double or std::complex<double> for the right-hand side and solution;
// the matrix stays real.
template <typename T>
inline std::array<T, kMaxDim> solve_small(Mat a, std::array<T, kMaxDim> b) {
  int n = a.d;
  for (int c = 0; c < n; ++c) {
    int best = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(best, c))) best = r;
    if (best != c) {
      for (int j = 0; j < n; ++j) std::swap(a(c, j), a(best, j));
      std::swap(b[static_cast<size_t>(c)], b[static_cast<size_t>(best)]);
    }
    require(std::abs(a(c, c)) > 0.0, ErrorKind::hypothesis,
            "solve_small: singular matrix");
    for (int r = c + 1; r < n; ++r) {
      double f = a(r, c) / a(c, c);
      for (int j = c; j < n; ++j) a(r, j) -= f * a(c, j);
      b[static_cast<size_t>(r)] -= f * b[static_cast<size_t>(c)];
    }
  }
  std::array<T, kMaxDim> x{};
  for (int r = n - 1; r >= 0; --r) {
    T s = b[static_cast<size_t>(r)];
    for (int j = r + 1; j < n; ++j) s -= a(r, j) * x[static_cast<size_t>(j)];
    x[static_cast<size_t>(r)] = s / a(r, r);
  }
  return x;
}

}  // namespace nlelast
