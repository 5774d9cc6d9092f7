// Dense symmetric linear algebra at desk dimensions (d <= 64): cyclic Jacobi
// eigendecomposition and the SPD functions built on it. Deterministic, no
// external dependencies.
#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "proxsamp/errors.hpp"

namespace proxsamp {

class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

  static SymMatrix identity(std::size_t n) {
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static SymMatrix diagonal(std::span<const double> d) {
    SymMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }
  static SymMatrix scalar(double v) {
    SymMatrix m(1);
    m(0, 0) = v;
    return m;
  }

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return a_[i * n_ + j];
  }
  std::span<const double> data() const { return a_; }

  double max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
  }

  double asymmetry() const {
    double m = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
    return m;
  }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }

  SymMatrix& add_scaled_identity(double v) {
    for (std::size_t i = 0; i < n_; ++i) (*this)(i, i) += v;
    return *this;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

inline SymMatrix mat_mul(const SymMatrix& a, const SymMatrix& b) {
  const std::size_t n = a.size();
  SymMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline std::vector<double> mat_vec(const SymMatrix& a,
                                   std::span<const double> x) {
  const std::size_t n = a.size();
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

struct SymEigen {
  std::vector<double> values;  // ascending
  SymMatrix vectors;           // column k is the k-th eigenvector
};

// Cyclic Jacobi rotations. Quadratic convergence; plenty accurate for the
// d <= 64 states handled here.
inline SymEigen sym_eigen(const SymMatrix& input) {
  const std::size_t n = input.size();
  SymMatrix a = input;
  SymMatrix v = SymMatrix::identity(n);

  const double scale = std::max(a.max_abs(), 1.0);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-15 * scale * static_cast<double>(n)) break;
    if (sweep == 99)
      throw NumericError("sym_eigen: Jacobi sweeps did not converge");

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  SymEigen e;
  e.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) e.values[i] = a(i, i);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return e.values[i] < e.values[j];
  });
  SymEigen sorted;
  sorted.values.resize(n);
  sorted.vectors = SymMatrix(n);
  for (std::size_t k = 0; k < n; ++k) {
    sorted.values[k] = e.values[order[k]];
    for (std::size_t i = 0; i < n; ++i) sorted.vectors(i, k) = v(i, order[k]);
  }
  return sorted;
}

// V f(lambda) V^T for a scalar function applied to the spectrum.
template <typename Fn>
SymMatrix apply_spectral(const SymEigen& e, Fn&& f) {
  const std::size_t n = e.values.size();
  SymMatrix out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double fk = f(e.values[k]);
    for (std::size_t i = 0; i < n; ++i) {
      const double vik = e.vectors(i, k);
      if (vik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j)
        out(i, j) += fk * vik * e.vectors(j, k);
    }
  }
  return out;
}

inline double min_eigenvalue(const SymMatrix& m) {
  return sym_eigen(m).values.front();
}

inline SymMatrix inverse_spd(const SymMatrix& m) {
  const SymEigen e = sym_eigen(m);
  if (e.values.front() <= 0.0)
    throw ValidationError("inverse_spd: matrix is not positive definite");
  return apply_spectral(e, [](double x) { return 1.0 / x; });
}

// Eigenvalue floor 1e-14 keeps the square root defined under roundoff.
inline SymMatrix sqrt_spd(const SymMatrix& m) {
  const SymEigen e = sym_eigen(m);
  return apply_spectral(
      e, [](double x) { return std::sqrt(std::max(x, 1e-14)); });
}

inline double log_det_spd(const SymMatrix& m) {
  const SymEigen e = sym_eigen(m);
  double s = 0.0;
  for (double x : e.values) {
    if (x <= 0.0)
      throw ValidationError("log_det_spd: matrix is not positive definite");
    s += std::log(x);
  }
  return s;
}

}  // namespace proxsamp
