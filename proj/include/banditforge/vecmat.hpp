#pragma once

#include <cstddef>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace banditforge {

using Vec = std::vector<double>;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown where a direction of zero length makes a gradient / argmax undefined.
class DegenerateDirection : public Error {
 public:
  DegenerateDirection() : Error("degenerate direction: zero vector") {}
};

inline bool all_finite(const Vec& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

inline void require_finite(const Vec& v, const char* name) {
  if (!all_finite(v)) throw Error(std::string(name) + ": non-finite entry");
}

// Dense square matrix, row-major.
struct Matrix {
  std::size_t n = 0;
  std::vector<double> a;

  Matrix() = default;
  explicit Matrix(std::size_t dim) : n(dim), a(dim * dim, 0.0) {}

  static Matrix identity(std::size_t dim) {
    Matrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m.a[i * dim + i] = 1.0;
    return m;
  }
  static Matrix scaled_identity(std::size_t dim, double c) {
    Matrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m.a[i * dim + i] = c;
    return m;
  }

  double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
  const double* row(std::size_t i) const { return a.data() + i * n; }
  double* row(std::size_t i) { return a.data() + i * n; }

  Vec matvec(const Vec& v) const {
    Vec out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      const double* r = row(i);
      for (std::size_t j = 0; j < n; ++j) acc += r[j] * v[j];
      out[i] = acc;
    }
    return out;
  }

  // transpose(this) * v
  Vec tmatvec(const Vec& v) const {
    Vec out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* r = row(i);
      for (std::size_t j = 0; j < n; ++j) out[j] += r[j] * v[i];
    }
    return out;
  }
};

inline double norm2sq(const Vec& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

inline double norm2(const Vec& v) { return std::sqrt(norm2sq(v)); }

inline double dot(const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline Vec sub(const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

// a + c*b
inline Vec add_scaled(const Vec& a, double c, const Vec& b) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + c * b[i];
  return out;
}

}  // namespace banditforge
