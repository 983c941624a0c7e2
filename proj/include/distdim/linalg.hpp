#pragma once

// Small dense linear algebra over doubles or exact rationals. Dimensions here
// are tiny (d <= 6), so plain Gaussian elimination is all that is needed.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "distdim/rational.hpp"

namespace distdim::linalg {

template <class T>
using Matrix = std::vector<std::vector<T>>;

namespace detail {

inline bool is_zero(const Rational& x, double) { return x == 0; }
inline bool is_zero(double x, double tol) { return std::abs(x) <= tol; }

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const Rational& x) { return x == 0 ? 0.0 : 1.0; }

}  // namespace detail

/// Row-reduces a copy of the rows and returns the rank. The tolerance only
/// applies to floating point input.
template <class T>
std::size_t rank(Matrix<T> rows, double tol = 1e-12) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows.front().size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
    std::size_t pivot = r;
    double best = 0.0;
    for (std::size_t i = r; i < rows.size(); ++i) {
      double m = detail::magnitude(rows[i][c]);
      if (m > best) {
        best = m;
        pivot = i;
      }
    }
    if (detail::is_zero(rows[pivot][c], tol)) continue;
    std::swap(rows[r], rows[pivot]);
    for (std::size_t i = r + 1; i < rows.size(); ++i) {
      if (detail::is_zero(rows[i][c], 0.0)) continue;
      T factor = rows[i][c] / rows[r][c];
      for (std::size_t j = c; j < cols; ++j) rows[i][j] -= factor * rows[r][j];
    }
    ++r;
  }
  return r;
}

/// Solves a x = b for square nonsingular a; nullopt when singular.
template <class T>
std::optional<std::vector<T>> solve(Matrix<T> a, std::vector<T> b, double tol = 1e-14) {
  const std::size_t n = a.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    double best = 0.0;
    for (std::size_t i = c; i < n; ++i) {
      double m = detail::magnitude(a[i][c]);
      if (m > best) {
        best = m;
        pivot = i;
      }
    }
    if (detail::is_zero(a[pivot][c], tol)) return std::nullopt;
    std::swap(a[c], a[pivot]);
    std::swap(b[c], b[pivot]);
    for (std::size_t i = c + 1; i < n; ++i) {
      T factor = a[i][c] / a[c][c];
      if (detail::is_zero(factor, 0.0)) continue;
      for (std::size_t j = c; j < n; ++j) a[i][j] -= factor * a[c][j];
      b[i] -= factor * b[c];
    }
  }
  std::vector<T> x(n);
  for (std::size_t i = n; i-- > 0;) {
    T acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= a[i][j] * x[j];
    x[i] = acc / a[i][i];
  }
  return x;
}

/// Determinant by elimination.
template <class T>
T determinant(Matrix<T> a) {
  const std::size_t n = a.size();
  T det = T(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    double best = 0.0;
    for (std::size_t i = c; i < n; ++i) {
      double m = detail::magnitude(a[i][c]);
      if (m > best) {
        best = m;
        pivot = i;
      }
    }
    if (detail::is_zero(a[pivot][c], 0.0)) return T(0);
    if (pivot != c) {
      std::swap(a[c], a[pivot]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      T factor = a[i][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[i][j] -= factor * a[c][j];
    }
  }
  return det;
}

template <class T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
  T acc = T(0);
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

template <class T>
Matrix<T> gram(const std::vector<std::vector<T>>& vectors) {
  const std::size_t k = vectors.size();
  Matrix<T> g(k, std::vector<T>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) g[i][j] = g[j][i] = dot(vectors[i], vectors[j]);
  return g;
}

/// k-dimensional volume of the parallelepiped spanned by the vectors,
/// sqrt(det Gram). Rounding can push the determinant slightly negative.
inline double parallelepiped_volume(const std::vector<std::vector<double>>& vectors) {
  if (vectors.empty()) return 1.0;
  double det = determinant(gram(vectors));
  return det > 0.0 ? std::sqrt(det) : 0.0;
}

/// Orthogonal projection of w onto span(basis) where basis is linearly
/// independent (not necessarily orthonormal): solves the normal equations.
template <class T>
std::vector<T> project_onto_span(const std::vector<std::vector<T>>& basis, const std::vector<T>& w) {
  std::vector<T> rhs(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) rhs[i] = dot(basis[i], w);
  auto coef = solve(gram(basis), rhs);
  if (!coef) throw std::invalid_argument("projection basis is linearly dependent");
  std::vector<T> out(w.size(), T(0));
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) out[j] += (*coef)[i] * basis[i][j];
  return out;
}

}  // namespace distdim::linalg
