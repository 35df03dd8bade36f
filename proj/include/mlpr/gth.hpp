#pragma once

// GTH elimination on triplet-represented M-matrices.
//
// An M-matrix M is stored as its nonnegative offdiagonal magnitudes N
// (N_ij = -M_ij, i != j) and a nonnegative sum vector sigma with either
// M 1 = sigma (Row) or 1^T M = sigma^T (Col). The diagonal is never formed by
// subtraction; each pivot is recomputed as sigma_k plus the remaining
// offdiagonal mass, so elimination only adds, multiplies and divides
// nonnegative numbers.
//
// The elimination is templated on the scalar so the same code runs in binary64
// (with SIMD row updates) and in double-double for reference computations.

#include <atomic>
#include <cstddef>
#include <string>
#include <type_traits>
#include <vector>

#include "mlpr/errors.hpp"
#include "mlpr/kernels.hpp"
#include "mlpr/matrix.hpp"
#include "mlpr/xscalar.hpp"

namespace mlpr {

enum class Orientation { Row, Col };

struct TripletMMatrix {
  DenseMatrix offdiag;  // nonnegative, zero diagonal
  Vec sums;             // nonnegative
  Orientation orientation = Orientation::Row;

  std::size_t dim() const noexcept { return sums.size(); }

  // Throws DimensionError / DomainError on malformed data.
  void validate() const;

  // The matrix itself; diagonal = sums_i + offdiagonal mass of row/column i.
  DenseMatrix dense() const;

  // Triplet of M^T (offdiag transposed, orientation flipped).
  TripletMMatrix transposed() const;
};

// LU = M with L unit lower triangular, U upper triangular.
// lower(i,k) = -L(i,k) >= 0 for i > k; upper(k,j) = -U(k,j) >= 0 for j > k.
template <class T>
struct GTHFactorsT {
  Orientation orientation = Orientation::Row;
  Matrix<T> lower;
  Matrix<T> upper;
  std::vector<T> pivots;

  std::size_t dim() const noexcept { return pivots.size(); }

  Matrix<T> L() const {
    const std::size_t n = dim();
    Matrix<T> l = Matrix<T>::identity(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < i; ++k) l(i, k) = -lower(i, k);
    return l;
  }
  Matrix<T> U() const {
    const std::size_t n = dim();
    Matrix<T> u(n, n);
    for (std::size_t k = 0; k < n; ++k) {
      u(k, k) = pivots[k];
      for (std::size_t j = k + 1; j < n; ++j) u(k, j) = -upper(k, j);
    }
    return u;
  }
};

using GTHFactors = GTHFactorsT<double>;

// Nonnegativity assertions inside the elimination. Enabled by the environment
// variable GTH_ASSERT_NONNEG=1 unless overridden programmatically.
bool gth_assert_enabled();
void set_gth_assert_override(int mode);  // -1: follow environment, 0: off, 1: on
std::size_t gth_assert_check_count();    // number of checked eliminations so far

namespace gth_detail {

void count_checked_elimination();

template <class T>
bool is_negative(const T& v) {
  if constexpr (std::is_same_v<T, double>) {
    return v < 0.0 || v != v;
  } else {
    return v < T(0.0) || v.hi != v.hi;
  }
}

template <class T>
bool is_zero(const T& v) {
  if constexpr (std::is_same_v<T, double>) {
    return v == 0.0;
  } else {
    return v.hi == 0.0 && v.lo == 0.0;
  }
}

// Indices that cannot reach a positive sum in the dependency graph (edges
// i -> j where N_ij > 0 for Row; transposed for Col).
template <class T>
std::vector<std::size_t> unreachable_from_sums(const Matrix<T>& n_mat, const std::vector<T>& sigma,
                                                Orientation o) {
  const std::size_t n = sigma.size();
  std::vector<char> good(n, 0);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < n; ++i)
    if (!is_zero(sigma[i])) {
      good[i] = 1;
      stack.push_back(i);
    }
  // Reverse search: j is good if it has an edge to a good node.
  while (!stack.empty()) {
    const std::size_t g = stack.back();
    stack.pop_back();
    for (std::size_t j = 0; j < n; ++j) {
      if (good[j] || j == g) continue;
      const T& w = o == Orientation::Row ? n_mat(j, g) : n_mat(g, j);
      if (!is_zero(w)) {
        good[j] = 1;
        stack.push_back(j);
      }
    }
  }
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < n; ++i)
    if (!good[i]) bad.push_back(i);
  return bad;
}

template <class T>
void check_nonneg(const T& v, bool enabled, const char* what, std::size_t k) {
  if (enabled && is_negative(v))
    throw NonnegativityViolation(std::string("GTH elimination step ") + std::to_string(k + 1) +
                                 ": negative " + what);
}

// Eliminates the first `steps` indices of (N, sigma). N is consumed as the
// working array; its diagonal slots receive unused values.
template <class T>
GTHFactorsT<T> eliminate(Matrix<T> w, std::vector<T> sig, Orientation o, std::size_t steps) {
  const std::size_t n = sig.size();
  const bool check = gth_assert_enabled();
  GTHFactorsT<T> f;
  f.orientation = o;
  f.lower = Matrix<T>(n, n);
  f.upper = Matrix<T>(n, n);
  f.pivots.assign(n, T(0.0));
  if (check) {
    for (std::size_t i = 0; i < n; ++i) {
      check_nonneg(sig[i], true, "input sum", 0);
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) check_nonneg(w(i, j), true, "input offdiagonal", 0);
    }
  }
  for (std::size_t k = 0; k < steps; ++k) {
    T d = sig[k];
    if (o == Orientation::Row) {
      for (std::size_t j = k + 1; j < n; ++j) d += w(k, j);
    } else {
      for (std::size_t i = k + 1; i < n; ++i) d += w(i, k);
    }
    check_nonneg(d, check, "pivot", k);
    if (!(d > T(0.0)))
      throw SingularError("GTH pivot " + std::to_string(k + 1) + " is zero");
    f.pivots[k] = d;
    for (std::size_t j = k + 1; j < n; ++j) f.upper(k, j) = w(k, j);

    const T sk_over_d = sig[k] / d;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (is_zero(w(i, k))) continue;
      const T l = w(i, k) / d;
      f.lower(i, k) = l;
      check_nonneg(l, check, "multiplier", k);
      const std::size_t len = n - k - 1;
      if (len > 0) {
        if constexpr (std::is_same_v<T, double>) {
          kernels::active().axpy(&w(i, k + 1), &w(k, k + 1), l, len);
        } else {
          for (std::size_t j = k + 1; j < n; ++j) {
            if (j == i || is_zero(w(k, j))) continue;
            w(i, j) += l * w(k, j);
          }
        }
      }
      if (o == Orientation::Row) {
        sig[i] += l * sig[k];
        check_nonneg(sig[i], check, "row sum", k);
      }
    }
    if (o == Orientation::Col) {
      for (std::size_t j = k + 1; j < n; ++j) {
        if (is_zero(w(k, j))) continue;
        sig[j] += w(k, j) * sk_over_d;
        check_nonneg(sig[j], check, "column sum", k);
      }
    }
    if (check) {
      for (std::size_t i = k + 1; i < n; ++i)
        for (std::size_t j = k + 1; j < n; ++j)
          if (i != j) check_nonneg(w(i, j), true, "offdiagonal update", k);
    }
  }
  if (check) count_checked_elimination();
  // Remaining sums are returned through the last pivot slot when steps < n.
  if (steps < n) f.pivots[steps] = sig[steps];
  return f;
}

}  // namespace gth_detail

// Factorizes the triplet (N, sigma, o). Requires every index to reach a
// positive sum through the offdiagonal graph (otherwise M is singular);
// throws ReducibleError listing the offending indices, SingularError on a
// zero pivot.
template <class T>
GTHFactorsT<T> gth_factor_t(const Matrix<T>& n_mat, const std::vector<T>& sigma, Orientation o) {
  const std::size_t n = sigma.size();
  if (n == 0 || n_mat.rows() != n || n_mat.cols() != n)
    throw DimensionError("gth_factor: dimension mismatch");
  const auto bad = gth_detail::unreachable_from_sums(n_mat, sigma, o);
  if (!bad.empty())
    throw ReducibleError("gth_factor: indices cannot reach a positive sum (matrix singular)", bad);
  return gth_detail::eliminate(n_mat, sigma, o, n);
}

// Forward and back substitution; only additions of nonnegative terms when
// b >= 0.
template <class T>
std::vector<T> gth_solve_t(const GTHFactorsT<T>& f, const std::vector<T>& b) {
  const std::size_t n = f.dim();
  if (b.size() != n) throw DimensionError("gth_solve: dimension mismatch");
  std::vector<T> y(b);
  for (std::size_t i = 0; i < n; ++i) {
    T s = y[i];
    for (std::size_t k = 0; k < i; ++k)
      if (!gth_detail::is_zero(f.lower(i, k))) s += f.lower(i, k) * y[k];
    y[i] = s;
  }
  for (std::size_t kk = n; kk-- > 0;) {
    if (!(f.pivots[kk] > T(0.0))) throw SingularError("gth_solve: zero pivot");
    T s = y[kk];
    for (std::size_t j = kk + 1; j < n; ++j)
      if (!gth_detail::is_zero(f.upper(kk, j))) s += f.upper(kk, j) * y[j];
    y[kk] = s / f.pivots[kk];
  }
  return y;
}

GTHFactors gth_factor(const TripletMMatrix& t);
GTHFactorsT<XScalar> gth_factor_x(const TripletMMatrix& t);
Vec gth_solve(const GTHFactors& f, std::span<const double> b);

}  // namespace mlpr
