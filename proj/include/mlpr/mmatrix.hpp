#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mlpr/gth.hpp"
#include "mlpr/matrix.hpp"

namespace mlpr {

// M^{-1} = 1 z^T + S for a Row triplet with sums w. S stays bounded as w -> 0
// and vS = v M^{-1} for every row vector v with v 1 = 0.
struct PartialInverse {
  Vec z;
  DenseMatrix S;
  DenseMatrix inverse;  // M^{-1}, rounded from the extended computation
};

// Indices not in the strongly connected component of index 0 (empty when the
// offdiagonal pattern is irreducible).
std::vector<std::size_t> not_strongly_connected(const DenseMatrix& offdiag);

// Left null vector (Row) or right null vector (Col) of the zero-sum matrix
// given by offdiag with sums == 0, normalized to t_n = 1. Requires an
// irreducible pattern.
Vec null_vector(const TripletMMatrix& t);

// Requires Row orientation, irreducible offdiag and a nonzero sum vector.
PartialInverse partial_inverse(const TripletMMatrix& t);

struct InverseBoundReport {
  double observed = 0.0;  // d(Mt^{-1}, M^{-1})
  double bound = 0.0;     // (2n-1) eps
  double epsilon = 0.0;
  bool pattern_ok = true;
  bool within = true;
};

// Compares GTH inverses of a triplet and its perturbation against the
// first-order componentwise bound (2n-1) eps.
InverseBoundReport inverse_cw_bound_check(const TripletMMatrix& m, const TripletMMatrix& mt, double eps);

// Full inverse through GTH solves on unit vectors.
DenseMatrix gth_inverse(const TripletMMatrix& t);

// Dense LU with partial pivoting for matrices without M-matrix structure.
template <class T>
struct PlainLU {
  Matrix<T> lu;
  std::vector<std::size_t> perm;
};

template <class T>
T plain_abs(const T& v) {
  if constexpr (std::is_same_v<T, double>) {
    return std::fabs(v);
  } else {
    return abs(v);
  }
}

template <class T>
PlainLU<T> plain_lu_factor_t(Matrix<T> a) {
  if (!a.square()) throw DimensionError("plain_lu: matrix must be square");
  const std::size_t n = a.rows();
  PlainLU<T> f;
  f.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    T best = plain_abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const T v = plain_abs(a(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (!(best > T(0.0)) || !std::isfinite(static_cast<double>(best)))
      throw SingularError("plain_lu: zero pivot in column " + std::to_string(k + 1));
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(f.perm[k], f.perm[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const T l = a(i, k) / a(k, k);
      a(i, k) = l;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
    }
  }
  f.lu = std::move(a);
  return f;
}

template <class T>
std::vector<T> plain_lu_solve_t(const PlainLU<T>& f, const std::vector<T>& b) {
  const std::size_t n = f.lu.rows();
  if (b.size() != n) throw DimensionError("plain_lu_solve: dimension mismatch");
  std::vector<T> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    T s = b[f.perm[i]];
    for (std::size_t k = 0; k < i; ++k) s -= f.lu(i, k) * y[k];
    y[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    T s = y[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= f.lu(i, j) * y[j];
    y[i] = s / f.lu(i, i);
  }
  return y;
}

Vec plain_lu_solve(const DenseMatrix& a, std::span<const double> b);
DenseMatrix plain_inverse(const DenseMatrix& a);

// Brute-force matrix-tree identities for M with M_ij = -w[i][j] (i != j,
// 1-based node labels) and M 1 = (w[i][0]). `w` is (n+1) x (n+1); row 0 and
// the diagonal are ignored. Supported for n <= 6.
using TreeWeights = std::vector<std::vector<double>>;

// One spanning forest term: the parent of each node 1..n (0 = root) and the
// product of its edge weights.
struct TreeMonomial {
  std::vector<std::size_t> parent;  // parent[i] for i = 1..n; parent[0] unused
  double weight = 0.0;
};

double tree_oracle_det(const TreeWeights& w);
DenseMatrix tree_oracle_adj(const TreeWeights& w);
PartialInverse tree_oracle_RS(const TreeWeights& w);

std::vector<TreeMonomial> tree_det_monomials(const TreeWeights& w);
// Terms of (adj M)_{kl}, 0-based k, l.
std::vector<TreeMonomial> tree_adj_monomials(const TreeWeights& w, std::size_t k, std::size_t l);
// Renders a monomial as "w10*w21*w30" (sorted by child index).
std::string monomial_string(const TreeMonomial& m);

// Triplet (Row) of the matrix described by tree weights.
TripletMMatrix triplet_from_weights(const TreeWeights& w);

}  // namespace mlpr
