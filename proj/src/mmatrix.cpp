#include "mlpr/mmatrix.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "mlpr/cw.hpp"

namespace mlpr {

namespace {

std::atomic<int> g_assert_override{-1};
std::atomic<std::size_t> g_checked{0};

bool env_assert() {
  static const bool on = [] {
    const char* v = std::getenv("GTH_ASSERT_NONNEG");
    return v != nullptr && std::string(v) == "1";
  }();
  return on;
}

template <class T>
Matrix<T> lift(const DenseMatrix& a) {
  Matrix<T> r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = T(a(i, j));
  return r;
}

template <class T>
std::vector<T> lift(std::span<const double> v) {
  return std::vector<T>(v.begin(), v.end());
}

void require_irreducible(const DenseMatrix& offdiag, const char* who) {
  const auto bad = not_strongly_connected(offdiag);
  if (!bad.empty()) throw ReducibleError(std::string(who) + ": offdiagonal pattern is reducible", bad);
}

// t with t^T L1 = 0 (Row) for the zero-sum matrix on (w, sums = 0), t_n = 1.
template <class T>
std::vector<T> null_vector_t(const Matrix<T>& w, GTHFactorsT<T>* keep = nullptr) {
  const std::size_t n = w.rows();
  std::vector<T> zero(n, T(0.0));
  GTHFactorsT<T> f = gth_detail::eliminate(w, zero, Orientation::Row, n - 1);
  std::vector<T> t(n, T(0.0));
  t[n - 1] = T(1.0);
  for (std::size_t k = n - 1; k-- > 0;) {
    T s(0.0);
    for (std::size_t i = k + 1; i < n; ++i)
      if (!gth_detail::is_zero(f.lower(i, k))) s += t[i] * f.lower(i, k);
    t[k] = s;
  }
  if (keep) *keep = std::move(f);
  return t;
}

}  // namespace

bool gth_assert_enabled() {
  const int o = g_assert_override.load();
  if (o >= 0) return o == 1;
  return env_assert();
}

void set_gth_assert_override(int mode) { g_assert_override.store(mode < 0 ? -1 : (mode ? 1 : 0)); }

std::size_t gth_assert_check_count() { return g_checked.load(); }

void gth_detail::count_checked_elimination() { g_checked.fetch_add(1); }

void TripletMMatrix::validate() const {
  const std::size_t n = dim();
  if (n == 0) throw DimensionError("triplet: empty");
  if (offdiag.rows() != n || offdiag.cols() != n) throw DimensionError("triplet: offdiag must be n x n");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(sums[i] >= 0.0) || !std::isfinite(sums[i])) throw DomainError("triplet: sums must be nonnegative");
    if (offdiag(i, i) != 0.0) throw DomainError("triplet: offdiag must have a zero diagonal");
    for (std::size_t j = 0; j < n; ++j)
      if (!(offdiag(i, j) >= 0.0) || !std::isfinite(offdiag(i, j)))
        throw DomainError("triplet: offdiag must be nonnegative");
  }
}

DenseMatrix TripletMMatrix::dense() const {
  const std::size_t n = dim();
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = sums[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      d += orientation == Orientation::Row ? offdiag(i, j) : offdiag(j, i);
      m(i, j) = -offdiag(i, j);
    }
    m(i, i) = d;
  }
  return m;
}

TripletMMatrix TripletMMatrix::transposed() const {
  return {offdiag.transposed(), sums, orientation == Orientation::Row ? Orientation::Col : Orientation::Row};
}

GTHFactors gth_factor(const TripletMMatrix& t) {
  t.validate();
  return gth_factor_t<double>(t.offdiag, t.sums, t.orientation);
}

GTHFactorsT<XScalar> gth_factor_x(const TripletMMatrix& t) {
  t.validate();
  return gth_factor_t<XScalar>(lift<XScalar>(t.offdiag), lift<XScalar>(t.sums), t.orientation);
}

Vec gth_solve(const GTHFactors& f, std::span<const double> b) {
  return gth_solve_t<double>(f, Vec(b.begin(), b.end()));
}

std::vector<std::size_t> not_strongly_connected(const DenseMatrix& offdiag) {
  const std::size_t n = offdiag.rows();
  if (n <= 1) return {};
  auto reach = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v) {
        if (seen[v] || v == u) continue;
        if ((forward ? offdiag(u, v) : offdiag(v, u)) != 0.0) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    return seen;
  };
  const auto f = reach(true);
  const auto b = reach(false);
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < n; ++i)
    if (!f[i] || !b[i]) bad.push_back(i);
  return bad;
}

Vec null_vector(const TripletMMatrix& t) {
  t.validate();
  for (double s : t.sums)
    if (s != 0.0) throw DomainError("null_vector: sums must be zero");
  require_irreducible(t.offdiag, "null_vector");
  const DenseMatrix w = t.orientation == Orientation::Row ? t.offdiag : t.offdiag.transposed();
  return null_vector_t<double>(w);
}

// With L1 = M - diag(w), adj(L1) = 1 c^T where c_l is the weight of spanning
// trees rooted at l; those are exactly the forests with a trivial tree at the
// extra node, so z = c / det M. c_n is the product of the first n-1 GTH pivots
// of L1, and det M the product of all pivots of M; the ratio is accumulated
// pivot by pivot to stay in range.
PartialInverse partial_inverse(const TripletMMatrix& t) {
  t.validate();
  if (t.orientation != Orientation::Row) throw DomainError("partial_inverse: Row orientation required");
  const std::size_t n = t.dim();
  bool any = false;
  for (double s : t.sums) any = any || s > 0.0;
  if (!any) throw SingularError("partial_inverse: sums are zero, matrix is singular");
  require_irreducible(t.offdiag, "partial_inverse");

  using X = XScalar;
  const Matrix<X> w = lift<X>(t.offdiag);
  const GTHFactorsT<X> fm = gth_factor_t<X>(w, lift<X>(t.sums), Orientation::Row);
  GTHFactorsT<X> fl;
  const std::vector<X> that = null_vector_t<X>(w, &fl);
  X scale(1.0);
  for (std::size_t k = 0; k + 1 < n; ++k) scale *= fl.pivots[k] / fm.pivots[k];
  scale /= fm.pivots[n - 1];

  std::vector<X> z(n);
  for (std::size_t l = 0; l < n; ++l) z[l] = that[l] * scale;

  PartialInverse pi;
  pi.z.resize(n);
  pi.S = DenseMatrix(n, n);
  pi.inverse = DenseMatrix(n, n);
  for (std::size_t l = 0; l < n; ++l) pi.z[l] = z[l].to_double();
  std::vector<X> e(n, X(0.0));
  for (std::size_t j = 0; j < n; ++j) {
    e.assign(n, X(0.0));
    e[j] = X(1.0);
    const std::vector<X> col = gth_solve_t<X>(fm, e);
    for (std::size_t i = 0; i < n; ++i) {
      pi.inverse(i, j) = col[i].to_double();
      pi.S(i, j) = (col[i] - z[j]).to_double();
    }
  }
  return pi;
}

DenseMatrix gth_inverse(const TripletMMatrix& t) {
  const GTHFactors f = gth_factor(t);
  const std::size_t n = t.dim();
  DenseMatrix inv(n, n);
  Vec e(n);
  for (std::size_t j = 0; j < n; ++j) {
    e.assign(n, 0.0);
    e[j] = 1.0;
    const Vec col = gth_solve(f, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

InverseBoundReport inverse_cw_bound_check(const TripletMMatrix& m, const TripletMMatrix& mt, double eps) {
  if (m.dim() != mt.dim() || m.orientation != mt.orientation)
    throw DimensionError("inverse_cw_bound_check: triplets do not conform");
  InverseBoundReport r;
  const std::size_t n = m.dim();
  r.epsilon = eps;
  r.bound = static_cast<double>(2 * n - 1) * eps;
  for (std::size_t i = 0; i < n && r.pattern_ok; ++i) {
    if ((m.sums[i] == 0.0) != (mt.sums[i] == 0.0)) r.pattern_ok = false;
    for (std::size_t j = 0; j < n; ++j)
      if ((m.offdiag(i, j) == 0.0) != (mt.offdiag(i, j) == 0.0)) r.pattern_ok = false;
  }
  if (!r.pattern_ok) {
    r.observed = std::numeric_limits<double>::infinity();
    r.within = false;
    return r;
  }
  r.observed = cw_distance(gth_inverse(mt), gth_inverse(m)).value;
  r.within = r.observed <= r.bound;
  return r;
}

Vec plain_lu_solve(const DenseMatrix& a, std::span<const double> b) {
  if (a.rows() != b.size()) throw DimensionError("plain_lu_solve: dimension mismatch");
  return plain_lu_solve_t<double>(plain_lu_factor_t<double>(a), Vec(b.begin(), b.end()));
}

DenseMatrix plain_inverse(const DenseMatrix& a) {
  const auto f = plain_lu_factor_t<double>(a);
  const std::size_t n = a.rows();
  DenseMatrix inv(n, n);
  Vec e(n);
  for (std::size_t j = 0; j < n; ++j) {
    e.assign(n, 0.0);
    e[j] = 1.0;
    const Vec col = plain_lu_solve_t<double>(f, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

}  // namespace mlpr
