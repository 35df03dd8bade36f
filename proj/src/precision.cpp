#include "mlpr/precision.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "mlpr/errors.hpp"
#include "mlpr/gth.hpp"
#include "mlpr/mmatrix.hpp"

namespace mlpr {

namespace {

using X = XScalar;

XScalar pow10_x(int e) {
  X r(1.0);
  X b(10.0);
  unsigned m = static_cast<unsigned>(e < 0 ? -e : e);
  while (m) {
    if (m & 1u) r *= b;
    b *= b;
    m >>= 1;
  }
  return e < 0 ? X(1.0) / r : r;
}

struct XEntry {
  std::size_t i, j, k;
  X value;
};

struct XData {
  std::size_t n = 0;
  XVec a;
  std::vector<XEntry> b;  // sorted as in the source tensor
  X one_minus_two_alpha{0.0};
  bool pagerank = false;
};

XData build_xdata(const Problem& p) {
  XData d;
  d.n = p.dim();
  if (!p.is_pagerank()) {
    d.a = to_xvec(p.a);
    for (const auto& e : p.B.entries()) d.b.push_back({e.i, e.j, e.k, X(e.value)});
    return d;
  }
  const PageRankData& pr = *p.pr;
  d.pagerank = true;
  d.one_minus_two_alpha = X(pr.one_minus_two_alpha);
  const X alpha = (X(1.0) - d.one_minus_two_alpha) / X(2.0);
  const X one_minus_alpha = X(1.0) - alpha;
  X vs(0.0);
  for (double v : pr.v) vs += X(v);
  d.a.resize(d.n);
  for (std::size_t i = 0; i < d.n; ++i) d.a[i] = one_minus_alpha * (X(pr.v[i]) / vs);
  const std::size_t n = d.n;
  std::vector<X> cs(n * n, X(0.0));
  for (const auto& e : pr.P.entries()) cs[e.j + e.k * n] += X(e.value);
  for (const auto& e : pr.P.entries())
    d.b.push_back({e.i, e.j, e.k, alpha * (X(e.value) / cs[e.j + e.k * n])});
  return d;
}

XVec apply_quadratic_x(const XData& d, std::span<const X> x) {
  XVec y(d.n, X(0.0));
  for (const auto& e : d.b) y[e.i] += e.value * (x[e.j] * x[e.k]);
  return y;
}

XVec residual_data(const XData& d, std::span<const X> x) {
  XVec r = apply_quadratic_x(d, x);
  for (std::size_t i = 0; i < d.n; ++i) r[i] = (r[i] + d.a[i]) - x[i];
  return r;
}

double norm_inf_x(std::span<const X> v) {
  double m = 0.0;
  for (const auto& t : v) m = std::max(m, std::fabs(t.to_double()));
  return m;
}

// C = B x: + B :x
Matrix<X> jacobian_part(const XData& d, std::span<const X> x) {
  Matrix<X> c(d.n, d.n);
  for (const auto& e : d.b) {
    c(e.i, e.k) += e.value * x[e.j];
    c(e.i, e.j) += e.value * x[e.k];
  }
  return c;
}

ReferenceSolution finish(const XData& d, XVec x, std::size_t it, double tol) {
  ReferenceSolution s;
  s.residual = norm_inf_x(residual_data(d, x));
  s.x_double = to_vec(x);
  s.x = std::move(x);
  s.iterations = it;
  s.converged = s.residual <= tol;
  return s;
}

ReferenceSolution newton_gth_x(const XData& d, const ReferenceOptions& o) {
  const std::size_t n = d.n;
  XVec x(n, X(0.0));
  XVec r = d.a;
  X z(1.0);
  const X w2 = d.one_minus_two_alpha * d.one_minus_two_alpha;
  std::size_t it = 0;
  for (; it < o.maxit; ++it) {
    if (norm_inf_x(r) <= o.tol) {
      // The updated residual can drift from the true one; confirm directly.
      if (norm_inf_x(residual_data(d, x)) <= o.tol) break;
      r = residual_data(d, x);
    }
    Matrix<X> c = jacobian_part(d, x);
    for (std::size_t i = 0; i < n; ++i) c(i, i) = X(0.0);
    const auto f = gth_factor_t<X>(c, std::vector<X>(n, z), Orientation::Col);
    const XVec h = gth_solve_t<X>(f, r);
    for (std::size_t i = 0; i < n; ++i) x[i] += h[i];
    z = (w2 + z * z) / (X(2.0) * z);
    r = apply_quadratic_x(d, h);
  }
  return finish(d, std::move(x), it, o.tol);
}

ReferenceSolution newton_lu_x(const XData& d, XVec x, const ReferenceOptions& o) {
  const std::size_t n = d.n;
  std::size_t it = 0;
  for (; it < o.maxit; ++it) {
    const XVec r = residual_data(d, x);
    if (norm_inf_x(r) <= o.tol) break;
    Matrix<X> rm = jacobian_part(d, x);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) rm(i, j) = (i == j ? X(1.0) : X(0.0)) - rm(i, j);
    const XVec h = plain_lu_solve_t<X>(plain_lu_factor_t<X>(std::move(rm)), r);
    for (std::size_t i = 0; i < n; ++i) x[i] += h[i];
    if (norm_inf_x(x) > 1e6) break;
  }
  return finish(d, std::move(x), it, o.tol);
}

}  // namespace

XVec to_xvec(std::span<const double> v) { return XVec(v.begin(), v.end()); }

Vec to_vec(std::span<const XScalar> v) {
  Vec r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i].to_double();
  return r;
}

XVec residual_x(const Problem& p, std::span<const XScalar> x) {
  if (x.size() != p.dim()) throw DimensionError("residual_x: dimension mismatch");
  return residual_data(build_xdata(p), x);
}

ReferenceSolution reference_solution(const Problem& p, ReferenceMode mode, ReferenceOptions opts) {
  p.validate();
  const XData d = build_xdata(p);
  if (mode == ReferenceMode::Stochastic) {
    if (!p.is_pagerank()) throw DomainError("reference_solution: stochastic mode needs a PageRank problem");
    XVec x0(d.n);
    for (std::size_t i = 0; i < d.n; ++i) x0[i] = X(p.pr->v[i]);
    return newton_lu_x(d, std::move(x0), opts);
  }
  if (d.pagerank) return newton_gth_x(d, opts);
  return newton_lu_x(d, XVec(d.n, X(0.0)), opts);
}

std::string to_string(const XScalar& x, int digits) {
  if (digits < 1) digits = 1;
  if (std::isnan(x.hi)) return "nan";
  if (std::isinf(x.hi)) return x.hi > 0 ? "inf" : "-inf";
  if (x.hi == 0.0) return "0";
  X v = abs(x);
  const bool neg = x.hi < 0.0;
  int e = static_cast<int>(std::floor(std::log10(v.hi)));
  X m = v / pow10_x(e);
  if (m.hi >= 10.0) {
    m = m / X(10.0);
    ++e;
  } else if (m.hi < 1.0) {
    m = m * X(10.0);
    --e;
  }
  std::vector<int> dig;
  for (int i = 0; i <= digits; ++i) {
    int d = static_cast<int>(std::floor(m.hi));
    if (d > 9) d = 9;
    if (d < 0) d = 0;
    dig.push_back(d);
    m = (m - X(static_cast<double>(d))) * X(10.0);
  }
  // Round on the extra digit.
  if (dig.back() >= 5) {
    int i = digits - 1;
    while (i >= 0 && ++dig[i] == 10) {
      dig[i] = 0;
      --i;
    }
    if (i < 0) {
      dig.insert(dig.begin(), 1);
      ++e;
    }
  }
  dig.resize(digits);
  std::string s = neg ? "-" : "";
  s += static_cast<char>('0' + dig[0]);
  if (digits > 1) {
    s += '.';
    for (int i = 1; i < digits; ++i) s += static_cast<char>('0' + dig[i]);
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "e%+03d", e);
  return s + buf;
}

XScalar parse_xscalar(const std::string& s) {
  std::size_t p = 0;
  bool neg = false;
  if (p < s.size() && (s[p] == '+' || s[p] == '-')) neg = s[p++] == '-';
  X r(0.0);
  int exp10 = 0;
  bool any = false, dot = false;
  for (; p < s.size(); ++p) {
    const char c = s[p];
    if (c >= '0' && c <= '9') {
      r = r * X(10.0) + X(static_cast<double>(c - '0'));
      if (dot) --exp10;
      any = true;
    } else if (c == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  if (!any) throw std::invalid_argument("parse_xscalar: no digits in '" + s + "'");
  if (p < s.size() && (s[p] == 'e' || s[p] == 'E')) {
    ++p;
    std::size_t used = 0;
    exp10 += std::stoi(s.substr(p), &used);
    p += used;
  }
  if (p != s.size()) throw std::invalid_argument("parse_xscalar: trailing characters in '" + s + "'");
  if (exp10 != 0) r = exp10 > 0 ? r * pow10_x(exp10) : r / pow10_x(-exp10);
  return neg ? -r : r;
}

}  // namespace mlpr
